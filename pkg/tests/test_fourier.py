"""Transform correctness: round trips, energy conservation, decay certificates."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqdist import (
    DensityTable,
    PointSet,
    SizeGuardError,
    exact_phase_histogram,
    forward_transform,
    forward_transform_direct,
    indicator_table,
    inverse_transform,
    make_field,
    orthogonality_check,
    plancherel_gap,
    sphere_decay_check,
)


def _random_table(q, d, seed):
    rng = np.random.default_rng(seed)
    values = rng.normal(size=q**d) + 1j * rng.normal(size=q**d)
    return DensityTable(make_field(q), d, values)


def test_forward_matches_defining_sum():
    table = _random_table(5, 2, 1)
    fast = forward_transform(table).coeffs
    direct = forward_transform_direct(table).coeffs
    assert np.max(np.abs(fast - direct)) < 1e-12


def test_roundtrip_identity():
    for q, d in [(3, 2), (7, 2), (5, 3)]:
        table = _random_table(q, d, q + d)
        back = inverse_transform(forward_transform(table)).values
        assert np.max(np.abs(back - table.values)) < 1e-10


def test_full_space_transform_is_delta_at_zero():
    f = make_field(7)
    spec = forward_transform(indicator_table(PointSet.full(f, 2))).coeffs
    assert spec[0] == pytest.approx(1.0)
    assert np.max(np.abs(spec[1:])) < 1e-12


def test_origin_indicator_transform_is_flat():
    f = make_field(5)
    spec = forward_transform(indicator_table(PointSet(f, 2, [0]))).coeffs
    assert np.max(np.abs(spec - 1 / 25)) < 1e-14


def test_single_point_modulus_is_flat():
    f = make_field(7)
    spec = forward_transform(indicator_table(PointSet(f, 2, [23]))).coeffs
    assert np.max(np.abs(np.abs(spec) - 1 / 49)) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.sets(st.integers(0, 48), min_size=1, max_size=49))
def test_plancherel_on_indicators(codes):
    f = make_field(7)
    table = indicator_table(PointSet(f, 2, sorted(codes)))
    # Relative to the mass q^-d |E|, the gap is at float precision.
    assert plancherel_gap(table) < 1e-12 * (len(codes) / 49)


def test_parseval_inner_product():
    # sum_x f conj(g) = q^d sum_m fhat conj(ghat)
    q, d = 5, 2
    ft = _random_table(q, d, 2)
    gt = _random_table(q, d, 3)
    lhs = np.vdot(gt.values, ft.values)
    rhs = (q**d) * np.vdot(forward_transform(gt).coeffs, forward_transform(ft).coeffs)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


def test_orthogonality_check_passes():
    for q, d in [(3, 2), (7, 2), (5, 2), (3, 3)]:
        rep = orthogonality_check(make_field(q), d)
        assert rep.passed
        assert rep.zero_frequency_sum == pytest.approx(q**d, rel=1e-12)


def test_orthogonality_guard():
    with pytest.raises(SizeGuardError):
        orthogonality_check(make_field(991), 2)


def test_sphere_decay_certificate():
    for q in (3, 7, 11):
        for d in (2, 3):
            rep = sphere_decay_check(make_field(q), d)
            assert rep.passed
            assert rep.max_ratio <= 1 + 1e-9


def test_sphere_decay_frozen_extremum():
    # Worst nonzero-frequency coefficient of a nonzero circle at q=3 comes to
    # exactly 1/sqrt(3) of the bound 2q^(-3/2).
    rep = sphere_decay_check(make_field(3), 2)
    assert rep.max_ratio == pytest.approx(1 / np.sqrt(3), abs=1e-12)
    assert rep.bound == pytest.approx(2 * 3 ** (-1.5))


def test_phase_histogram_counts_axis_line():
    # The x-axis line of F_3^2 against frequency (1,0): one point per phase.
    f = make_field(3)
    ps = PointSet.from_vectors(f, 2, [(0, 0), (1, 0), (2, 0)])
    hist = exact_phase_histogram(ps, (1, 0))
    assert hist.counts.tolist() == [1, 1, 1]
    assert abs(hist.coefficient()) < 1e-15  # the three cube roots of unity cancel


def test_phase_histogram_matches_transform():
    f = make_field(7)
    rng = np.random.default_rng(4)
    codes = np.nonzero(rng.random(49) < 0.4)[0]
    ps = PointSet(f, 2, codes)
    spec = forward_transform(indicator_table(ps)).coeffs
    for m in [(0, 0), (1, 0), (3, 5), (6, 6)]:
        hist = exact_phase_histogram(ps, m)
        assert hist.coefficient() == pytest.approx(spec[m[0] * 7 + m[1]], abs=1e-12)
        assert int(hist.counts.sum()) == len(ps)


def test_zero_frequency_is_density():
    f = make_field(5)
    ps = PointSet(f, 2, [1, 2, 3])
    spec = forward_transform(indicator_table(ps)).coeffs
    assert spec[0] == pytest.approx(3 / 25)
