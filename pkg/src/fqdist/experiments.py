"""Seeded experiment suites over the counting and certificate machinery.

Randomness is counter-based (Philox keyed by seed and a purpose tag), so any
instance can be regenerated independently of draw order: the same config
always yields the same sets, reports, and JSON bytes (modulo wall-clock
duration).  Suites never raise on a failed certificate; they record it, and
the caller turns the aggregate into an exit code.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from .errors import SizeGuardError
from .field import PrimeField, enumerate_so2, make_field, so2_orbit_check
from .fourier import (
    MAX_QUADRATIC,
    DensityTable,
    exact_phase_histogram,
    forward_transform,
    forward_transform_direct,
    indicator_table,
    inverse_transform,
    orthogonality_check,
    plancherel_gap,
    sphere_decay_check,
)
from .geometry import PointSet, all_norms, decode_codes, norm_fiber_sizes
from .pair_spectrum import (
    SplitPointSet,
    achieved_pairs,
    discrepancy_report,
    distance_set,
    marginal_spectral_mass,
    pair_spectrum,
    pair_spectrum_fast,
    pair_spectrum_naive,
    spectrum_energy,
    spectrum_energy_bruteforce,
    surjectivity_check,
)
from .rotation_energy import (
    circle_energy,
    correlation_transform_check,
    coverage_min_bound,
    energy_chain_check,
    plane_strip_scan,
    sphere_restricted_mass,
)

SUITES = ("lemmas", "coverage", "energy", "sharpness")
GENERATORS = ("bernoulli", "full", "near-full", "circles", "product", "strip", "sharp-product")

# Purpose tags for the counter-based generator; never reuse a value.
_T_DENSITY = 1
_T_BERNOULLI = 2
_T_DELETION = 3
_T_SIZE = 4
_T_SAMPLE = 5
_T_PRODUCT = 6
_T_SEARCH = 7
_T_ORACLE = 8
_T_ROTSAMPLE = 9
_T_PLANCHEREL = 10
_T_MASS = 11
_T_PHASE = 12

_MASK = (1 << 64) - 1


def substream(seed: int, *tags: int) -> np.random.Generator:
    """Independent generator determined by (seed, tags) alone."""
    mixed = 0
    for t in tags:
        mixed = (mixed * 1000003 + int(t) + 1) & _MASK
    key = np.array([seed & _MASK, mixed], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


@dataclass
class ExperimentConfig:
    """Knobs shared by the CLI and the suite runners."""

    q: int
    k: int = 2
    l: int = 2
    suite: str = "lemmas"
    generator: str = "bernoulli"
    density: float | None = None
    strip_len: int | None = None
    budget: int = 2000
    seed: int = 0
    constant_c: float = 10.0
    instances: int = 20
    oracle_instances: int = 20

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; choose from {SUITES}")
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}; choose from {GENERATORS}")
        if self.density is not None and not 0.0 < self.density <= 1.0:
            raise ValueError("density must be in (0, 1]")
        if self.instances < 1 or self.oracle_instances < 0:
            raise ValueError("instance counts must be positive")
        if self.budget < 1:
            raise ValueError("budget must be positive")


def _instance_density(cfg: ExperimentConfig, instance: int, which_bit: int) -> float:
    if cfg.density is not None:
        return cfg.density
    gen = substream(cfg.seed, _T_DENSITY, instance, which_bit)
    return 0.1 + 0.8 * float(gen.random())


def _bernoulli_codes(cfg: ExperimentConfig, field: PrimeField, dims: int,
                     instance: int, which_bit: int) -> np.ndarray:
    size = field.q**dims
    if size > 10**8:
        raise SizeGuardError(f"q^dims = {size} exceeds the enumeration limit")
    density = _instance_density(cfg, instance, which_bit)
    gen = substream(cfg.seed, _T_BERNOULLI, instance, which_bit)
    return np.nonzero(gen.random(size) < density)[0].astype(np.int64)


def _near_full_codes(cfg: ExperimentConfig, field: PrimeField, instance: int) -> np.ndarray:
    """Full space minus a seeded deletion, small enough to stay over threshold."""
    q, k, l = field.q, cfg.k, cfg.l
    ambient = q ** (k + l)
    threshold = 16 * q ** (k + 2 * l + 1)
    n_min = math.isqrt(threshold) + 1
    max_del = ambient - n_min
    if max_del < 1:
        raise ValueError(
            f"threshold {threshold} is unreachable: the full space has only "
            f"{ambient}^2 pairs"
        )
    cap = min(2400, max_del)
    gen = substream(cfg.seed, _T_DELETION, instance, 0)
    n_del = int(gen.integers(1, cap + 1))
    deleted = gen.choice(ambient, size=n_del, replace=False)
    keep = np.ones(ambient, dtype=bool)
    keep[deleted] = False
    return np.nonzero(keep)[0].astype(np.int64)


def _circle_codes(field: PrimeField, which_bit: int) -> np.ndarray:
    """Unit circle embedded in the first plane (E) or the second plane (F)."""
    q = field.q
    norms = all_norms(q, 2)
    circle = np.nonzero(norms == 1 % q)[0].astype(np.int64)
    return circle * (q * q) if which_bit == 0 else circle


def _product_first_factor(cfg: ExperimentConfig, field: PrimeField, instance: int) -> PointSet:
    """Nonempty seeded random subset of F_q^k for product constructions."""
    for attempt in range(64):
        codes = _bernoulli_codes(cfg, field, cfg.k, instance, 2 + attempt)
        if len(codes):
            return PointSet(field, cfg.k, codes)
    raise RuntimeError("could not draw a nonempty factor; density too small")


@dataclass(frozen=True)
class SearchResult:
    """Best set found with one distance excluded, plus the search record."""

    point_set: PointSet
    missing_distance: int
    candidates_tried: int


def search_missing_distance_set(field: PrimeField, k: int, budget: int,
                                seed: int) -> SearchResult:
    """Randomized greedy search for a large E1 in F_q^k avoiding one distance.

    Draws random candidate points and keeps those that never realize the
    target distance against the current set.  Several restarts with different
    excluded distances; the best set wins.  Postcondition re-verified by an
    independent pairwise scan.
    """
    if k % 2 == 0:
        raise ValueError("the search targets odd k; even k has no such gap here")
    q = field.q
    if q**k > 10**5:
        raise SizeGuardError(f"q^k = {q**k} is too large for the greedy search")
    gen = substream(seed, _T_SEARCH, q, k)
    restarts = 4
    per_restart = max(1, budget // restarts)
    best_codes: np.ndarray | None = None
    best_missing = 1
    tried = 0
    for restart in range(restarts):
        missing = int(gen.integers(1, q))
        chosen: list[int] = []
        coords_list: list[np.ndarray] = []
        candidates = gen.integers(0, q**k, size=per_restart)
        cand_coords = decode_codes(q, k, candidates)
        for idx in range(per_restart):
            tried += 1
            code = int(candidates[idx])
            v = cand_coords[idx]
            if coords_list:
                diffs = (np.stack(coords_list) - v[None, :]) % q
                norms = (diffs * diffs).sum(axis=1) % q
                if (norms == missing).any():
                    continue
            if code in chosen:
                continue
            chosen.append(code)
            coords_list.append(v)
        if best_codes is None or len(chosen) > len(best_codes):
            best_codes = np.array(sorted(set(chosen)), dtype=np.int64)
            best_missing = missing
    ps = PointSet(field, k, best_codes if best_codes is not None else [])
    if len(ps) == 0:
        raise RuntimeError("search produced an empty set; increase the budget")
    realized = distance_set(ps)
    if best_missing in realized:
        raise RuntimeError("search postcondition failed: excluded distance realized")
    return SearchResult(ps, best_missing, tried)


def generate_set(cfg: ExperimentConfig, which: str, instance: int = 0) -> SplitPointSet:
    """Deterministic set for (config, E-or-F, instance index).

    Generators full, near-full, product, strip, and sharp-product build E = F
    by design and ignore which; bernoulli and circles distinguish the two.
    """
    which_bit = {"E": 0, "F": 1}.get(which.upper())
    if which_bit is None:
        raise ValueError(f"which must be 'E' or 'F', got {which!r}")
    field = make_field(cfg.q)
    k, l = cfg.k, cfg.l
    if cfg.generator == "bernoulli":
        return SplitPointSet(field, k, l, _bernoulli_codes(cfg, field, k + l, instance, which_bit))
    if cfg.generator == "full":
        return SplitPointSet.full(field, k, l)
    if cfg.generator == "near-full":
        return SplitPointSet(field, k, l, _near_full_codes(cfg, field, instance))
    if cfg.generator == "circles":
        if (k, l) != (2, 2):
            raise ValueError("circles need the plane-pair split k = l = 2")
        return SplitPointSet(field, 2, 2, _circle_codes(field, which_bit))
    if cfg.generator == "product":
        first = _product_first_factor(cfg, field, instance)
        return SplitPointSet.product(first, PointSet.full(field, l))
    if cfg.generator == "strip":
        length = cfg.strip_len if cfg.strip_len is not None else (field.q + 1) // 2
        strip = PointSet.from_vectors(field, 2, [(i, 0) for i in range(length)])
        return SplitPointSet.product(PointSet.full(field, 2), strip)
    if cfg.generator == "sharp-product":
        found = search_missing_distance_set(field, k, cfg.budget, cfg.seed)
        return SplitPointSet.product(found.point_set, PointSet.full(field, l))
    raise AssertionError(f"unhandled generator {cfg.generator}")


def _json_safe(obj):
    """Recursively coerce numpy scalars, tuples, and fractions to JSON types."""
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


@dataclass(frozen=True)
class CheckResult:
    """One named pass/fail entry of a suite run."""

    name: str
    operation: str
    passed: bool
    payload: dict


@dataclass
class RunReport:
    """Everything one suite run produced, JSON-serializable and deterministic."""

    suite: str
    config: dict
    checks: list[CheckResult]
    duration_ms: int
    artifacts: dict = dc_field(default_factory=dict, repr=False)

    @property
    def all_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json_dict(self) -> dict:
        return {
            "schema": 1,
            "suite": self.suite,
            "config": _json_safe(self.config),
            "checks": [
                {"name": c.name, "operation": c.operation, "pass": bool(c.passed),
                 "payload": _json_safe(c.payload)}
                for c in self.checks
            ],
            "all_pass": bool(self.all_pass),
            "duration_ms": self.duration_ms,
        }

    def to_json_text(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"


def _skip(name: str, operation: str, reason: str) -> CheckResult:
    return CheckResult(name, operation, True, {"skipped": True, "reason": reason})


# ----------------------------------------------------------------- lemmas ---


def _lemmas_checks(cfg: ExperimentConfig, field: PrimeField) -> tuple[list[CheckResult], dict]:
    q = field.q
    checks: list[CheckResult] = []
    artifacts: dict = {}
    dims = [d for d in (2, 3, 4) if q**d <= 1_500_000]
    if not dims:
        raise ValueError(f"q = {q} is too large for the enumeration-based lemmas suite")

    for d in dims:
        counts = norm_fiber_sizes(field, d)
        allowance = 2 * q ** (d - 2)
        deviations = [abs(int(counts[t]) - q ** (d - 1)) for t in range(1, q)]
        worst = max(deviations)
        checks.append(CheckResult(
            f"sphere-count-law d={d}", "norm_fiber_sizes",
            worst <= allowance and int(counts.sum()) == q**d,
            {"d": d, "max_abs_deviation": worst, "allowance": allowance},
        ))

    for d in dims:
        rep = sphere_decay_check(field, d)
        checks.append(CheckResult(
            f"sphere-decay d={d}", "sphere_decay_check", rep.passed,
            {"d": d, "max_ratio": rep.max_ratio, "worst_t": rep.worst_t,
             "worst_m": list(rep.worst_m), "bound": rep.bound},
        ))

    for d in dims:
        if (q**d) ** 2 > MAX_QUADRATIC:
            checks.append(_skip(f"orthogonality d={d}", "orthogonality_check",
                                f"q^2d = {(q**d)**2} phases exceed the brute-force budget"))
            continue
        rep = orthogonality_check(field, d)
        checks.append(CheckResult(
            f"orthogonality d={d}", "orthogonality_check", rep.passed,
            {"d": d, "zero_frequency_sum": rep.zero_frequency_sum,
             "max_nonzero_modulus": rep.max_nonzero_modulus},
        ))

    for d in dims:
        worst_rel = 0.0
        for i in range(cfg.instances):
            gen = substream(cfg.seed, _T_PLANCHEREL, d, i)
            density = 0.1 + 0.8 * float(gen.random())
            values = (gen.random(q**d) < density).astype(np.complex128)
            table = DensityTable(field, d, values)
            support = float(values.real.sum())
            if support == 0:
                continue
            scale = support / q**d
            worst_rel = max(worst_rel, plancherel_gap(table) / scale)
        checks.append(CheckResult(
            f"plancherel d={d}", "plancherel_gap", worst_rel <= 1e-9,
            {"d": d, "instances": cfg.instances, "max_relative_gap": worst_rel},
        ))

    # Round-trip and the defining-sum route, on the largest ambient that the
    # quadratic route still allows.
    rt_dims = [d for d in dims if (q**d) ** 2 <= MAX_QUADRATIC]
    if rt_dims:
        d = rt_dims[-1]
        gen = substream(cfg.seed, _T_PLANCHEREL, 99, d)
        values = gen.normal(size=q**d) + 1j * gen.normal(size=q**d)
        table = DensityTable(field, d, values)
        spec = forward_transform(table)
        direct = forward_transform_direct(table)
        back = inverse_transform(spec).values
        rt_err = float(np.max(np.abs(back - values)))
        route_err = float(np.max(np.abs(spec.coeffs - direct.coeffs)))
        scale = float(np.max(np.abs(values)))
        checks.append(CheckResult(
            f"transform-roundtrip d={d}", "forward_transform",
            rt_err <= 1e-9 * max(1.0, scale) and route_err <= 1e-9,
            {"d": d, "roundtrip_error": rt_err, "route_disagreement": route_err},
        ))

    # Exact phase histograms against the float coefficients.
    phase_worst = 0.0
    for i in range(min(cfg.instances, 20)):
        gen = substream(cfg.seed, _T_PHASE, i)
        d = int(gen.integers(2, 1 + max(2, dims[-1])))
        codes = np.nonzero(gen.random(q**d) < 0.4)[0]
        if len(codes) == 0:
            continue
        ps = PointSet(field, d, codes)
        m = [int(x) for x in gen.integers(0, q, size=d)]
        hist = exact_phase_histogram(ps, m)
        spec = forward_transform(indicator_table(ps))
        code = 0
        for x in m:
            code = code * q + x
        phase_worst = max(phase_worst, abs(hist.coefficient() - spec.coeffs[code]))
    checks.append(CheckResult(
        "phase-histogram-agreement", "exact_phase_histogram",
        phase_worst <= 1e-10, {"max_abs_disagreement": phase_worst},
    ))

    if field.q_mod_4 == 3:
        rep = so2_orbit_check(field)
        checks.append(CheckResult(
            "so2-orbit", "so2_orbit_check", rep.passed,
            {"so2_size": rep.so2_size, "vectors_checked": rep.vectors_checked},
        ))

        rows = []
        reports = []
        all_hold = True
        worst_ratio = 0.0
        for a in range(1, q):
            ce = circle_energy(field, a)
            reports.append(ce)
            rows.append([q, a, ce.sphere_size, ce.energy, ce.bound])
            all_hold = all_hold and ce.holds
            worst_ratio = max(worst_ratio, ce.energy / ce.bound)
        checks.append(CheckResult(
            "circle-energy", "circle_energy", all_hold,
            {"radii": q - 1, "max_energy_over_bound": worst_ratio, "rows": rows},
        ))
        artifacts["circle_energy_reports"] = reports
    else:
        checks.append(_skip("so2-orbit", "so2_orbit_check", "needs q = 3 mod 4"))
        checks.append(_skip("circle-energy", "circle_energy", "needs q = 3 mod 4"))
        artifacts["circle_energy_reports"] = []

    # Marginal mass lemma: random sets plus the saturating single fiber.
    k, l = cfg.k, cfg.l
    mm_ok = True
    mm_float_worst = 0.0
    for i in range(cfg.instances):
        gen = substream(cfg.seed, _T_MASS, i)
        density = 0.05 + 0.9 * float(gen.random())
        codes = np.nonzero(gen.random(q ** (k + l)) < density)[0]
        e = SplitPointSet(field, k, l, codes)
        rep = marginal_spectral_mass(e)
        mm_ok = mm_ok and rep.holds and rep.float_agrees
        mm_float_worst = max(mm_float_worst, abs(rep.float_value - float(rep.exact)))
    fiber = SplitPointSet.product(
        PointSet(field, k, [min(1, q**k - 1)]), PointSet.full(field, l))
    sat = marginal_spectral_mass(fiber)
    checks.append(CheckResult(
        "marginal-mass", "marginal_spectral_mass",
        mm_ok and sat.holds and sat.saturated,
        {"instances": cfg.instances, "max_float_gap": mm_float_worst,
         "saturating_fiber_exact": str(sat.exact), "saturated": sat.saturated},
    ))

    if field.q_mod_4 == 3:
        sm_ok = True
        sm_worst = 0.0
        for i in range(cfg.instances):
            gen = substream(cfg.seed, _T_MASS, 1000 + i)
            density = 0.05 + 0.9 * float(gen.random())
            codes = np.nonzero(gen.random(q**4) < density)[0]
            e = SplitPointSet(field, 2, 2, codes)
            if len(e) == 0:
                continue
            for a in range(1, q):
                rep = sphere_restricted_mass(e, a)
                sm_ok = sm_ok and rep.holds
                if rep.bound > 0:
                    sm_worst = max(sm_worst, rep.value / rep.bound)
        checks.append(CheckResult(
            "sphere-restricted-mass", "sphere_restricted_mass", sm_ok,
            {"instances": cfg.instances, "max_value_over_bound": sm_worst},
        ))
    else:
        checks.append(_skip("sphere-restricted-mass", "sphere_restricted_mass",
                            "needs q = 3 mod 4"))

    return checks, artifacts


# --------------------------------------------------------------- coverage ---


def _coverage_checks(cfg: ExperimentConfig, field: PrimeField,
                     loaded: tuple[SplitPointSet, SplitPointSet] | None
                     ) -> tuple[list[CheckResult], dict]:
    q, k, l = field.q, cfg.k, cfg.l
    checks: list[CheckResult] = []
    artifacts: dict = {}
    if not (l >= k >= 2):
        raise ValueError(f"coverage suite needs l >= k >= 2, got ({k}, {l})")

    if loaded is not None:
        e, f = loaded
        spectrum = pair_spectrum(e, f)
        artifacts["spectrum"] = spectrum
        rep = discrepancy_report(e, f, spectrum)
        checks.append(CheckResult(
            "discrepancy (loaded sets)", "discrepancy_report", rep.all_ok,
            {"max_ratio": rep.max_ratio, "detail": rep.to_json_dict()},
        ))
        sc = surjectivity_check(e, f, spectrum)
        checks.append(CheckResult(
            "surjectivity (loaded sets)", "surjectivity_check", sc.consistent,
            {"threshold_met": sc.threshold_met, "coverage": sc.coverage,
             "surjective": sc.surjective},
        ))
        return checks, artifacts

    # Discrepancy certificate on seeded instances.
    disc_ok = True
    cons_ok = True
    max_ratio = 0.0
    for i in range(cfg.instances):
        e = generate_set(cfg, "E", i)
        f = generate_set(cfg, "F", i)
        if len(e) == 0 or len(f) == 0:
            continue
        spectrum = pair_spectrum(e, f)
        if i == 0:
            artifacts["spectrum"] = spectrum
        rep = discrepancy_report(e, f, spectrum)
        disc_ok = disc_ok and rep.all_ok
        max_ratio = max(max_ratio, rep.max_ratio)
        sc = surjectivity_check(e, f, spectrum)
        cons_ok = cons_ok and sc.consistent
    checks.append(CheckResult(
        "discrepancy", "discrepancy_report", disc_ok,
        {"instances": cfg.instances, "generator": cfg.generator,
         "max_error_over_budget": max_ratio},
    ))
    checks.append(CheckResult(
        "threshold-consistency", "surjectivity_check", cons_ok,
        {"instances": cfg.instances},
    ))

    # Full space and seeded near-full deletions, where the threshold is live.
    ambient = q ** (k + l)
    threshold = 16 * q ** (k + 2 * l + 1)
    if ambient * ambient > threshold:
        full = SplitPointSet.full(field, k, l)
        sc = surjectivity_check(full, full)
        surj_ok = sc.threshold_met and sc.surjective
        min_size = len(full)
        deletion_cfg = ExperimentConfig(
            q=cfg.q, k=k, l=l, suite=cfg.suite, generator="near-full",
            seed=cfg.seed, instances=cfg.instances,
        )
        for i in range(cfg.instances):
            e = generate_set(deletion_cfg, "E", i)
            min_size = min(min_size, len(e))
            sc = surjectivity_check(e, e)
            surj_ok = surj_ok and sc.threshold_met and sc.surjective
        checks.append(CheckResult(
            "surjectivity-above-threshold", "surjectivity_check", surj_ok,
            {"instances": cfg.instances + 1, "min_size": min_size,
             "threshold": threshold},
        ))
    else:
        checks.append(_skip(
            "surjectivity-above-threshold", "surjectivity_check",
            f"threshold {threshold} unreachable: |E||F| <= {ambient}^2"))

    # Route agreement: the literal scan versus the transform route, and the
    # quadratic quadruple count on tiny instances.
    small_cap = min(300, ambient)
    agree_ok = True
    energy_ok = True
    energy_checked = 0
    for i in range(cfg.oracle_instances):
        gen = substream(cfg.seed, _T_ORACLE, i)
        tiny = i % 2 == 1
        cap = min(40, ambient) if tiny else small_cap
        ne = int(gen.integers(1, cap + 1))
        nf = int(gen.integers(1, cap + 1))
        e = SplitPointSet(field, k, l, gen.choice(ambient, size=ne, replace=False))
        f = SplitPointSet(field, k, l, gen.choice(ambient, size=nf, replace=False))
        fast = pair_spectrum_fast(e, f)
        naive = pair_spectrum_naive(e, f)
        agree_ok = agree_ok and bool(np.array_equal(fast.s, naive.s))
        if len(e) <= 40 and len(f) <= 40:
            energy_checked += 1
            energy_ok = energy_ok and (
                spectrum_energy(fast) == spectrum_energy_bruteforce(e, f))
    checks.append(CheckResult(
        "route-agreement", "pair_spectrum_fast", agree_ok,
        {"instances": cfg.oracle_instances},
    ))
    checks.append(CheckResult(
        "quadruple-count", "spectrum_energy", energy_ok,
        {"instances": energy_checked},
    ))
    return checks, artifacts


# ----------------------------------------------------------------- energy ---


def _energy_checks(cfg: ExperimentConfig, field: PrimeField,
                   loaded: tuple[SplitPointSet, SplitPointSet] | None
                   ) -> tuple[list[CheckResult], dict]:
    q = field.q
    checks: list[CheckResult] = []
    artifacts: dict = {}
    if field.q_mod_4 != 3 or (cfg.k, cfg.l) != (2, 2):
        raise ValueError("energy suite needs q = 3 mod 4 and k = l = 2")

    # Single-point identity: lhs = 1, rhs = |SO2|^2 exactly.
    point = SplitPointSet(field, 2, 2, [0])
    rep = energy_chain_check(point, point)
    so2_size = rep.so2_size
    checks.append(CheckResult(
        "single-point-identity", "energy_chain_check",
        rep.lhs == 1 and rep.rhs == so2_size**2 and rep.holds,
        {"lhs": rep.lhs, "rhs": rep.rhs, "so2_size": so2_size},
    ))

    rotations = enumerate_so2(field)
    cap = min(2000, q**4)

    def run_instance(e: SplitPointSet, f: SplitPointSet, index: int) -> dict:
        spectrum = pair_spectrum(e, f)
        if index == 0:
            artifacts.setdefault("spectrum", spectrum)
        chain = energy_chain_check(e, f, spectrum)
        gen = substream(cfg.seed, _T_ROTSAMPLE, index)
        devs = []
        for _ in range(2):
            theta = rotations[int(gen.integers(0, len(rotations)))]
            phi = rotations[int(gen.integers(0, len(rotations)))]
            devs.append(correlation_transform_check(e, theta, phi).max_deviation)
        bound = coverage_min_bound(e, f, cfg.constant_c, spectrum)
        return {
            "chain": chain,
            "max_transform_dev": max(devs),
            "bound": bound,
        }

    if loaded is not None:
        pairs = [loaded]
    else:
        pairs = []
        for i in range(cfg.instances):
            gen = substream(cfg.seed, _T_SIZE, i)
            ne = int(gen.integers(max(1, cap // 10), cap + 1))
            nf = int(gen.integers(max(1, cap // 10), cap + 1))
            sampler = substream(cfg.seed, _T_SAMPLE, i)
            e = SplitPointSet(field, 2, 2, sampler.choice(q**4, size=ne, replace=False))
            f = SplitPointSet(field, 2, 2, sampler.choice(q**4, size=nf, replace=False))
            pairs.append((e, f))

    chain_ok = True
    zero_ok = True
    split_ok = True
    over_ok = True
    transform_ok = True
    bound_ok = True
    max_split = 0.0
    max_dev = 0.0
    max_emp_c = 0.0
    for i, (e, f) in enumerate(pairs):
        out = run_instance(e, f, i)
        chain = out["chain"]
        chain_ok = chain_ok and chain.holds
        zero_ok = zero_ok and chain.zero_agrees
        split_ok = split_ok and chain.split_ok
        over_ok = over_ok and chain.overcount_matches
        transform_ok = transform_ok and out["max_transform_dev"] <= 1e-8
        max_split = max(max_split, chain.split_residual)
        max_dev = max(max_dev, out["max_transform_dev"])
        bound = out["bound"]
        max_emp_c = max(max_emp_c, bound.empirical_c)
        if bound.c_dominates:
            bound_ok = bound_ok and bound.holds

    n_instances = len(pairs)
    checks.append(CheckResult(
        "energy-chain", "energy_chain_check", chain_ok,
        {"instances": n_instances, "size_cap": cap},
    ))
    checks.append(CheckResult(
        "zero-frequency-term", "energy_chain_check", zero_ok,
        {"instances": n_instances,
         "formula": "|SO2|^2 |E|^2 |F|^2 / q^4", "so2_size": so2_size},
    ))
    checks.append(CheckResult(
        "frequency-split", "energy_chain_check", split_ok,
        {"instances": n_instances, "max_relative_residual": max_split},
    ))
    checks.append(CheckResult(
        "orbit-weight-identity", "energy_chain_check", over_ok,
        {"instances": n_instances},
    ))
    checks.append(CheckResult(
        "correlation-transform", "correlation_transform_check", transform_ok,
        {"instances": n_instances, "max_deviation": max_dev},
    ))
    checks.append(CheckResult(
        "coverage-min-bound", "coverage_min_bound", bound_ok,
        {"instances": n_instances, "constant_c": cfg.constant_c,
         "max_empirical_c": max_emp_c},
    ))
    return checks, artifacts


# -------------------------------------------------------------- sharpness ---


def _sharpness_checks(cfg: ExperimentConfig, field: PrimeField) -> tuple[list[CheckResult], dict]:
    q, k, l = field.q, cfg.k, cfg.l
    checks: list[CheckResult] = []
    artifacts: dict = {}
    rows: list[list] = []

    if (k, l) == (2, 2):
        circles_cfg = ExperimentConfig(q=q, k=2, l=2, suite="sharpness",
                                       generator="circles", seed=cfg.seed)
        e = generate_set(circles_cfg, "E")
        f = generate_set(circles_cfg, "F")
        spectrum = pair_spectrum(e, f)
        pairs = achieved_pairs(spectrum)
        expected = {(1 % q, 1 % q)}
        ok = pairs == expected and spectrum.s[1 % q, 1 % q] == len(e) * len(f)
        rows.append(["circles", 1, len(e), len(pairs)])
        checks.append(CheckResult(
            "orthogonal-circles", "achieved_pairs", ok,
            {"size_e": len(e), "size_f": len(f), "coverage": len(pairs)},
        ))
    else:
        checks.append(_skip("orthogonal-circles", "achieved_pairs",
                            "needs the plane-pair split k = l = 2"))

    if l >= 2:
        prod_ok = True
        for i in range(cfg.instances):
            first = _product_first_factor(cfg, field, i)
            e = SplitPointSet.product(first, PointSet.full(field, l))
            spectrum = pair_spectrum(e, e)
            pairs = achieved_pairs(spectrum)
            delta = distance_set(first)
            expected = {(a, b) for a in delta for b in range(q)}
            prod_ok = prod_ok and pairs == expected
            if i == 0:
                rows.append(["product", len(first), len(e), len(pairs)])
        checks.append(CheckResult(
            "product-law", "achieved_pairs", prod_ok,
            {"instances": cfg.instances, "k": k, "l": l},
        ))
    else:
        checks.append(_skip("product-law", "achieved_pairs", "needs l >= 2"))

    if (k, l) == (2, 2) and field.q_mod_4 == 3:
        lengths = [cfg.strip_len] if cfg.strip_len is not None else list(range(1, q + 1))
        strip_ok = True
        for length in lengths:
            rep = plane_strip_scan(field, length)
            strip_ok = strip_ok and rep.matches
            rows.append(["strip", length, rep.size, rep.coverage])
        checks.append(CheckResult(
            "plane-strip", "plane_strip_scan", strip_ok,
            {"lengths": lengths},
        ))
    else:
        checks.append(_skip("plane-strip", "plane_strip_scan",
                            "needs k = l = 2 and q = 3 mod 4"))

    if k % 2 == 1 and q**k <= 10**5:
        found = search_missing_distance_set(field, k, cfg.budget, cfg.seed)
        e = SplitPointSet.product(found.point_set, PointSet.full(field, l))
        spectrum = pair_spectrum(e, e)
        pairs = achieved_pairs(spectrum)
        delta = distance_set(found.point_set)
        expected = {(a, b) for a in delta for b in range(q)}
        ok = (pairs == expected and len(pairs) < q * q
              and found.missing_distance not in delta)
        rows.append(["sharp-product", len(found.point_set), len(e), len(pairs)])
        checks.append(CheckResult(
            "missing-distance-product", "search_missing_distance_set", ok,
            {"factor_size": len(found.point_set),
             "missing_distance": found.missing_distance,
             "coverage": len(pairs), "full_coverage": q * q,
             "candidates_tried": found.candidates_tried},
        ))
    else:
        checks.append(_skip("missing-distance-product", "search_missing_distance_set",
                            "needs odd k with q^k <= 1e5"))

    artifacts["sharpness_rows"] = rows
    return checks, artifacts


def run_suite(suite: str, cfg: ExperimentConfig,
              e_set: SplitPointSet | None = None,
              f_set: SplitPointSet | None = None) -> RunReport:
    """Run one suite and collect its checks; never raises on failed checks."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    field = make_field(cfg.q)
    loaded = None
    if e_set is not None:
        loaded = (e_set, f_set if f_set is not None else e_set)
    start = time.perf_counter()
    if suite == "lemmas":
        checks, artifacts = _lemmas_checks(cfg, field)
    elif suite == "coverage":
        checks, artifacts = _coverage_checks(cfg, field, loaded)
    elif suite == "energy":
        checks, artifacts = _energy_checks(cfg, field, loaded)
    else:
        checks, artifacts = _sharpness_checks(cfg, field)
    duration_ms = int((time.perf_counter() - start) * 1000)
    config = asdict(cfg)
    return RunReport(suite, config, checks, duration_ms, artifacts)
