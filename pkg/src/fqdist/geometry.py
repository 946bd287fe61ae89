"""Points of F_q^d: integer encoding, the quadratic norm, spheres, and file I/O.

A point (x_0, ..., x_{d-1}) is encoded as the base-q integer with x_0 most
significant, so ascending code order is lexicographic order on coordinates.
The norm is the sum of squared coordinates mod q (no square root is taken).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import SizeGuardError
from .field import PrimeField, make_field

# Full enumerations of F_q^d are refused above this many points.
MAX_ENUMERATION = 10**8

_norms_cache: dict[tuple[int, int], np.ndarray] = {}


def encode_vectors(q: int, coords) -> np.ndarray:
    """Base-q codes of the rows of an (n, d) coordinate array (d >= 1)."""
    arr = np.asarray(coords, dtype=np.int64)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] < 1:
        raise ValueError("coordinates must form an (n, d) array with d >= 1")
    if np.any(arr < 0) or np.any(arr >= q):
        raise ValueError(f"coordinates must be canonical residues in [0, {q})")
    codes = arr[:, 0].copy()
    for j in range(1, arr.shape[1]):
        codes = codes * q + arr[:, j]
    return codes[0] if single else codes


def decode_codes(q: int, d: int, codes) -> np.ndarray:
    """Inverse of encode_vectors: (n, d) coordinate array from base-q codes."""
    c = np.asarray(codes, dtype=np.int64)
    single = c.ndim == 0
    c = np.atleast_1d(c).copy()
    out = np.empty((len(c), d), dtype=np.int64)
    for j in range(d - 1, -1, -1):
        out[:, j] = c % q
        c //= q
    return out[0] if single else out


def norm(field: PrimeField, v) -> int:
    """Sum of squared coordinates mod q."""
    return int(sum(int(x) * int(x) for x in v) % field.q)


def all_norms(q: int, d: int) -> np.ndarray:
    """norms[c] = norm of the point with code c, for every c < q^d (read-only).

    Built one coordinate at a time: appending a coordinate multiplies codes by
    q and adds the new square, which matches the MSB-first encoding.
    """
    key = (q, d)
    cached = _norms_cache.get(key)
    if cached is not None:
        return cached
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if q**d > MAX_ENUMERATION:
        raise SizeGuardError(
            f"q^d = {q**d} exceeds the enumeration limit {MAX_ENUMERATION}"
        )
    sq = (np.arange(q, dtype=np.int64) ** 2) % q
    norms = np.zeros(1, dtype=np.int64)
    for _ in range(d):
        norms = ((norms[:, None] + sq[None, :]) % q).reshape(-1)
    norms.setflags(write=False)
    _norms_cache[key] = norms
    return norms


def norm_fiber_sizes(field: PrimeField, d: int) -> np.ndarray:
    """counts[t] = number of points of F_q^d with norm t, by direct scan."""
    return np.bincount(all_norms(field.q, d), minlength=field.q).astype(np.int64)


@dataclass(frozen=True, eq=False)
class Sphere:
    """The sphere of radius t (norm value t) in F_q^d, points enumerated."""

    field: PrimeField
    d: int
    t: int
    codes: np.ndarray  # ascending, which is lexicographic on coordinates

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def points(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in decode_codes(self.field.q, self.d, self.codes)]


def enumerate_sphere(field: PrimeField, d: int, t: int) -> Sphere:
    """All points of F_q^d with norm t, in lexicographic order.

    Refuses oversized ambients; for counts alone use norm_fiber_sizes.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    if field.q**d > MAX_ENUMERATION:
        raise SizeGuardError(
            f"q^d = {field.q**d} exceeds the enumeration limit {MAX_ENUMERATION}; "
            "norm_fiber_sizes gives the count without enumerating"
        )
    t = t % field.q
    norms = all_norms(field.q, d)
    codes = np.nonzero(norms == t)[0].astype(np.int64)
    return Sphere(field, d, t, codes)


@dataclass(frozen=True, eq=False)
class PointSet:
    """A subset of F_q^d held as sorted unique codes."""

    field: PrimeField
    d: int
    codes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "codes", np.unique(np.asarray(self.codes, dtype=np.int64)))
        if self.d < 1:
            raise ValueError("dimension must be at least 1")
        if len(self.codes) and (self.codes[0] < 0 or self.codes[-1] >= self.field.q**self.d):
            raise ValueError("codes out of range for this ambient")

    def __len__(self) -> int:
        return len(self.codes)

    def coords(self) -> np.ndarray:
        return decode_codes(self.field.q, self.d, self.codes)

    def points(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self.coords()]

    @classmethod
    def from_vectors(cls, field: PrimeField, d: int, vectors) -> "PointSet":
        arr = np.asarray(list(vectors), dtype=np.int64)
        if arr.size == 0:
            return cls(field, d, np.empty(0, dtype=np.int64))
        arr = arr % field.q
        if arr.shape[1] != d:
            raise ValueError(f"expected {d} coordinates per point, got {arr.shape[1]}")
        return cls(field, d, encode_vectors(field.q, arr))

    @classmethod
    def full(cls, field: PrimeField, d: int) -> "PointSet":
        if field.q**d > MAX_ENUMERATION:
            raise SizeGuardError(f"q^d = {field.q**d} exceeds the enumeration limit")
        return cls(field, d, np.arange(field.q**d, dtype=np.int64))


def save_point_set(path, ps: PointSet, split: tuple[int, int] | None = None,
                   comment: str | None = None) -> None:
    """Write a point set as a header line plus one comma-separated point per line.

    Header: ``q=<q> dims=<d>`` with an optional ``split=<k>,<l>`` field.
    Lines starting with # are comments.
    """
    if split is not None and split[0] + split[1] != ps.d:
        raise ValueError(f"split {split} does not sum to dims {ps.d}")
    lines = []
    if comment:
        for row in comment.splitlines():
            lines.append(f"# {row}")
    header = f"q={ps.field.q} dims={ps.d}"
    if split is not None:
        header += f" split={split[0]},{split[1]}"
    lines.append(header)
    for row in ps.coords():
        lines.append(",".join(str(int(x)) for x in row))
    Path(path).write_text("\n".join(lines) + "\n")


def load_point_set(path) -> tuple[PointSet, tuple[int, int] | None]:
    """Read the format written by save_point_set; returns (set, split or None)."""
    raw = Path(path).read_text().splitlines()
    lines = [ln.strip() for ln in raw if ln.strip() and not ln.strip().startswith("#")]
    if not lines:
        raise ValueError(f"{path}: no header line found")
    fields = {}
    for token in lines[0].split():
        if "=" not in token:
            raise ValueError(f"{path}: malformed header token {token!r}")
        key, _, val = token.partition("=")
        fields[key] = val
    if "q" not in fields or "dims" not in fields:
        raise ValueError(f"{path}: header must declare q= and dims=")
    q = int(fields["q"])
    d = int(fields["dims"])
    split = None
    if "split" in fields:
        k_str, _, l_str = fields["split"].partition(",")
        split = (int(k_str), int(l_str))
        if split[0] + split[1] != d:
            raise ValueError(f"{path}: split {split} does not sum to dims {d}")
    field = make_field(q)
    vectors = []
    for ln in lines[1:]:
        parts = [int(tok) for tok in ln.split(",")]
        if len(parts) != d:
            raise ValueError(f"{path}: point {ln!r} does not have {d} coordinates")
        vectors.append(parts)
    ps = PointSet.from_vectors(field, d, vectors) if vectors else PointSet(field, d, [])
    return ps, split
