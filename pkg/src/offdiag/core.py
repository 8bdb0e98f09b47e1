"""Index geometries, matrix storage, and the side-diagonal machinery.

Two finite models of the index set Z^d are supported:

* ``torus``: indices {-(N-1)/2, ..., (N-1)/2}^d with period N per axis
  (N odd so the centered difference representative is unique).  The matrix
  algebra over a torus is closed under products and inverses, so algebraic
  identities hold exactly.
* ``window``: indices {-n, ..., n}^d, a truncated section of Z^d.
  Differences k-l range over {-2n, ..., 2n}^d and identities hold only
  approximately near the boundary.

Matrices are stored dense (complex128) with rows/columns ordered by the
lexicographic order of the index tuples.  All operations are pure functions
of immutable inputs; entry arrays are marked read-only at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Literal

import numpy as np

from .errors import (
    BandRangeError,
    DiffRangeError,
    GeometryMismatchError,
    SingularMatrixError,
)

BandMetric = Literal["one", "inf"]

#: Condition-estimate ceiling above which ``invert`` refuses to return a result.
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class IndexGeometry:
    """A d-dimensional torus or truncated window of Z^d.

    ``size`` is the period N per axis for a torus (odd, >= 3) and the window
    radius n for a window (>= 1).
    """

    kind: Literal["torus", "window"]
    d: int
    size: int

    def __post_init__(self):
        if self.kind not in ("torus", "window"):
            raise ValueError(f"unknown geometry kind {self.kind!r}")
        if self.d < 1:
            raise ValueError(f"dimension must be >= 1, got {self.d}")
        if self.kind == "torus":
            if self.size < 3 or self.size % 2 == 0:
                raise ValueError(f"torus period must be odd and >= 3, got {self.size}")
        elif self.size < 1:
            raise ValueError(f"window radius must be >= 1, got {self.size}")

    @classmethod
    def torus(cls, period: int, d: int = 1) -> "IndexGeometry":
        return cls("torus", d, period)

    @classmethod
    def window(cls, radius: int, d: int = 1) -> "IndexGeometry":
        return cls("window", d, radius)

    @property
    def half(self) -> int:
        """Largest index coordinate: (N-1)/2 on a torus, n on a window."""
        return (self.size - 1) // 2 if self.kind == "torus" else self.size

    @property
    def side(self) -> int:
        """Number of index values per axis."""
        return 2 * self.half + 1

    @property
    def points(self) -> int:
        """Total number of indices (matrix dimension)."""
        return self.side**self.d

    @property
    def diff_radius(self) -> int:
        """Largest |m_j| over representable differences m = k - l."""
        return self.half if self.kind == "torus" else 2 * self.size

    def band_range(self, metric: BandMetric = "inf") -> int:
        """Largest |m| over representable differences in the given metric."""
        return self.diff_radius if metric == "inf" else self.d * self.diff_radius

    def reduce_diff(self, m: Iterable[int]) -> tuple[int, ...]:
        """Centered representative of a difference (identity on a window)."""
        m = tuple(int(x) for x in m)
        if len(m) != self.d:
            raise DiffRangeError(f"difference {m} has wrong dimension for d={self.d}")
        if self.kind == "torus":
            n = self.size
            return tuple((x + self.half) % n - self.half for x in m)
        return m

    def contains_diff(self, m: Iterable[int]) -> bool:
        m = tuple(int(x) for x in m)
        return len(m) == self.d and all(abs(x) <= self.diff_radius for x in m)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "d": self.d, "size": self.size}

    @classmethod
    def from_dict(cls, data: dict) -> "IndexGeometry":
        return cls(kind=data["kind"], d=int(data["d"]), size=int(data["size"]))


@lru_cache(maxsize=None)
def index_coords(geom: IndexGeometry) -> np.ndarray:
    """(points, d) integer array of index tuples in lexicographic order."""
    axes = [np.arange(-geom.half, geom.half + 1)] * geom.d
    grid = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grid], axis=-1)


@lru_cache(maxsize=None)
def raw_diff_axes(geom: IndexGeometry) -> np.ndarray:
    """(d, points, points) array of unreduced differences k_j - l_j.

    Differences of the centered index representatives; this is what the
    commutator derivation and the modulation group act through (they are a
    genuine commutator and a genuine conjugation only for raw differences).
    """
    coords = index_coords(geom)
    raw = coords.T[:, :, None] - coords.T[:, None, :]
    raw.setflags(write=False)
    return raw


@lru_cache(maxsize=None)
def diff_axes(geom: IndexGeometry) -> np.ndarray:
    """(d, points, points) array of per-axis differences k_j - l_j.

    On a torus the differences are reduced to the centered representative;
    all norm weights and side-diagonal groupings use these.
    """
    raw = raw_diff_axes(geom)
    if geom.kind == "torus":
        n = geom.size
        raw = (raw + geom.half) % n - geom.half
        raw.setflags(write=False)
    return raw


@lru_cache(maxsize=None)
def diff_abs1(geom: IndexGeometry) -> np.ndarray:
    """(points, points) array of 1-norms |k - l| (torus-reduced)."""
    out = np.abs(diff_axes(geom)).sum(axis=0)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def diff_absinf(geom: IndexGeometry) -> np.ndarray:
    """(points, points) array of sup-norms |k - l|_inf (torus-reduced)."""
    out = np.abs(diff_axes(geom)).max(axis=0)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def diff_tuples(geom: IndexGeometry) -> np.ndarray:
    """(n_diffs, d) integer array of all representable differences."""
    r = geom.diff_radius
    axes = [np.arange(-r, r + 1)] * geom.d
    grid = np.meshgrid(*axes, indexing="ij")
    out = np.stack([g.ravel() for g in grid], axis=-1)
    out.setflags(write=False)
    return out


def diff_id(geom: IndexGeometry, m: Iterable[int]) -> int:
    """Position of difference m in the ``diff_tuples`` ordering."""
    r = geom.diff_radius
    width = 2 * r + 1
    out = 0
    m = tuple(int(x) for x in m)
    if len(m) != geom.d or any(abs(x) > r for x in m):
        raise DiffRangeError(f"difference {m} out of range for {geom}")
    for x in m:
        out = out * width + (x + r)
    return out


@lru_cache(maxsize=None)
def diff_ids_grid(geom: IndexGeometry) -> np.ndarray:
    """(points, points) array mapping entry (k,l) to the id of k - l."""
    r = geom.diff_radius
    width = 2 * r + 1
    axes = diff_axes(geom)
    ids = np.zeros(axes.shape[1:], dtype=np.int64)
    for j in range(geom.d):
        ids = ids * width + (axes[j] + r)
    ids.setflags(write=False)
    return ids


@lru_cache(maxsize=None)
def _diag_groups(geom: IndexGeometry) -> tuple[np.ndarray, np.ndarray]:
    """Permutation and group starts for grouping entries by difference id.

    Every representable difference occurs at least once on both geometries,
    so the groups are all nonempty and ``starts`` has one entry per diff id.
    """
    ids = diff_ids_grid(geom).ravel()
    perm = np.argsort(ids, kind="stable")
    n_diffs = len(diff_tuples(geom))
    starts = np.searchsorted(ids[perm], np.arange(n_diffs))
    perm.setflags(write=False)
    starts.setflags(write=False)
    return perm, starts


def per_diagonal_max(geom: IndexGeometry, values: np.ndarray) -> np.ndarray:
    """Per-difference maxima of a (points, points) real array.

    Returns a (n_diffs,) array aligned with ``diff_tuples(geom)``.
    """
    perm, starts = _diag_groups(geom)
    return np.maximum.reduceat(values.ravel()[perm], starts)


@dataclass(frozen=True, eq=False)
class DecayMatrix:
    """Complex matrix over an :class:`IndexGeometry`.

    Entries are stored as an immutable (points, points) complex128 array;
    NaN/Inf entries are rejected at construction.
    """

    geometry: IndexGeometry
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True, order="C")
        m = self.geometry.points
        if arr.shape != (m, m):
            raise ValueError(f"entries must have shape ({m}, {m}), got {arr.shape}")
        if not np.all(np.isfinite(arr.view(np.float64))):
            raise ValueError("matrix entries must be finite (no NaN/Inf)")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def same_geometry(self, other: "DecayMatrix") -> None:
        if self.geometry != other.geometry:
            raise GeometryMismatchError(
                f"geometry mismatch: {self.geometry} vs {other.geometry}"
            )

    def __add__(self, other: "DecayMatrix") -> "DecayMatrix":
        self.same_geometry(other)
        return DecayMatrix(self.geometry, self.entries + other.entries)

    def __sub__(self, other: "DecayMatrix") -> "DecayMatrix":
        self.same_geometry(other)
        return DecayMatrix(self.geometry, self.entries - other.entries)

    def __mul__(self, scalar: complex) -> "DecayMatrix":
        return DecayMatrix(self.geometry, self.entries * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "DecayMatrix":
        return DecayMatrix(self.geometry, -self.entries)


def identity(geom: IndexGeometry) -> DecayMatrix:
    """Unit element of the matrix algebra over ``geom``."""
    return DecayMatrix(geom, np.eye(geom.points, dtype=np.complex128))


def zeros(geom: IndexGeometry) -> DecayMatrix:
    return DecayMatrix(geom, np.zeros((geom.points, geom.points), np.complex128))


def side_diagonal(a: DecayMatrix, m: Iterable[int] | int) -> DecayMatrix:
    """The m-th side diagonal: entries with k - l = m, zero elsewhere.

    Summing side diagonals over all representable m reconstructs the matrix
    exactly.
    """
    geom = a.geometry
    if isinstance(m, int):
        m = (m,)
    mask = diff_ids_grid(geom) == diff_id(geom, m)
    return DecayMatrix(geom, np.where(mask, a.entries, 0.0))


def diagonal_support(a: DecayMatrix, threshold: float = 0.0) -> set[tuple[int, ...]]:
    """Differences m whose side diagonal has max entry modulus > threshold."""
    if threshold < 0:
        raise ValueError("threshold must be nonnegative")
    sups = per_diagonal_max(a.geometry, np.abs(a.entries))
    tuples = diff_tuples(a.geometry)
    return {tuple(int(x) for x in tuples[i]) for i in np.nonzero(sups > threshold)[0]}


def band_truncate(a: DecayMatrix, n: int, metric: BandMetric = "inf") -> DecayMatrix:
    """Keep entries with |k - l| <= n in the chosen metric, zero the rest."""
    if n < 0:
        raise ValueError("bandwidth must be nonnegative")
    grid = diff_abs1(a.geometry) if metric == "one" else diff_absinf(a.geometry)
    return DecayMatrix(a.geometry, np.where(grid <= n, a.entries, 0.0))


def bandwidth(a: DecayMatrix, metric: BandMetric = "inf") -> int:
    """Largest |m| over occupied side diagonals (0 for the zero matrix)."""
    support = diagonal_support(a, 0.0)
    if not support:
        return 0
    norm = (lambda m: sum(abs(x) for x in m)) if metric == "one" else (
        lambda m: max(abs(x) for x in m)
    )
    return max(norm(m) for m in support)


def multiply(a: DecayMatrix, b: DecayMatrix) -> DecayMatrix:
    """Matrix product; requires matching geometries."""
    a.same_geometry(b)
    return DecayMatrix(a.geometry, a.entries @ b.entries)


def adjoint(a: DecayMatrix) -> DecayMatrix:
    """Conjugate transpose (the involution of the algebra)."""
    return DecayMatrix(a.geometry, a.entries.conj().T)


def invert(a: DecayMatrix) -> DecayMatrix:
    """Dense inverse of the finite matrix.

    On a torus this is the inverse inside the finite algebra.  On a window it
    is the inverse of the truncated section, which approximates the infinite
    inverse only away from the boundary.

    Raises :class:`SingularMatrixError` if the matrix is singular or the
    1-norm condition estimate exceeds ``CONDITION_LIMIT``.
    """
    m = a.geometry.points
    try:
        inv = np.linalg.solve(a.entries, np.eye(m, dtype=np.complex128))
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"matrix is singular: {exc}") from exc
    one_norm = np.abs(a.entries).sum(axis=0).max()
    cond = one_norm * np.abs(inv).sum(axis=0).max()
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(
            f"condition estimate {cond:.3e} exceeds {CONDITION_LIMIT:.0e}",
            condition=float(cond),
        )
    return DecayMatrix(a.geometry, inv)


def restrict_to_window(a: DecayMatrix, radius: int) -> DecayMatrix:
    """Submatrix on the inner window {-radius..radius}^d of a window geometry.

    Used to suppress truncation boundary effects before fitting decay
    exponents of inverses.  Not defined for torus geometries (which have no
    boundary).
    """
    geom = a.geometry
    if geom.kind != "window":
        raise ValueError("inner-window restriction applies to window geometries only")
    if radius > geom.half or radius < 1:
        raise BandRangeError(f"inner radius {radius} not in [1, {geom.half}]")
    inner = IndexGeometry.window(radius, geom.d)
    coords = index_coords(geom)
    keep = np.nonzero(np.all(np.abs(coords) <= radius, axis=1))[0]
    sub = a.entries[np.ix_(keep, keep)]
    return DecayMatrix(inner, sub)
