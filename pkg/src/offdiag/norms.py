"""Matrix algebra norms and side-diagonal profiles.

The four norm families measure off-diagonal decay in different ways:

* ``operator_norm`` -- largest singular value (the l2 -> l2 norm),
* ``jaffard_norm``  -- sup of |A(k,l)| (1+|k-l|)^r  (sup-type polynomial decay),
* ``schur_norm``    -- weighted row/column-sum norm,
* ``convdom_norm``  -- weighted l1 norm of the per-diagonal suprema.

|k-l| is always the 1-norm of the difference, torus-reduced per axis.
Weighted variants substitute an arbitrary even submultiplicative weight for
the polynomial one; the identities C_r = (C_0)_{v_r}, S_r = (S_0)_{v_r} and
J_{s+r} = (J_s)_{v_r} then hold by construction.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .core import (
    DecayMatrix,
    IndexGeometry,
    diff_abs1,
    diff_axes,
    diff_id,
    diff_ids_grid,
    diff_tuples,
    per_diagonal_max,
    side_diagonal,
)
from .errors import ConvergenceError, WeightError

#: Iteration cap and Rayleigh-quotient tolerance for the power iteration.
POWER_ITERATION_CAP = 100_000
POWER_ITERATION_TOL = 1e-12


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Weight:
    """Even, normalized, submultiplicative weight v on difference indices.

    Construct through :meth:`polynomial`, :meth:`anisotropic`, or
    :meth:`table`.  Polynomial and anisotropic weights are submultiplicative
    by construction; a table weight is checked on all difference pairs of its
    geometry at construction time and rejected otherwise.
    """

    kind: Literal["polynomial", "anisotropic", "table"]
    r: float = 0.0
    alpha: tuple[int, ...] = ()
    table: tuple[tuple[tuple[int, ...], float], ...] = field(default=(), repr=False)
    table_geometry: IndexGeometry | None = None

    @classmethod
    def polynomial(cls, r: float) -> "Weight":
        if r < 0:
            raise WeightError(f"polynomial weight needs r >= 0, got {r}")
        return cls("polynomial", r=float(r))

    @classmethod
    def anisotropic(cls, r: float, alpha: tuple[int, ...]) -> "Weight":
        alpha = tuple(int(a) for a in alpha)
        if r < 0 or any(a < 0 for a in alpha):
            raise WeightError("anisotropic weight needs r >= 0 and alpha_j >= 0")
        return cls("anisotropic", r=float(r), alpha=alpha)

    @classmethod
    def table(cls, geom: IndexGeometry, values: Mapping[tuple[int, ...], float]) -> "Weight":
        w = cls(
            "table",
            table=tuple(sorted((tuple(m), float(v)) for m, v in values.items())),
            table_geometry=geom,
        )
        w._check_table(geom)
        return w

    def _table_array(self, geom: IndexGeometry) -> np.ndarray:
        lookup = dict(self.table)
        tuples = diff_tuples(geom)
        out = np.empty(len(tuples))
        for i, m in enumerate(tuples):
            key = tuple(int(x) for x in m)
            if key not in lookup:
                raise WeightError(f"table weight missing difference {key}")
            out[i] = lookup[key]
        return out

    def _check_table(self, geom: IndexGeometry) -> None:
        vals = self._table_array(geom)
        if np.any(vals <= 0):
            raise WeightError("table weight must be positive")
        tuples = diff_tuples(geom)
        zero = diff_id(geom, (0,) * geom.d)
        if abs(vals[zero] - 1.0) > 1e-12:
            raise WeightError("table weight must satisfy v(0) = 1")
        flipped = np.array([vals[diff_id(geom, tuple(-x for x in m))] for m in tuples])
        if np.max(np.abs(vals - flipped)) > 1e-12:
            raise WeightError("table weight must be even: v(-m) = v(m)")
        # Submultiplicativity on all pairs whose sum is representable.
        n = len(tuples)
        for i in range(n):
            s = tuples[i] + tuples
            if geom.kind == "torus":
                s = (s + geom.half) % geom.size - geom.half
                ok = np.ones(n, dtype=bool)
            else:
                ok = np.all(np.abs(s) <= geom.diff_radius, axis=1)
            ids = np.zeros(n, dtype=np.int64)
            width = 2 * geom.diff_radius + 1
            for j in range(geom.d):
                ids = ids * width + (s[:, j] + geom.diff_radius) * ok
            bad = vals[ids[ok]] > vals[i] * vals[ok] * (1 + 1e-12)
            if np.any(bad):
                raise WeightError("table weight is not submultiplicative")

    def values_on(self, geom: IndexGeometry) -> np.ndarray:
        """v(m) for every difference of ``geom`` (aligned with diff_tuples)."""
        tuples = diff_tuples(geom)
        if self.kind == "polynomial":
            return (1.0 + np.abs(tuples).sum(axis=1)) ** self.r
        if self.kind == "anisotropic":
            out = (1.0 + np.abs(tuples).sum(axis=1)) ** self.r
            for j, a in enumerate(self.alpha):
                out *= (1.0 + np.abs(tuples[:, j])) ** a
            return out
        if self.table_geometry is not None and self.table_geometry != geom:
            raise WeightError("table weight evaluated on a different geometry")
        return self._table_array(geom)

    def grid(self, geom: IndexGeometry) -> np.ndarray:
        """v(k - l) as a (points, points) array."""
        if self.kind == "polynomial":
            return (1.0 + diff_abs1(geom)) ** self.r
        if self.kind == "anisotropic":
            out = (1.0 + diff_abs1(geom)) ** self.r
            axes = diff_axes(geom)
            for j, a in enumerate(self.alpha):
                out *= (1.0 + np.abs(axes[j])) ** a
            return out
        return self.values_on(geom)[diff_ids_grid(geom)]

    def __call__(self, geom: IndexGeometry, m: tuple[int, ...]) -> float:
        return float(self.values_on(geom)[diff_id(geom, geom.reduce_diff(m))])


# ---------------------------------------------------------------------------
# Norm tags
# ---------------------------------------------------------------------------


class NormTag:
    """Base class for norm selectors; see the concrete tags below."""

    def format(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class OperatorL2(NormTag):
    def format(self) -> str:
        return "opl2"


@dataclass(frozen=True)
class Jaffard(NormTag):
    r: float

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError(f"Jaffard norm needs r > 0, got {self.r}")

    def format(self) -> str:
        return f"jaffard:{self.r:g}"


@dataclass(frozen=True)
class Schur(NormTag):
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"Schur norm needs r >= 0, got {self.r}")

    def format(self) -> str:
        return f"schur:{self.r:g}"


@dataclass(frozen=True)
class ConvDom(NormTag):
    r: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"convolution-dominated norm needs r >= 0, got {self.r}")

    def format(self) -> str:
        return f"cd:{self.r:g}"


@dataclass(frozen=True)
class Weighted(NormTag):
    base: NormTag
    weight: Weight

    def __post_init__(self):
        depth, tag = 1, self.base
        while isinstance(tag, Weighted):
            depth += 1
            tag = tag.base
        if depth > 2:
            raise ValueError("Weighted norm tags nest at most twice")

    def format(self) -> str:
        if self.weight.kind != "polynomial":
            raise ValueError("only polynomial weights have a tag string form")
        return f"weighted:{self.base.format()}:poly:{self.weight.r:g}"


def is_solid(tag: NormTag) -> bool:
    """Whether the tag's norm depends only on entry moduli (monotonically)."""
    if isinstance(tag, (Jaffard, Schur, ConvDom)):
        return True
    if isinstance(tag, Weighted):
        return is_solid(tag.base)
    return False


# ---------------------------------------------------------------------------
# Norms
# ---------------------------------------------------------------------------


def operator_norm(a: DecayMatrix) -> float:
    """Largest singular value via deterministic power iteration on A*A.

    The starting vector is pseudo-random from a fixed seed, iteration stops
    when the Rayleigh quotient changes by a relative factor below 1e-12, and
    a cap of 1e5 iterations raises :class:`ConvergenceError`.
    """
    entries = a.entries
    m = entries.shape[0]
    if not np.any(entries):
        return 0.0
    rng = np.random.default_rng(0x0FFD1A6)
    v = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    v /= np.linalg.norm(v)
    adj = entries.conj().T
    lam_prev = -1.0
    for _ in range(POWER_ITERATION_CAP):
        w = entries @ v
        lam = float(np.real(np.vdot(w, w)))  # v unit, so this is v* (A*A) v
        u = adj @ w
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return float(np.sqrt(lam))
        v = u / nu
        if abs(lam - lam_prev) <= POWER_ITERATION_TOL * max(lam, 1e-300):
            return float(np.sqrt(lam))
        lam_prev = lam
    raise ConvergenceError(
        f"power iteration did not converge within {POWER_ITERATION_CAP} iterations"
    )


def jaffard_norm(a: DecayMatrix, r: float) -> float:
    """sup over (k,l) of |A(k,l)| (1+|k-l|)^r, |.| the 1-norm on differences.

    The algebra property needs r > d; smaller r is allowed for exploratory
    sweeps and triggers a warning.
    """
    if r <= 0:
        raise ValueError(f"Jaffard norm needs r > 0, got {r}")
    if r <= a.geometry.d:
        warnings.warn(
            f"Jaffard norm with r={r} <= d={a.geometry.d}: the norm is "
            "well-defined but the algebra property fails",
            stacklevel=2,
        )
    weighted = np.abs(a.entries) * (1.0 + diff_abs1(a.geometry)) ** r
    return float(weighted.max())


def schur_norm(a: DecayMatrix, r: float) -> float:
    """max of the weighted row-sum and column-sum norms."""
    if r < 0:
        raise ValueError(f"Schur norm needs r >= 0, got {r}")
    weighted = np.abs(a.entries) * (1.0 + diff_abs1(a.geometry)) ** r
    return float(max(weighted.sum(axis=1).max(), weighted.sum(axis=0).max()))


def convdom_norm(a: DecayMatrix, r: float) -> float:
    """Weighted l1 norm of the per-diagonal suprema (sum over diagonals)."""
    if r < 0:
        raise ValueError(f"convolution-dominated norm needs r >= 0, got {r}")
    geom = a.geometry
    sups = per_diagonal_max(geom, np.abs(a.entries))
    w = (1.0 + np.abs(diff_tuples(geom)).sum(axis=1)) ** r
    return float(np.sum(sups * w))


def weighted_norm(a: DecayMatrix, tag: Weighted) -> float:
    """Base norm of the entrywise-reweighted matrix A(k,l) v(k-l)."""
    if not isinstance(tag, Weighted):
        raise TypeError("weighted_norm expects a Weighted tag")
    tilde = DecayMatrix(a.geometry, a.entries * tag.weight.grid(a.geometry))
    return matrix_norm(tilde, tag.base)


def matrix_norm(a: DecayMatrix, tag: NormTag) -> float:
    """Evaluate the norm selected by ``tag``."""
    if isinstance(tag, OperatorL2):
        return operator_norm(a)
    if isinstance(tag, Jaffard):
        return jaffard_norm(a, tag.r)
    if isinstance(tag, Schur):
        return schur_norm(a, tag.r)
    if isinstance(tag, ConvDom):
        return convdom_norm(a, tag.r)
    if isinstance(tag, Weighted):
        return weighted_norm(a, tag)
    raise TypeError(f"unknown norm tag {tag!r}")


# ---------------------------------------------------------------------------
# Side-diagonal profiles
# ---------------------------------------------------------------------------

PerDiagonal = Literal["max", "opl2"]


@dataclass(frozen=True)
class SideDiagonalProfile:
    """Map from difference index m to a chosen norm of the m-th side diagonal.

    ``values`` is aligned with ``diff_tuples(geometry)``.  With the "max"
    per-diagonal norm, the Jaffard norm is the weighted sup of the profile
    and the convolution-dominated norm is its weighted sum, exactly.
    """

    geometry: IndexGeometry
    per_diag: PerDiagonal
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def value(self, m: tuple[int, ...]) -> float:
        return float(self.values[diff_id(self.geometry, m)])

    def items(self):
        for m, v in zip(diff_tuples(self.geometry), self.values):
            yield tuple(int(x) for x in m), float(v)

    def abs1(self) -> np.ndarray:
        """1-norms |m| aligned with ``values``."""
        return np.abs(diff_tuples(self.geometry)).sum(axis=1)

    def shell_collapse(self) -> tuple[np.ndarray, np.ndarray]:
        """(s, max over |m|=s of profile) for s = 0 .. max |m|."""
        abs1 = self.abs1()
        smax = int(abs1.max())
        out = np.zeros(smax + 1)
        np.maximum.at(out, abs1, self.values)
        return np.arange(smax + 1), out

    def axis_collapse(self, axis: int) -> tuple[np.ndarray, np.ndarray]:
        """(s, max over |m_axis|=s of profile) for s = 0 .. diff radius."""
        coords = np.abs(diff_tuples(self.geometry)[:, axis])
        smax = int(coords.max())
        out = np.zeros(smax + 1)
        np.maximum.at(out, coords, self.values)
        return np.arange(smax + 1), out


def diagonal_profile(a: DecayMatrix, per_diag: PerDiagonal = "max") -> SideDiagonalProfile:
    """Per-diagonal norm profile of a matrix.

    ``per_diag="max"`` records entry suprema; ``per_diag="opl2"`` records the
    l2 operator norm of each side diagonal (equal to the supremum, since a
    side diagonal is a shifted multiplication operator, but computed
    independently through the power iteration).
    """
    geom = a.geometry
    if per_diag == "max":
        values = per_diagonal_max(geom, np.abs(a.entries))
    elif per_diag == "opl2":
        values = np.array(
            [operator_norm(side_diagonal(a, tuple(int(x) for x in m)))
             for m in diff_tuples(geom)]
        )
    else:
        raise ValueError(f"unknown per-diagonal norm {per_diag!r}")
    return SideDiagonalProfile(geom, per_diag, values)
