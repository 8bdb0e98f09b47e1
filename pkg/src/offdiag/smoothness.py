"""Derivations, the modulation group, and Hölder-Zygmund machinery.

The commutator with the diagonal matrix X_j(k,k) = 2 pi i k_j acts entrywise:
delta_j(A)(k,l) = 2 pi i (k_j - l_j) A(k,l).  The associated automorphism
group is the modulation chi_t(A)(k,l) = exp(2 pi i (k-l).t) A(k,l), whose
finite differences measure smoothness.

k - l here is the plain difference of the centered index representatives
(not torus-reduced): only then is delta a genuine commutator and chi_t a
genuine conjugation, so the Leibniz/quotient/group identities hold exactly
on both geometries.  On a torus this means entries whose reduced difference
wraps carry a phase from the unreduced difference; on a window the two
notions coincide.

Because suprema over continuous t are unattainable, all Hölder-Zygmund
quantities here are maxima over a finite probe grid and therefore certified
lower bounds of the true value; the targeted probes t = m / (2 |m|_2^2)
make two-sided brackets derivable for the test families.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import DecayMatrix, diagonal_support, raw_diff_axes
from .errors import AliasingError, DiffRangeError, EmptyGridError
from .norms import NormTag, matrix_norm

#: Practical cap on |alpha| for derivation powers.
MULTIINDEX_CAP = 8

#: Uniform bound of the modulation group on solid tags and on OperatorL2
#: (entry moduli are unchanged; on l2 the action is unitary conjugation).
MODULATION_GROUP_BOUND = 1.0


def commutator_derivation(a: DecayMatrix, axis: int = 0) -> DecayMatrix:
    """delta_j(A)(k,l) = 2 pi i (k_j - l_j) A(k,l), axis j zero-based."""
    geom = a.geometry
    if not 0 <= axis < geom.d:
        raise ValueError(f"axis {axis} out of range for d={geom.d}")
    factor = 2j * np.pi * raw_diff_axes(geom)[axis]
    return DecayMatrix(geom, factor * a.entries)


def multi_indices(d: int, max_order: int) -> list[tuple[int, ...]]:
    """All multi-indices alpha with |alpha| <= max_order, lexicographic."""
    out = [
        alpha
        for alpha in itertools.product(range(max_order + 1), repeat=d)
        if sum(alpha) <= max_order
    ]
    return sorted(out)


def derivation_power(a: DecayMatrix, alpha: Sequence[int]) -> DecayMatrix:
    """delta^alpha(A): entrywise multiplication by prod_j (2 pi i m_j)^alpha_j.

    The per-axis multipliers commute, so the result is independent of the
    order in which axes are applied.
    """
    alpha = tuple(int(x) for x in alpha)
    geom = a.geometry
    if len(alpha) != geom.d or any(x < 0 for x in alpha):
        raise ValueError(f"multi-index {alpha} invalid for d={geom.d}")
    if sum(alpha) > MULTIINDEX_CAP:
        raise ValueError(f"|alpha| = {sum(alpha)} exceeds cap {MULTIINDEX_CAP}")
    factor = np.ones(a.entries.shape, dtype=np.complex128)
    axes = raw_diff_axes(geom)
    for j, power in enumerate(alpha):
        if power:
            factor *= (2j * np.pi * axes[j]) ** power
    return DecayMatrix(geom, factor * a.entries)


def derived_norm(a: DecayMatrix, order: int, base: NormTag) -> float:
    """sum over |alpha| <= order of base-norm(delta^alpha A) / alpha!."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    total = 0.0
    for alpha in multi_indices(a.geometry.d, order):
        fact = 1.0
        for x in alpha:
            fact *= math.factorial(x)
        total += matrix_norm(derivation_power(a, alpha), base) / fact
    return total


def modulate(a: DecayMatrix, t: Sequence[float] | float) -> DecayMatrix:
    """chi_t(A)(k,l) = exp(2 pi i (k-l).t) A(k,l)."""
    geom = a.geometry
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if t.shape != (geom.d,):
        raise ValueError(f"probe t must have {geom.d} components, got {t.shape}")
    phase = np.zeros(a.entries.shape)
    axes = raw_diff_axes(geom)
    for j in range(geom.d):
        phase = phase + axes[j] * t[j]
    return DecayMatrix(geom, np.exp(2j * np.pi * phase) * a.entries)


def finite_difference(a: DecayMatrix, t: Sequence[float] | float, order: int = 1) -> DecayMatrix:
    """Delta_t A = chi_t(A) - A; second order uses chi_2t - 2 chi_t + 1.

    On side diagonal m the entry factor is (exp(2 pi i m.t) - 1)^order.
    """
    if order == 1:
        return modulate(a, t) - a
    if order == 2:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return modulate(a, 2 * t) - 2.0 * modulate(a, t) + a
    raise ValueError(f"finite differences of order {order} are not supported")


# ---------------------------------------------------------------------------
# Probe grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TGrid:
    """Finite set of probe vectors t for estimating suprema over R^d.

    Contains dyadic per-axis probes 2^-j e_i for j = 0..dyadic_levels, one
    targeted probe t = m / (2 |m|_2^2) per difference in ``targeted_support``,
    and arbitrary extra probes.  Probes are iterated in a fixed sorted order
    so that max-reductions are deterministic.
    """

    d: int
    dyadic_levels: int = 12
    targeted_support: tuple[tuple[int, ...], ...] = ()
    extra: tuple[tuple[float, ...], ...] = ()

    @classmethod
    def for_matrix(cls, a: DecayMatrix, dyadic_levels: int = 12,
                   threshold: float = 0.0) -> "TGrid":
        """Grid with targeted probes for every occupied diagonal of ``a``."""
        support = sorted(m for m in diagonal_support(a, threshold) if any(m))
        return cls(a.geometry.d, dyadic_levels, tuple(support))

    def probes(self) -> list[np.ndarray]:
        pts: dict[tuple[float, ...], np.ndarray] = {}
        for m in self.targeted_support:
            m_arr = np.asarray(m, dtype=float)
            nsq = float(np.sum(m_arr**2))
            if nsq == 0.0:
                continue
            t = m_arr / (2.0 * nsq)
            pts[tuple(t)] = t
        for j in range(self.dyadic_levels + 1):
            for i in range(self.d):
                t = np.zeros(self.d)
                t[i] = 2.0**-j
                pts[tuple(t)] = t
        for t in self.extra:
            arr = np.asarray(t, dtype=float)
            if arr.shape != (self.d,) or not np.any(arr):
                raise ValueError(f"extra probe {t} invalid for d={self.d}")
            pts[tuple(arr)] = arr
        return sorted(pts.values(), key=lambda t: (np.abs(t).sum(), tuple(t)))

    def to_dict(self) -> dict:
        return {
            "dyadic_levels": self.dyadic_levels,
            "targeted_support": [list(m) for m in self.targeted_support],
            "extra": [list(t) for t in self.extra],
        }

    @classmethod
    def from_dict(cls, d: int, data: dict) -> "TGrid":
        return cls(
            d=d,
            dyadic_levels=int(data.get("dyadic_levels", 12)),
            targeted_support=tuple(
                tuple(int(x) for x in m) for m in data.get("targeted_support", [])
            ),
            extra=tuple(tuple(float(x) for x in t) for t in data.get("extra", [])),
        )


def modulus_of_smoothness(a: DecayMatrix, h: float, order: int, base: NormTag,
                          grid: TGrid) -> float:
    """Grid estimate of the k-th modulus: max over |t|_1 <= h of |Delta^k_t A|.

    A lower bound of the true supremum; monotone nondecreasing in h.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    admissible = [t for t in grid.probes() if np.abs(t).sum() <= h]
    if not admissible:
        raise EmptyGridError(f"no grid probes with |t|_1 <= {h}")
    best = 0.0
    for t in admissible:
        best = max(best, matrix_norm(finite_difference(a, t, order), base))
    return best


def hz_seminorm(a: DecayMatrix, eta: float, base: NormTag, grid: TGrid) -> float:
    """Grid estimate of sup over t != 0 of |t|^-eta |Delta^2_t A|_base."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    best = 0.0
    for t in grid.probes():
        abs_t = float(np.abs(t).sum())
        value = matrix_norm(finite_difference(a, t, order=2), base)
        best = max(best, value / abs_t**eta)
    return best


def hz_split(r: float) -> tuple[int, float]:
    """Zygmund decomposition r = k + eta with k in N_0 and eta in (0, 1]."""
    if r <= 0:
        raise ValueError(f"smoothness order must be positive, got {r}")
    k = math.ceil(r) - 1
    return k, r - k


@dataclass(frozen=True)
class HZParams:
    """Parameters of a Hölder-Zygmund norm evaluation."""

    r: float
    base: NormTag
    grid: TGrid

    @property
    def k(self) -> int:
        return hz_split(self.r)[0]

    @property
    def eta(self) -> float:
        return hz_split(self.r)[1]


def hz_norm(a: DecayMatrix, params: HZParams) -> float:
    """derived_norm of order k plus eta-seminorms of the k-th derivatives."""
    k, eta = hz_split(params.r)
    total = derived_norm(a, k, params.base)
    for alpha in multi_indices(a.geometry.d, k):
        if sum(alpha) == k:
            total += hz_seminorm(derivation_power(a, alpha), eta, params.base, params.grid)
    return total


def hz_probe_breakdown(a: DecayMatrix, params: HZParams) -> list[tuple[tuple[float, ...], float]]:
    """Per-probe seminorm terms max_{|alpha|=k} |t|^-eta |Delta^2_t d^a A|.

    The Hölder-Zygmund seminorm part of :func:`hz_norm` is the maximum of
    these values over the grid; the breakdown shows which probes carry it.
    """
    k, eta = hz_split(params.r)
    tops = [
        derivation_power(a, alpha)
        for alpha in multi_indices(a.geometry.d, k)
        if sum(alpha) == k
    ]
    rows = []
    for t in params.grid.probes():
        abs_t = float(np.abs(t).sum())
        best = max(
            matrix_norm(finite_difference(b, t, order=2), params.base) / abs_t**eta
            for b in tops
        )
        rows.append((tuple(float(x) for x in t), best))
    return rows


# ---------------------------------------------------------------------------
# Fourier coefficients and continuity defects
# ---------------------------------------------------------------------------


def fourier_coefficient(a: DecayMatrix, m: Iterable[int] | int, nodes: int) -> DecayMatrix:
    """m-th Fourier coefficient of t -> chi_t(A) by trapezoid quadrature.

    The integrand is a trigonometric polynomial in t, so the rule is exact
    (and the result equals the m-th side diagonal) once ``nodes`` per axis is
    at least 2 max_j |m_j| + 1 over the occupied diagonals; fewer nodes alias
    and raise :class:`AliasingError`.  On a torus the reduced diagonals are
    classes of unreduced differences mod N, so ``nodes`` must equal the
    period N (the quadrature then runs over the dual group).
    """
    geom = a.geometry
    if isinstance(m, int):
        m = (m,)
    m = tuple(int(x) for x in m)
    if not geom.contains_diff(m):
        raise DiffRangeError(f"difference {m} out of range for {geom}")
    if nodes < 2:
        raise ValueError("need at least 2 quadrature nodes per axis")
    if geom.kind == "torus":
        if nodes != geom.size:
            raise AliasingError(
                f"torus quadrature needs nodes == period ({geom.size}), got {nodes}"
            )
    else:
        support = diagonal_support(a, 0.0)
        occupied = max((max(abs(x) for x in s) for s in support), default=0)
        needed = 2 * max(occupied, max((abs(x) for x in m), default=0)) + 1
        if nodes < needed:
            raise AliasingError(
                f"{nodes} nodes per axis alias diagonals up to {occupied}; "
                f"need >= {needed}"
            )
    acc = np.zeros(a.entries.shape, dtype=np.complex128)
    m_arr = np.asarray(m, dtype=float)
    for jt in itertools.product(range(nodes), repeat=geom.d):
        t = np.asarray(jt, dtype=float) / nodes
        phase = np.exp(-2j * np.pi * float(m_arr @ t))
        acc += modulate(a, t).entries * phase
    return DecayMatrix(geom, acc / nodes**geom.d)


def continuity_defect(a: DecayMatrix, base: NormTag, grid: TGrid) -> float:
    """Small-|t| first-difference norm: a diagnostic for membership in C(A).

    Takes the max of |Delta_t A|_base over the smallest-|t| dyadic shell of
    the grid, augmented with one probe per axis aimed at the outermost
    occupied diagonal (t_i = e_i / (2 max|m_i|)), where the defect of the
    anti-diagonal family is attained exactly.
    """
    geom = a.geometry
    probes: list[np.ndarray] = []
    dyadic = [t for t in grid.probes() if np.count_nonzero(t) == 1]
    if dyadic:
        smallest = min(float(np.abs(t).sum()) for t in dyadic)
        probes.extend(t for t in dyadic if float(np.abs(t).sum()) == smallest)
    support = diagonal_support(a, 0.0)
    for axis in range(geom.d):
        extent = max((abs(m[axis]) for m in support), default=0)
        if extent > 0:
            t = np.zeros(geom.d)
            t[axis] = 1.0 / (2.0 * extent)
            probes.append(t)
    if not probes:
        raise EmptyGridError("no probes available for the continuity defect")
    probes.sort(key=lambda t: (np.abs(t).sum(), tuple(t)))
    return max(matrix_norm(finite_difference(a, t, 1), base) for t in probes)
