"""Approximation by banded matrices and the associated space norms.

For a solid norm the best banded approximation of width N is the plain band
truncation, so the approximation error E_N is computed exactly.  Under the
operator norm, truncation only gives an upper bound for E_N; profiles carry
a flag distinguishing the two cases.

The module also provides Fejér and de la Vallée Poussin means (coefficient
tapers of the side-diagonal expansion), the dyadic-shell Littlewood-Paley
block norm, and Jackson ladders pairing banded-approximation errors with
moduli of smoothness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import (
    BandMetric,
    DecayMatrix,
    band_truncate,
    diff_abs1,
    diff_axes,
    side_diagonal,
)
from .errors import BandRangeError
from .norms import NormTag, is_solid, matrix_norm
from .smoothness import TGrid, modulus_of_smoothness

MinimizerFlag = Literal["exact_minimizer", "truncation_proxy"]


@dataclass(frozen=True)
class ApproxProfile:
    """Banded-approximation errors E_N for N = 0 .. band range.

    E_N is nonincreasing in N and reaches 0 at the geometry's band range.
    ``flag`` records whether truncation realizes the exact infimum.
    """

    tag: str
    flag: MinimizerFlag
    entries: tuple[tuple[int, float], ...]

    def bandwidths(self) -> np.ndarray:
        return np.array([n for n, _ in self.entries])

    def errors(self) -> np.ndarray:
        return np.array([e for _, e in self.entries])


@dataclass(frozen=True)
class JacksonLadder:
    """Rows (n, |A - vdp_mean(A, n)|, omega_{1/n}(A)) over a dyadic ladder."""

    tag: str
    rows: tuple[tuple[int, float, float], ...]


def minimizer_flag(tag: NormTag) -> MinimizerFlag:
    return "exact_minimizer" if is_solid(tag) else "truncation_proxy"


def approx_error(a: DecayMatrix, n: int, tag: NormTag,
                 metric: BandMetric = "inf") -> float:
    """Distance of A to the matrices of bandwidth <= n, in the tag's norm.

    Exact for solid tags (band truncation is a best approximation); an upper
    bound under the operator norm.
    """
    if n < 0:
        raise ValueError("bandwidth must be nonnegative")
    return matrix_norm(a - band_truncate(a, n, metric), tag)


def approx_profile(a: DecayMatrix, tag: NormTag, metric: BandMetric = "inf",
                   max_band: int | None = None) -> ApproxProfile:
    """E_N for N = 0 .. max_band (default: the geometry's band range)."""
    limit = a.geometry.band_range(metric)
    if max_band is None:
        max_band = limit
    max_band = min(max_band, limit)
    rows = tuple(
        (n, approx_error(a, n, tag, metric)) for n in range(max_band + 1)
    )
    return ApproxProfile(tag.format(), minimizer_flag(tag), rows)


def approx_space_norm(a: DecayMatrix, r: float, p: float, tag: NormTag,
                      metric: BandMetric = "inf") -> float:
    """Approximation-space norm over the discrete ladder N = 0 .. band range.

    For finite p >= 1 this is (sum E_N^p (N+1)^(rp-1))^(1/p); for p = inf it
    is max over N of (N+1)^r E_N.
    """
    if r <= 0:
        raise ValueError(f"approximation order must be positive, got {r}")
    if p != math.inf and p < 1:
        raise ValueError(f"p must be >= 1 or inf, got {p}")
    n_max = a.geometry.band_range(metric)
    ns = np.arange(n_max + 1)
    errors = np.array([approx_error(a, int(n), tag, metric) for n in ns])
    if p == math.inf:
        return float(np.max((ns + 1.0) ** r * errors))
    return float(np.sum(errors**p * (ns + 1.0) ** (r * p - 1)) ** (1.0 / p))


def fejer_mean(a: DecayMatrix, n: int) -> DecayMatrix:
    """C1 (Fejér) mean: side diagonal m scaled by prod_j (1 - |m_j|/(n+1))+."""
    if n < 0:
        raise ValueError("Fejér order must be nonnegative")
    geom = a.geometry
    taper = np.ones(a.entries.shape)
    axes = diff_axes(geom)
    for j in range(geom.d):
        taper *= np.clip(1.0 - np.abs(axes[j]) / (n + 1.0), 0.0, None)
    return DecayMatrix(geom, taper * a.entries)


def _vdp_axis_taper(absdiff: np.ndarray, n: int) -> np.ndarray:
    """1 on |x| <= n+1, linear down to 0 at |x| = 2(n+1)."""
    return np.clip((2.0 * (n + 1) - absdiff) / (n + 1.0), 0.0, 1.0)


def vdp_mean(a: DecayMatrix, n: int) -> DecayMatrix:
    """De la Vallée Poussin mean: reproduces bandwidth <= n+1 exactly.

    Coefficients are 1 for |m_j| <= n+1 and decay linearly to 0 at
    |m_j| = 2(n+1) on each axis, so the output has bandwidth <= 2n+1.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    geom = a.geometry
    if 2 * n + 1 > geom.band_range("inf"):
        raise BandRangeError(
            f"vdp_mean output bandwidth {2 * n + 1} exceeds band range "
            f"{geom.band_range('inf')}"
        )
    taper = np.ones(a.entries.shape)
    axes = diff_axes(geom)
    for j in range(geom.d):
        taper *= _vdp_axis_taper(np.abs(axes[j]), n)
    return DecayMatrix(geom, taper * a.entries)


def dyadic_shells(geom_band_range: int) -> list[tuple[int, int, int]]:
    """Shells (k, 2^k, min(2^(k+1), range+1)) covering 1 <= |m| <= range."""
    shells = []
    k = 0
    while 2**k <= geom_band_range:
        shells.append((k, 2**k, min(2 ** (k + 1), geom_band_range + 1)))
        k += 1
    return shells


def shell_part(a: DecayMatrix, lo: int, hi: int) -> DecayMatrix:
    """Sum of side diagonals with lo <= |m|_1 < hi."""
    abs1 = diff_abs1(a.geometry)
    mask = (abs1 >= lo) & (abs1 < hi)
    return DecayMatrix(a.geometry, np.where(mask, a.entries, 0.0))


def lp_block_norm(a: DecayMatrix, r: float, tag: NormTag) -> float:
    """Littlewood-Paley block norm over dyadic shells of the 1-norm |m|.

    max( |diagonal part|, max_k 2^(rk) |sum of side diagonals with
    2^k <= |m| < 2^(k+1)| ), all in the tag's norm.  Specializing the tag to
    the convolution-dominated norm of order 0 gives the dyadic decay
    condition preserved under inversion.
    """
    if r <= 0:
        raise ValueError(f"block norm order must be positive, got {r}")
    if not is_solid(tag):
        raise ValueError("lp_block_norm needs a solid norm tag")
    geom = a.geometry
    best = matrix_norm(side_diagonal(a, (0,) * geom.d), tag)
    for k, lo, hi in dyadic_shells(geom.band_range("one")):
        value = 2.0 ** (r * k) * matrix_norm(shell_part(a, lo, hi), tag)
        best = max(best, value)
    return best


def jackson_profile(a: DecayMatrix, tag: NormTag, grid: TGrid | None = None,
                    orders: list[int] | None = None) -> JacksonLadder:
    """Dyadic ladder pairing VdP approximation errors with moduli.

    For each n the row is (n, |A - vdp_mean(A, n)|_tag, omega_{1/n}(A))
    where the modulus is the first-order grid estimate.
    """
    if not is_solid(tag):
        raise ValueError("jackson_profile needs a solid norm tag")
    geom = a.geometry
    if orders is None:
        orders = []
        n = 1
        while 2 * n + 1 <= geom.band_range("inf"):
            orders.append(n)
            n *= 2
    if grid is None:
        grid = TGrid.for_matrix(a)
    rows = []
    for n in orders:
        err = matrix_norm(a - vdp_mean(a, n), tag)
        omega = modulus_of_smoothness(a, 1.0 / n, order=1, base=tag, grid=grid)
        rows.append((n, err, omega))
    return JacksonLadder(tag.format(), tuple(rows))
