"""Derivations, modulation group, moduli, Hölder-Zygmund quantities."""

import math

import numpy as np
import pytest

import offdiag as od
from offdiag.core import diff_abs1
from offdiag.errors import AliasingError, EmptyGridError
from offdiag.norms import ConvDom, Jaffard
from offdiag.smoothness import (
    MODULATION_GROUP_BOUND,
    hz_probe_breakdown,
    hz_split,
    multi_indices,
)

TORUS17 = od.IndexGeometry.torus(17)


def random_matrix(geom, seed):
    rng = np.random.default_rng(seed)
    m = geom.points
    return od.DecayMatrix(
        geom, rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    )


def rel_residual(x: np.ndarray, y: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    return float(np.max(np.abs(x - y))) / scale


class TestDerivation:
    def test_identity_derivative_vanishes(self):
        d = od.commutator_derivation(od.identity(TORUS17))
        assert not np.any(d.entries)

    def test_single_side_diagonal_factor(self):
        g = od.IndexGeometry.window(4)
        a = od.side_diagonal(od.DecayMatrix(g, np.ones((9, 9))), 3)
        d = od.commutator_derivation(a)
        assert np.max(np.abs(d.entries - 2j * np.pi * 3 * a.entries)) < 1e-14

    def test_leibniz_rule(self):
        for seed in range(5):
            a, b = random_matrix(TORUS17, seed), random_matrix(TORUS17, 100 + seed)
            lhs = od.commutator_derivation(od.multiply(a, b))
            rhs = od.multiply(a, od.commutator_derivation(b)) + od.multiply(
                od.commutator_derivation(a), b
            )
            assert rel_residual(lhs.entries, rhs.entries) < 1e-10


class TestDerivationPower:
    def test_zero_multi_index(self):
        a = random_matrix(TORUS17, 0)
        assert np.array_equal(od.derivation_power(a, (0,)).entries, a.entries)

    def test_axis_order_commutes(self):
        g = od.IndexGeometry.torus(7, d=2)
        a = random_matrix(g, 1)
        ab = od.derivation_power(od.derivation_power(a, (1, 0)), (0, 1))
        ba = od.derivation_power(od.derivation_power(a, (0, 1)), (1, 0))
        assert rel_residual(ab.entries, ba.entries) < 1e-12

    def test_general_leibniz(self):
        g = od.IndexGeometry.torus(9, d=2)
        alpha = (2, 1)
        for seed in range(3):
            a, b = random_matrix(g, seed), random_matrix(g, 200 + seed)
            lhs = od.derivation_power(od.multiply(a, b), alpha)
            rhs = od.zeros(g)
            for beta in multi_indices(2, sum(alpha)):
                if any(bj > aj for bj, aj in zip(beta, alpha)):
                    continue
                coeff = math.comb(alpha[0], beta[0]) * math.comb(alpha[1], beta[1])
                gamma = tuple(aj - bj for aj, bj in zip(alpha, beta))
                rhs = rhs + coeff * od.multiply(
                    od.derivation_power(a, beta), od.derivation_power(b, gamma)
                )
            assert rel_residual(lhs.entries, rhs.entries) < 1e-9

    def test_cap(self):
        with pytest.raises(ValueError):
            od.derivation_power(od.identity(TORUS17), (9,))


class TestDerivedNorm:
    def test_order_zero_is_base(self):
        a = random_matrix(TORUS17, 2)
        assert od.derived_norm(a, 0, ConvDom(0.0)) == od.convdom_norm(a, 0.0)

    def test_zero_matrix(self):
        assert od.derived_norm(od.zeros(TORUS17), 2, ConvDom(0.0)) == 0.0

    def test_equivalent_to_weighted_norm_with_stated_constants(self):
        # Two-sided bound with the quotient-rule constants:
        #   |A|_{v_1} <= |A| + |dA| <= (1 + 2 pi) |A|_{v_1}
        # (raw = reduced differences on a window, so the derivation factor
        # matches the weight exactly).
        g = od.IndexGeometry.window(6)
        for seed in range(5):
            a = random_matrix(g, seed)
            v1 = od.convdom_norm(a, 1.0)
            derived = od.derived_norm(a, 1, ConvDom(0.0))
            assert v1 <= derived * (1 + 1e-12)
            assert derived <= (1.0 + 2.0 * np.pi) * v1 * (1 + 1e-12)


class TestModulate:
    def test_zero_probe(self):
        a = random_matrix(TORUS17, 3)
        assert np.array_equal(od.modulate(a, 0.0).entries, a.entries)

    def test_diagonal_fixed(self):
        g = od.IndexGeometry.torus(9)
        d = od.DecayMatrix(g, np.diag(np.arange(1.0, 10.0)))
        assert np.array_equal(od.modulate(d, 0.37).entries, d.entries)

    def test_group_law(self):
        a = random_matrix(TORUS17, 4)
        s, t = np.array([0.21]), np.array([0.34])
        lhs = od.modulate(od.modulate(a, s), t)
        rhs = od.modulate(a, s + t)
        assert rel_residual(lhs.entries, rhs.entries) < 1e-12

    def test_norm_invariance(self):
        a = random_matrix(TORUS17, 5)
        t = [0.3]
        m = od.modulate(a, t)
        assert od.jaffard_norm(m, 1.5) == pytest.approx(od.jaffard_norm(a, 1.5), rel=1e-12)
        assert od.schur_norm(m, 1.0) == pytest.approx(od.schur_norm(a, 1.0), rel=1e-12)
        assert od.convdom_norm(m, 0.0) == pytest.approx(od.convdom_norm(a, 0.0), rel=1e-12)
        assert od.operator_norm(m) == pytest.approx(od.operator_norm(a), rel=1e-10)
        assert MODULATION_GROUP_BOUND == 1.0


class TestFiniteDifference:
    def test_zero_probe_vanishes(self):
        a = random_matrix(TORUS17, 6)
        for order in (1, 2):
            assert np.max(np.abs(od.finite_difference(a, 0.0, order).entries)) == 0.0

    def test_second_difference_factor(self):
        # On a window the factor on diagonal m is (e^{2 pi i m t} - 1)^2,
        # of modulus 4 sin^2(pi m t).
        g = od.IndexGeometry.window(4)
        a = od.side_diagonal(od.DecayMatrix(g, np.ones((9, 9))), 3)
        t = 0.08
        d2 = od.finite_difference(a, t, order=2)
        expected = 4.0 * np.sin(np.pi * 3 * t) ** 2
        mods = np.abs(d2.entries[a.entries != 0])
        assert np.max(np.abs(mods - expected)) < 1e-12

    def test_second_difference_product_rule(self):
        # Delta^2_t(ab) = chi_2t(a) Delta^2_t b + 2 chi_t(Delta_t a) Delta_t b
        #               + (Delta^2_t a) b
        t = np.array([0.17])
        for seed in range(5):
            a, b = random_matrix(TORUS17, seed), random_matrix(TORUS17, 300 + seed)
            ab = od.multiply(a, b)
            lhs = od.finite_difference(ab, t, 2)
            rhs = (
                od.multiply(od.modulate(a, 2 * t), od.finite_difference(b, t, 2))
                + 2.0
                * od.multiply(
                    od.modulate(od.finite_difference(a, t, 1), t),
                    od.finite_difference(b, t, 1),
                )
                + od.multiply(od.finite_difference(a, t, 2), b)
            )
            assert rel_residual(lhs.entries, rhs.entries) < 1e-10

    def test_inverse_difference_identity(self):
        # Delta_t(a^-1) = -a^-1 Delta_t(a) chi_t(a^-1)
        t = np.array([0.29])
        for seed in range(5):
            b = random_matrix(TORUS17, seed)
            a = od.identity(TORUS17) + (0.5 / od.operator_norm(b)) * b
            inv = od.invert(a)
            lhs = od.finite_difference(inv, t, 1)
            rhs = -1.0 * od.multiply(
                od.multiply(inv, od.finite_difference(a, t, 1)), od.modulate(inv, t)
            )
            assert rel_residual(lhs.entries, rhs.entries) < 1e-10


class TestQuotientRule:
    def test_derivative_of_inverse(self):
        for seed in range(5):
            b = random_matrix(TORUS17, 40 + seed)
            a = od.identity(TORUS17) + (0.5 / od.operator_norm(b)) * b
            inv = od.invert(a)
            lhs = od.commutator_derivation(inv)
            rhs = -1.0 * od.multiply(
                od.multiply(inv, od.commutator_derivation(a)), inv
            )
            assert rel_residual(lhs.entries, rhs.entries) < 1e-8

    def test_inverse_derived_norm_bound(self):
        for seed in range(5):
            b = random_matrix(TORUS17, 60 + seed)
            a = od.identity(TORUS17) + (0.5 / od.operator_norm(b)) * b
            inv = od.invert(a)
            lhs = od.derived_norm(inv, 1, ConvDom(0.0))
            bound = od.convdom_norm(inv, 0.0) ** 2 * od.derived_norm(a, 1, ConvDom(0.0))
            assert lhs <= bound * (1 + 1e-8)


class TestBernsteinAndMeanValue:
    def test_bernstein_inequality_exact(self):
        g = od.IndexGeometry.window(8)
        for seed in range(5):
            a = od.band_truncate(random_matrix(g, seed), 3)
            base = od.convdom_norm(a, 0.0)
            for alpha in ((1,), (2,), (3,)):
                lhs = od.convdom_norm(od.derivation_power(a, alpha), 0.0)
                assert lhs <= (2 * np.pi * 3) ** alpha[0] * base * (1 + 1e-12)

    def test_mean_value_inequality_exact(self):
        g = od.IndexGeometry.window(8)
        rng = np.random.default_rng(9)
        for seed in range(5):
            a = od.band_truncate(random_matrix(g, seed), 4)
            base = od.convdom_norm(a, 0.0)
            for _ in range(3):
                t = rng.uniform(-0.2, 0.2, size=1)
                lhs = od.convdom_norm(od.finite_difference(a, t, 1), 0.0)
                assert lhs <= 2 * np.pi * 4 * float(np.abs(t).sum()) * base * (1 + 1e-12)


class TestModulusOfSmoothness:
    def test_zero_matrix(self):
        grid = od.TGrid(d=1)
        assert od.modulus_of_smoothness(od.zeros(TORUS17), 0.5, 1, ConvDom(0.0), grid) == 0.0

    def test_identity_fixed_by_group(self):
        grid = od.TGrid(d=1)
        a = od.identity(TORUS17)
        assert od.modulus_of_smoothness(a, 1.0, 2, Jaffard(2.0), grid) == 0.0

    def test_scaling(self):
        grid = od.TGrid(d=1)
        a = random_matrix(TORUS17, 7)
        w1 = od.modulus_of_smoothness(a, 0.5, 1, ConvDom(0.0), grid)
        w3 = od.modulus_of_smoothness(3.0 * a, 0.5, 1, ConvDom(0.0), grid)
        assert w3 == pytest.approx(3.0 * w1, rel=1e-12)

    def test_monotone_in_h(self):
        grid = od.TGrid(d=1)
        a = random_matrix(TORUS17, 8)
        values = [
            od.modulus_of_smoothness(a, h, 1, ConvDom(0.0), grid)
            for h in (0.05, 0.1, 0.5, 1.0)
        ]
        assert all(x <= y + 1e-15 for x, y in zip(values, values[1:]))

    def test_empty_grid(self):
        grid = od.TGrid(d=1, dyadic_levels=2)
        with pytest.raises(EmptyGridError):
            od.modulus_of_smoothness(random_matrix(TORUS17, 9), 1e-6, 1, ConvDom(0.0), grid)


def upper_seminorm_constant(eta: float) -> float:
    """sup over x > 0 of 4 sin^2(x) / x^eta, by dense evaluation."""
    x = np.linspace(1e-6, 4.0 * np.pi, 2_000_001)
    return float(np.max(4.0 * np.sin(x) ** 2 / x**eta))


class TestHZSeminorm:
    def test_zero_and_homogeneity(self):
        grid = od.TGrid(d=1)
        assert od.hz_seminorm(od.zeros(TORUS17), 0.5, Jaffard(1.5), grid) == 0.0
        a = random_matrix(TORUS17, 10)
        s1 = od.hz_seminorm(a, 0.5, Jaffard(1.5), grid)
        s2 = od.hz_seminorm(2.5 * a, 0.5, Jaffard(1.5), grid)
        assert s2 == pytest.approx(2.5 * s1, rel=1e-12)

    def test_two_sided_bracket_on_decay_family(self):
        # Family A = (1+|m|)^-(s+eta) in base Jaffard(s) has
        # jaffard_norm(A, s+eta) = 1.  Upper constant: per entry,
        # 4 sin^2(x) x^-eta (pi m / (1+m))^eta <= pi^eta sup_x 4 sin^2(x)/x^eta.
        # Lower constant: the targeted probe t = 1/(2m) contributes
        # 4 (2m/(1+m))^eta from diagonal m.
        s, eta = 1.5, 0.5
        g = od.IndexGeometry.window(16)
        a = od.DecayMatrix(g, (1.0 + diff_abs1(g)) ** -(s + eta))
        grid = od.TGrid.for_matrix(a)
        value = od.hz_seminorm(a, eta, Jaffard(s), grid)
        upper = np.pi**eta * upper_seminorm_constant(eta)
        lower = max(
            4.0 * (2.0 * m / (1.0 + m)) ** eta
            for m in range(1, g.diff_radius + 1)
        )
        assert lower * (1 - 1e-12) <= value <= upper * (1 + 1e-12)

    def test_grid_monotone(self):
        a = random_matrix(TORUS17, 11)
        g1 = od.TGrid(d=1, dyadic_levels=6)
        g2 = od.TGrid(d=1, dyadic_levels=6, extra=((0.37,), (0.11,)))
        v1 = od.hz_seminorm(a, 0.5, ConvDom(0.0), g1)
        v2 = od.hz_seminorm(a, 0.5, ConvDom(0.0), g2)
        assert v2 >= v1 - 1e-15


class TestHZNorm:
    def test_split(self):
        assert hz_split(0.5) == (0, 0.5)
        assert hz_split(1.0) == (0, 1.0)
        assert hz_split(1.5) == (1, 0.5)
        assert hz_split(2.0) == (1, 1.0)

    def test_low_order_reduces_to_base_plus_seminorm(self):
        a = random_matrix(TORUS17, 12)
        grid = od.TGrid.for_matrix(a)
        params = od.HZParams(0.7, ConvDom(0.0), grid)
        expected = od.convdom_norm(a, 0.0) + od.hz_seminorm(a, 0.7, ConvDom(0.0), grid)
        assert od.hz_norm(a, params) == pytest.approx(expected, rel=1e-12)

    def test_identity_has_no_seminorm(self):
        a = od.identity(TORUS17)
        params = od.HZParams(0.5, Jaffard(2.0), od.TGrid.for_matrix(a))
        assert od.hz_norm(a, params) == pytest.approx(od.jaffard_norm(a, 2.0), rel=1e-12)

    def test_jaffard_characterization_bracket(self):
        # hz_norm(A_c; r, Jaffard(s)) with A_c = c (1+|m|)^-(s+r) stays in
        # [1 + lower, 1 + upper] times jaffard_norm(A_c, s+r) = c, with the
        # seminorm bracket constants of the decay family, uniformly over the
        # amplitude c and the geometry size.
        s, r = 1.5, 0.5
        upper = np.pi**r * upper_seminorm_constant(r)
        for c in (0.3, 1.0, 7.5):
            for n in (8, 16, 32):
                g = od.IndexGeometry.window(n)
                a = od.DecayMatrix(g, c * (1.0 + diff_abs1(g)) ** -(s + r))
                grid = od.TGrid.for_matrix(a)
                lower = max(
                    4.0 * (2.0 * m / (1.0 + m)) ** r
                    for m in range(1, g.diff_radius + 1)
                )
                value = od.hz_norm(a, od.HZParams(r, Jaffard(s), grid))
                ref = od.jaffard_norm(a, s + r)
                assert ref == pytest.approx(c, rel=1e-12)
                assert (1 + lower) * (1 - 1e-10) <= value / ref <= (1 + upper) * (1 + 1e-10)

    def test_probe_breakdown_max_matches_seminorm(self):
        a = random_matrix(TORUS17, 13)
        grid = od.TGrid.for_matrix(a)
        params = od.HZParams(0.5, ConvDom(0.0), grid)
        rows = hz_probe_breakdown(a, params)
        assert max(v for _, v in rows) == pytest.approx(
            od.hz_seminorm(a, 0.5, ConvDom(0.0), grid), rel=1e-12
        )


class TestFourierCoefficient:
    def test_identity_coefficients(self):
        a = od.identity(od.IndexGeometry.torus(9))
        zero = od.fourier_coefficient(a, 0, nodes=9)
        assert np.max(np.abs(zero.entries - a.entries)) < 1e-12
        one = od.fourier_coefficient(a, 1, nodes=9)
        assert np.max(np.abs(one.entries)) < 1e-12

    def test_matches_side_diagonal_on_window(self):
        g = od.IndexGeometry.window(6)
        a = od.band_truncate(random_matrix(g, 14), 4)
        for m in range(-4, 5):
            fc = od.fourier_coefficient(a, m, nodes=11)
            sd = od.side_diagonal(a, m)
            assert np.max(np.abs(fc.entries - sd.entries)) < 1e-10

    def test_matches_side_diagonal_on_torus(self):
        g = od.IndexGeometry.torus(11)
        a = random_matrix(g, 15)
        for m in range(-5, 6):
            fc = od.fourier_coefficient(a, m, nodes=11)
            sd = od.side_diagonal(a, m)
            assert np.max(np.abs(fc.entries - sd.entries)) < 1e-10

    def test_insufficient_nodes(self):
        g = od.IndexGeometry.window(6)
        a = od.band_truncate(random_matrix(g, 16), 4)
        with pytest.raises(AliasingError):
            od.fourier_coefficient(a, 0, nodes=5)
        gt = od.IndexGeometry.torus(11)
        with pytest.raises(AliasingError):
            od.fourier_coefficient(random_matrix(gt, 17), 0, nodes=7)


class TestContinuityDefect:
    def test_identity(self):
        a = od.identity(TORUS17)
        assert od.continuity_defect(a, Jaffard(2.0), od.TGrid.for_matrix(a)) == 0.0

    def test_gamma_defect_is_exactly_two(self):
        for n in (8, 16, 32):
            g = od.IndexGeometry.window(n)
            gamma = od.generate(od.GeneratorSpec.gamma(g, 1.5))
            grid = od.TGrid.for_matrix(gamma)
            defect = od.continuity_defect(gamma, Jaffard(1.5), grid)
            assert abs(defect - 2.0) < 1e-12

    def test_banded_defect_rate(self):
        # Rate bound from the mean-value estimate: |Delta_t A| <=
        # 2 pi * bandwidth * |t| * |A| at the smallest dyadic shell.
        g = od.IndexGeometry.window(8)
        a = od.band_truncate(random_matrix(g, 18), 3)
        levels = 10
        grid = od.TGrid(d=1, dyadic_levels=levels)
        defect = od.continuity_defect(a, ConvDom(0.0), grid)
        # The aimed probe at the outermost diagonal dominates the shell
        # probe; it has |t| = 1/(2*3), still within the rate bound.
        t_max = max(2.0**-levels, 1.0 / (2 * 3))
        assert defect <= 2 * np.pi * 3 * t_max * od.convdom_norm(a, 0.0) * (1 + 1e-12)


def test_fourier_decay_of_smooth_family():
    # Profile of the decay family fits its exponent almost exactly, which is
    # the finite-model face of coefficient decay for Hölder-Zygmund classes.
    g = od.IndexGeometry.torus(65)
    r_total = 2.0
    a = od.DecayMatrix(g, (1.0 + diff_abs1(g)) ** -r_total)
    fit = od.fit_decay_exponent(od.diagonal_profile(a), 2, g.diff_radius)
    assert fit.exponent >= r_total - 0.1
    assert fit.r_squared > 0.9999
