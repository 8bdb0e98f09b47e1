"""Generators, the circulant oracle, fitting, and experiment runners."""

import numpy as np
import pytest

import offdiag as od
from offdiag.core import diff_abs1
from offdiag.errors import DegenerateInputError, FitError, SingularMatrixError
from offdiag.experiments import (
    ExperimentConfig,
    GeneratorSpec,
    _hz_cd_sharp_raw,
    fit_shell_exponent,
    fit_smoothness_order,
    loglog_fit,
)
from offdiag.norms import ConvDom, Jaffard, SideDiagonalProfile, diagonal_profile


class TestGenerators:
    def test_jaffard_random_deviation_is_epsilon(self):
        g = od.IndexGeometry.torus(65)
        a = od.generate(GeneratorSpec.jaffard_random(g, 2.5, seed=5, epsilon=0.5))
        deviation = a - od.identity(g)
        top = np.linalg.svd(deviation.entries, compute_uv=False)[0]
        assert top == pytest.approx(0.5, rel=1e-10)

    def test_jaffard_random_entry_decay(self):
        g = od.IndexGeometry.torus(65)
        a = od.generate(GeneratorSpec.jaffard_random(g, 2.5, seed=6, epsilon=0.5))
        off = np.abs((a - od.identity(g)).entries)
        bound = off[0, 0] / (1.0 + diff_abs1(g))[0, 0]  # normalization probe
        weights = (1.0 + diff_abs1(g)) ** 2.5
        assert np.max(off * weights) <= 0.5 * (1 + 1e-10)  # |u| <= 1 on the disc

    def test_determinism(self):
        g = od.IndexGeometry.torus(33)
        spec = GeneratorSpec.jaffard_random(g, 2.0, seed=7, epsilon=0.3)
        assert np.array_equal(od.generate(spec).entries, od.generate(spec).entries)

    def test_anisotropic_weight_shape(self):
        g = od.IndexGeometry.torus(9, d=2)
        a = od.generate(GeneratorSpec.anisotropic(g, 2.0, (1, 0), seed=8, epsilon=0.4))
        off = np.abs((a - od.identity(g)).entries)
        from offdiag.core import diff_axes

        weights = (1.0 + diff_abs1(g)) ** 2.0 * (1.0 + np.abs(diff_axes(g)[0])) ** 1.0
        scaled = off * weights
        assert np.max(scaled) <= 0.4 * (1 + 1e-10)

    def test_gamma_paper_constants(self):
        g = od.IndexGeometry.window(8)
        gamma = od.generate(GeneratorSpec.gamma(g, 2.0))
        assert od.jaffard_norm(gamma, 2.0) == pytest.approx(1.0, abs=1e-12)
        assert od.schur_norm(gamma, 2.0) == pytest.approx(1.0, abs=1e-12)

    def test_hz_cd_sharp_block_norm_scaling(self):
        g = od.IndexGeometry.torus(129)
        spec = GeneratorSpec.hz_cd_sharp(g, 1.5, seed=9, epsilon=0.5)
        raw = _hz_cd_sharp_raw(spec)
        a = od.generate(spec)
        top = np.linalg.svd(raw.entries, compute_uv=False)[0]
        lp = od.lp_block_norm(a - od.identity(g), 1.5, ConvDom(0.0))
        assert lp == pytest.approx(0.5 * 1.0 / top, rel=1e-9)

    def test_epsilon_range(self):
        g = od.IndexGeometry.torus(9)
        with pytest.raises(ValueError):
            GeneratorSpec.jaffard_random(g, 2.0, epsilon=1.0)

    def test_spec_roundtrip(self):
        g = od.IndexGeometry.torus(9)
        for spec in (
            GeneratorSpec.jaffard_random(g, 2.0, seed=1, epsilon=0.4),
            GeneratorSpec.anisotropic(od.IndexGeometry.torus(9, d=2), 2.0, (1, 1)),
            GeneratorSpec.gamma(od.IndexGeometry.window(4), 1.5),
            GeneratorSpec.laurent(g, {0: 1.0, 1: 0.5j}),
        ):
            again = GeneratorSpec.from_dict(spec.to_dict())
            assert np.array_equal(od.generate(again).entries, od.generate(spec).entries)


class TestLaurentOracle:
    def test_constant_symbol(self):
        g = od.IndexGeometry.torus(17)
        oracle = od.laurent_inverse_oracle({0: 1.0}, g)
        assert np.max(np.abs(oracle.entries - np.eye(17))) < 1e-14

    def test_geometric_inverse_coefficients(self):
        # The inverse of 1 + 0.5 e^{2 pi i t} has coefficients (-0.5)^m
        # (Neumann series closed form).
        g = od.IndexGeometry.torus(65)
        oracle = od.laurent_inverse_oracle({0: 1.0, 1: 0.5}, g)
        prof = diagonal_profile(oracle, "max")
        for m in range(0, 12):
            assert prof.value((m,)) == pytest.approx(0.5**m, rel=1e-10, abs=1e-12)

    def test_agreement_with_dense_inverse(self):
        g = od.IndexGeometry.torus(33)
        coeffs = {-1: 0.25, 0: 1.5, 2: 0.3 - 0.1j}
        dense = od.invert(od.generate(GeneratorSpec.laurent(g, coeffs)))
        oracle = od.laurent_inverse_oracle(coeffs, g)
        assert np.max(np.abs(dense.entries - oracle.entries)) < 1e-9

    def test_vanishing_symbol(self):
        g = od.IndexGeometry.torus(17)
        with pytest.raises(SingularMatrixError):
            od.laurent_inverse_oracle({0: 1.0, 1: -1.0}, g)


class TestFitDecayExponent:
    def profile_from_values(self, geom, func):
        from offdiag.core import diff_tuples

        values = np.array([func(tuple(int(x) for x in m)) for m in diff_tuples(geom)])
        return SideDiagonalProfile(geom, "max", values)

    def test_exact_power_profile(self):
        g = od.IndexGeometry.torus(129)
        prof = self.profile_from_values(g, lambda m: (1.0 + abs(m[0])) ** -2.5)
        fit = od.fit_decay_exponent(prof, 2, 64)
        assert fit.exponent == pytest.approx(2.5, abs=1e-6)
        assert fit.r_squared >= 0.9999

    def test_constant_profile(self):
        g = od.IndexGeometry.torus(33)
        prof = self.profile_from_values(g, lambda m: 1.0)
        fit = od.fit_decay_exponent(prof, 2, 16)
        assert fit.exponent == pytest.approx(0.0, abs=1e-12)

    def test_single_diagonal_insufficient(self):
        g = od.IndexGeometry.torus(33)
        prof = self.profile_from_values(g, lambda m: 1.0 if m == (3,) else 0.0)
        with pytest.raises(FitError):
            od.fit_decay_exponent(prof, 2, 16)

    def test_zero_profile_degenerate(self):
        g = od.IndexGeometry.torus(33)
        prof = self.profile_from_values(g, lambda m: 0.0)
        with pytest.raises(DegenerateInputError):
            od.fit_decay_exponent(prof, 2, 16)

    def test_axis_collapse(self):
        g = od.IndexGeometry.torus(17, d=2)
        prof = self.profile_from_values(
            g, lambda m: (1.0 + abs(m[0])) ** -3.0 * (1.0 + abs(m[1])) ** -1.0
        )
        fit0 = od.fit_decay_exponent(prof, 1, 8, axis=0)
        fit1 = od.fit_decay_exponent(prof, 1, 8, axis=1)
        assert fit0.exponent == pytest.approx(3.0, abs=1e-6)
        assert fit1.exponent == pytest.approx(1.0, abs=1e-6)

    def test_loglog_fit_requires_points(self):
        with pytest.raises(FitError):
            loglog_fit(np.array([1.0, 2.0]), np.array([1.0, 0.5]), (1, 2))


class TestHelpersFits:
    def test_fit_shell_exponent_on_sharp_family(self):
        g = od.IndexGeometry.torus(257)
        raw = _hz_cd_sharp_raw(GeneratorSpec.hz_cd_sharp(g, 1.5, seed=11))
        fit = fit_shell_exponent(raw, 1, 6)
        assert fit.exponent == pytest.approx(1.5, abs=1e-9)

    def test_fit_smoothness_order_on_decay_family(self):
        g = od.IndexGeometry.window(128)
        a = od.DecayMatrix(g, (1.0 + diff_abs1(g)) ** -2.0)
        fit = fit_smoothness_order(a, Jaffard(1.5), 3, 8)
        assert fit.exponent == pytest.approx(0.5, abs=0.15)


def small_config(kind, **overrides):
    defaults = {
        "jaffard": dict(geometry=od.IndexGeometry.torus(65), r=2.5, epsilon=0.5),
        "anisotropic": dict(
            geometry=od.IndexGeometry.torus(17, d=2), r=2.5, alpha=(1, 0),
            epsilon=0.5, tol_exponent=0.4, fit_min=1,
        ),
        "banded_approx_inverse": dict(geometry=od.IndexGeometry.torus(65), r=2.5,
                                      epsilon=0.5),
        "hz_cd": dict(geometry=od.IndexGeometry.torus(65), r=1.5, epsilon=0.5),
        "quotient_rule": dict(
            geometry=od.IndexGeometry.torus(33),
            symbol=(((0,), 1.0 + 0j), ((1,), 0.5 + 0j)),
        ),
        "jackson_bernstein": dict(geometry=od.IndexGeometry.window(128), s=1.5,
                                  r_values=(0.5, 1.0)),
    }
    params = defaults[kind]
    params.update(overrides)
    return ExperimentConfig(kind=kind, **params)


class TestRunExperiment:
    def test_all_kinds_produce_reports(self):
        for kind in (
            "jaffard",
            "anisotropic",
            "banded_approx_inverse",
            "hz_cd",
            "quotient_rule",
            "jackson_bernstein",
        ):
            report = od.run_experiment(small_config(kind))
            payload = report.to_dict()
            assert payload["kind"] == kind
            assert isinstance(payload["pass"], bool)
            assert payload["runtime_ms"] >= 0.0

    def test_quotient_rule_slack_is_tiny_on_torus(self):
        report = od.run_experiment(small_config("quotient_rule"))
        assert report.passed
        assert report.norms["quotient_residual"] < 1e-10
        assert report.norms["oracle_discrepancy"] < 1e-10

    def test_reports_validate_against_schema(self):
        jsonschema = pytest.importorskip("jsonschema")
        from offdiag.io import REPORT_SCHEMA

        for kind in ("jaffard", "quotient_rule", "jackson_bernstein"):
            payload = od.run_experiment(small_config(kind)).to_dict()
            jsonschema.validate(payload, REPORT_SCHEMA)

    def test_determinism_excluding_runtime(self):
        cfg = small_config("jaffard", seed=21)
        a = od.run_experiment(cfg).to_dict()
        b = od.run_experiment(cfg).to_dict()
        a.pop("runtime_ms")
        b.pop("runtime_ms")
        assert a == b

    def test_degenerate_epsilon_flagged(self):
        report = od.run_experiment(small_config("jaffard", epsilon=0.0))
        assert not report.passed
        assert "degenerate" in (report.reason or "")

    def test_inversion_failure_becomes_failed_report(self):
        cfg = small_config("quotient_rule", symbol=(((0,), 1.0 + 0j), ((1,), -1.0 + 0j)))
        report = od.run_experiment(cfg)
        assert not report.passed
        assert "SingularMatrixError" in (report.reason or "")

    def test_window_geometry_uses_inner_margin(self):
        cfg = small_config("jaffard", geometry=od.IndexGeometry.window(48))
        report = od.run_experiment(cfg)
        assert report.passed
        # fitted range is capped by the inner window radius
        assert report.fits["decay_inv"]["range"][1] <= 48

    def test_monotone_in_torus_size(self):
        fits = {}
        for n in (129, 257):
            cfg = small_config("jaffard", geometry=od.IndexGeometry.torus(n), seed=3)
            fits[n] = od.run_experiment(cfg).fits["decay_inv"]["exponent"]
        assert fits[257] >= fits[129] - 0.1

    def test_config_roundtrip(self):
        cfg = small_config("anisotropic", seed=5)
        again = ExperimentConfig.from_dict(cfg.to_dict())
        assert again == cfg
