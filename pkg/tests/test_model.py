import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

import lshawkes as lh
from lshawkes.errors import ModelError, QuadratureError

from conftest import random_valid_model

TWO_PI = 2.0 * np.pi


class TestValidateModel:
    def test_poisson_degenerate_all_pass(self, poisson_model):
        report = lh.validate_model(poisson_model)
        assert report.passed
        assert report["subcriticality"].worst == 0.0

    def test_supercritical_fails_subcriticality(self):
        m = lh.LsHawkesModel(lh.baseline(1.0), lh.exponential_fertility(1.2, 1.0))
        report = lh.validate_model(m)
        assert not report.passed
        assert not report["subcriticality"].passed
        assert_allclose(report["subcriticality"].worst, 1.2, rtol=1e-9)
        # other structural checks still pass; failures are data, not exceptions
        assert report["causal-support"].passed

    def test_gamma_sinusoidal_zeta_passes(self):
        m = lh.LsHawkesModel(
            lh.baseline(1.0), lh.gamma_fertility(lh.sinusoidal(0.3, 0.2), 1.0, shape=2)
        )
        report = lh.validate_model(m)
        assert report.passed
        # independent oracle: sup over a u-grid of the trapezoid integral of p
        s = np.linspace(0, 60, 20_001)
        sup = max(float(np.trapezoid(m.fertility.density(s, u), s)) for u in np.linspace(0, 1, 41))
        assert_allclose(sup, 0.5, atol=1e-4)
        assert_allclose(report["subcriticality"].worst, sup, atol=1e-4)

    def test_grid_resolution_floor(self, poisson_model):
        with pytest.raises(ValueError):
            lh.validate_model(poisson_model, grid_resolution=8)

    def test_wrong_envelope_fails(self):
        fert = lh.FertilityFamily(
            "exponential",
            zeta_curve=lh.constant(0.5),
            decay=lh.constant(1.0),
            tail_rate=2.0,  # declared decay faster than the true one
            tail_const=0.5,
        )
        report = lh.validate_model(lh.LsHawkesModel(lh.baseline(1.0), fert))
        assert not report["exponential-envelope"].passed


class TestLocalMeanDensity:
    def test_exponential_half(self, stationary_exp_model):
        assert lh.local_mean_density(stationary_exp_model, 0.0) == 2.0

    def test_poisson_case(self):
        m = lh.LsHawkesModel(lh.baseline(3.0), lh.zero_fertility())
        assert lh.local_mean_density(m, 0.7) == 3.0

    def test_linear_curves(self):
        m = lh.LsHawkesModel(
            lh.baseline(lh.piecewise_linear([0, 1], [1.0, 1.5])),
            lh.exponential_fertility(lh.piecewise_linear([0, 1], [0.3, 0.5]), 1.0),
        )
        assert_allclose(lh.local_mean_density(m, 0.5), 1.25 / 0.6, rtol=1e-12)

    def test_supercritical_raises(self):
        m = lh.LsHawkesModel(lh.baseline(1.0), lh.exponential_fertility(1.2, 1.0))
        with pytest.raises(ModelError):
            lh.local_mean_density(m, 0.5)


class TestFertilityFt:
    def test_exponential_at_zero(self, stationary_exp_model):
        assert_allclose(lh.fertility_ft(stationary_exp_model, 0.2, 0.0), 0.5 + 0j, rtol=1e-14)

    def test_exponential_standard_integral(self, stationary_exp_model):
        # zeta delta / (delta + i w) at w = 1: 0.5/(1 + i) = 0.25 - 0.25i
        assert_allclose(lh.fertility_ft(stationary_exp_model, 0.0, 1.0), 0.25 - 0.25j, rtol=1e-14)

    def test_gamma_against_quadrature(self):
        m = lh.LsHawkesModel(
            lh.baseline(1.0), lh.gamma_fertility(lh.sinusoidal(0.3, 0.2), 1.5, shape=3)
        )
        s = np.linspace(0, 80, 400_001)
        p = m.fertility.density(s, 0.3)
        oracle = np.trapezoid(p * np.exp(-1j * 2.0 * s), s)
        assert_allclose(lh.fertility_ft(m, 0.3, 2.0), oracle, atol=1e-8)

    def test_modulus_bounded_by_zeta(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = random_valid_model(rng)
            u = float(rng.uniform(0, 1))
            w = float(rng.uniform(-30, 30))
            assert abs(lh.fertility_ft(m, u, w)) <= float(m.fertility.zeta(u)) + 1e-12

    def test_table_family_and_nyquist_guard(self):
        s = np.linspace(0.0, 10.0, 201)
        col = 0.4 * np.exp(-s)
        fert = lh.table_fertility(s, [0.0, 1.0], np.column_stack([col, col]))
        m = lh.LsHawkesModel(lh.baseline(1.0), fert, beta=1.0)
        # interpolated table tracks the closed form at resolvable frequencies
        exact = 0.4 / (1.0 + 1j * 2.0)
        assert_allclose(lh.fertility_ft(m, 0.5, 2.0), exact, atol=2e-3)
        with pytest.raises(QuadratureError):
            lh.fertility_ft(m, 0.5, 200.0)


class TestLocalBartlett:
    def test_poisson_flat(self, poisson_model):
        for w in (0.0, 1.0, 13.7):
            assert_allclose(lh.local_bartlett(poisson_model, 0.4, w), 1.0 / TWO_PI, rtol=1e-14)

    def test_exponential_at_zero(self, stationary_exp_model):
        assert_allclose(lh.local_bartlett(stationary_exp_model, 0.1, 0.0), 4.0 / np.pi, rtol=1e-14)

    def test_high_frequency_limit(self, stationary_exp_model):
        assert_allclose(lh.local_bartlett(stationary_exp_model, 0.1, 1e9), 1.0 / np.pi, rtol=1e-6)

    def test_monotone_bounds_random(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            m = random_valid_model(rng)
            u = float(rng.uniform(0, 1))
            zeta = float(m.fertility.zeta(u))
            m1 = lh.local_mean_density(m, u)
            if m1 == 0.0:
                continue
            w = float(rng.uniform(-50, 50))
            g = lh.local_bartlett(m, u, w)
            lo = m1 / TWO_PI / (1 + zeta) ** 2
            hi = m1 / TWO_PI / (1 - zeta) ** 2
            assert lo - 1e-12 <= g <= hi + 1e-12


class TestRegularizedBartlett:
    def test_poisson_exact_any_bandwidth(self, poisson_model, epanechnikov):
        for b2 in (0.9, 0.3, 0.05):
            val = lh.regularized_bartlett(poisson_model, 0.5, 1.3, b2, epanechnikov)
            assert_allclose(val, 1.0 / TWO_PI, atol=1e-9)

    def test_against_dense_trapezoid_oracle(self, stationary_exp_model, epanechnikov):
        val = lh.regularized_bartlett(stationary_exp_model, 0.5, 0.0, 0.1, epanechnikov)
        x = np.linspace(-3000, 3000, 600_001)
        w = np.abs(epanechnikov.ft(x)) ** 2
        g = lh.local_bartlett(stationary_exp_model, 0.5, 0.1 * x)
        oracle = np.trapezoid(w * g, x)
        assert_allclose(val, oracle, atol=1e-6)

    def test_quadratic_convergence(self, smooth_scan_model, epanechnikov):
        g = lh.local_bartlett(smooth_scan_model, 0.5, 1.0)
        gap = {
            b2: abs(lh.regularized_bartlett(smooth_scan_model, 0.5, 1.0, b2, epanechnikov) - g)
            for b2 in (0.2, 0.1, 0.05)
        }
        assert gap[0.2] / gap[0.1] >= 3.0
        assert gap[0.1] / gap[0.05] >= 3.0

    def test_bad_bandwidth(self, poisson_model, epanechnikov):
        with pytest.raises(ValueError):
            lh.regularized_bartlett(poisson_model, 0.5, 0.0, -0.1, epanechnikov)


class TestIdentifyBaseline:
    def test_exponential_roundtrip_value(self):
        assert_allclose(lh.identify_baseline(2.0, 4.0 / np.pi), 1.0, rtol=1e-14)

    def test_poisson(self):
        assert_allclose(lh.identify_baseline(3.0, 3.0 / TWO_PI), 3.0, rtol=1e-14)

    def test_degenerate_empty(self):
        assert lh.identify_baseline(0.0, 1.0) == 0.0

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            lh.identify_baseline(1.0, 0.0)
        with pytest.raises(ValueError):
            lh.identify_baseline(-1.0, 1.0)

    def test_roundtrip_random_models(self):
        rng = np.random.default_rng(2718)
        for _ in range(100):
            m = random_valid_model(rng)
            u = float(rng.uniform(0, 1))
            lam = float(m.baseline(u))
            if lam == 0.0:
                continue
            m1 = lh.local_mean_density(m, u)
            g0 = lh.local_bartlett(m, u, 0.0)
            assert_allclose(lh.identify_baseline(m1, g0), lam, rtol=1e-10)


class TestFrozen:
    def test_frozen_matches_at_u(self, sinusoidal_model):
        frozen = sinusoidal_model.frozen_at(0.3)
        for v in (0.0, 0.5, 2.0):
            assert_allclose(
                float(frozen.baseline(v)), float(sinusoidal_model.baseline(0.3)), rtol=1e-14
            )
            assert_allclose(
                lh.local_bartlett(frozen, v, 1.0), lh.local_bartlett(sinusoidal_model, 0.3, 1.0), rtol=1e-12
            )


class TestModelJson:
    def test_roundtrip(self, tmp_path, sinusoidal_model):
        path = tmp_path / "model.json"
        lh.save_model(sinusoidal_model, path)
        loaded = lh.load_model(path)
        u = np.linspace(-0.2, 1.2, 23)
        assert_allclose(loaded.baseline(u), sinusoidal_model.baseline(u), rtol=1e-14)
        assert_allclose(loaded.fertility.zeta(u), sinusoidal_model.fertility.zeta(u), rtol=1e-14)
        assert loaded.beta == sinusoidal_model.beta
        # schema fields present
        d = json.loads(path.read_text())
        assert set(d) == {"baseline", "fertility", "beta"}
        assert {"form", "params", "sup_bound", "holder"} <= set(d["baseline"])
        assert {"family", "zeta_curve", "params", "tail"} <= set(d["fertility"])

    def test_table_family_roundtrip(self, tmp_path):
        s = np.linspace(0.0, 8.0, 81)
        u = np.array([0.0, 0.5, 1.0])
        tbl = np.outer(np.exp(-s), [0.3, 0.5, 0.4])
        m = lh.LsHawkesModel(lh.baseline(1.0), lh.table_fertility(s, u, tbl))
        path = tmp_path / "table.json"
        lh.save_model(m, path)
        loaded = lh.load_model(path)
        ss = np.linspace(0, 8, 40)
        assert_allclose(loaded.fertility.density(ss, 0.25), m.fertility.density(ss, 0.25), rtol=1e-12)


def test_beta_domain():
    with pytest.raises(ModelError):
        lh.LsHawkesModel(lh.baseline(1.0), lh.zero_fertility(), beta=1.5)
