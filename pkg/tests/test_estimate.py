import numpy as np
import pytest
from numpy.testing import assert_allclose

import lshawkes as lh
from lshawkes.errors import BandwidthError, FeasibilityError, ResolutionError
from lshawkes.estimate import convolve_at


def brute_force_bartlett(events, u0, w0, b1, b2, k, q, n_nodes):
    """Direct dense-trapezoid evaluation of the defining estimator formula."""
    T = events.horizon
    Tu0 = T * u0
    lo, hi = k.support
    t = np.linspace(T * b1 * lo, T * b1 * hi, n_nodes)
    w = k(t / (T * b1)) / (T * b1)
    x = events.times - Tu0
    qlo, qhi = q.support
    x = x[(x > t[0] + qlo / b2 - 1) & (x < t[-1] + qhi / b2 + 1)]
    S = np.zeros(t.size, dtype=complex)
    for xj in x:
        S += np.sqrt(b2) * np.exp(1j * w0 * (xj - t)) * q(b2 * (xj - t))
    m2 = np.trapezoid(w * np.abs(S) ** 2, t)
    m1 = np.trapezoid(w * S, t)
    return m2 - abs(m1) ** 2


class ShiftedKernel:
    """Compactly supported test function f(x) = K(x - c)."""

    def __init__(self, inner, center):
        self.inner = inner
        self.center = center

    @property
    def support(self):
        lo, hi = self.inner.support
        return lo + self.center, hi + self.center

    def __call__(self, x):
        return self.inner(np.asarray(x, dtype=np.float64) - self.center)


class TestFeasibility:
    def test_interior_point(self, triangle, epanechnikov):
        assert lh.check_feasibility(0.5, 0.15, 0.05, 1e4, triangle, epanechnikov)

    def test_boundary_u0(self, triangle, epanechnikov):
        # 0.01 - 0.15/2 < 0
        assert not lh.feasible_mean_density(0.01, 0.15, triangle)
        assert not lh.check_feasibility(0.01, 0.15, 0.05, 1e4, triangle, epanechnikov)

    def test_wide_bandwidth(self, triangle, epanechnikov):
        # with a [-1, 1]-support kernel, u0 = 0.5 and b1 = 0.9 stick out
        wide = lh.time_kernel_from_table(np.array([-1.0, 0.0, 1.0]), np.array([0.0, 1.0, 0.0]))
        assert not lh.feasible_mean_density(0.5, 0.9, wide)
        # for the paper kernels on [-1/2, 1/2] the same point is feasible
        assert lh.feasible_mean_density(0.5, 0.9, triangle)

    def test_bartlett_needs_frequency_margin(self, triangle, epanechnikov):
        # (T b2)^-1 support term pushes a near-boundary point out
        assert lh.feasible_mean_density(0.925, 0.15, triangle)
        assert not lh.feasible_bartlett(0.925, 0.15, 0.05, 100.0, triangle, epanechnikov)


class TestEstimateMeanDensity:
    def test_empty(self, triangle):
        ev = lh.EventSeries(np.array([]), 10.0)
        assert lh.estimate_mean_density(ev, 0.5, 0.2, triangle) == 0.0

    def test_hand_example(self, triangle):
        # (1/2)(k(-1/4) + k(0) + k(1/4)) = (1/2)(1 + 2 + 1)
        ev = lh.EventSeries(np.array([4.5, 5.0, 5.5]), 10.0)
        assert lh.estimate_mean_density(ev, 0.5, 0.2, triangle) == 2.0

    def test_events_outside_support(self, triangle):
        ev = lh.EventSeries(np.array([1.0, 2.0, 8.0, 9.0]), 10.0)
        assert lh.estimate_mean_density(ev, 0.5, 0.2, triangle) == 0.0

    def test_matches_full_sum(self, triangle, sinusoidal_model):
        ev = lh.simulate_ls_hawkes(sinusoidal_model, 2000.0, lh.SimulationConfig(seed=31))
        w = lh.scaled_time_kernel(triangle, 0.1, 2000.0)
        direct = float(np.sum(w(ev.times - 2000.0 * 0.4)))
        assert_allclose(lh.estimate_mean_density(ev, 0.4, 0.1, triangle), direct, rtol=1e-12)

    def test_strict_mode_raises(self, triangle):
        ev = lh.EventSeries(np.array([5.0]), 10.0)
        with pytest.raises(FeasibilityError):
            lh.estimate_mean_density(ev, 0.01, 0.15, triangle)

    def test_warn_mode_warns(self, triangle):
        ev = lh.EventSeries(np.array([5.0]), 10.0)
        with pytest.warns(UserWarning):
            lh.estimate_mean_density(ev, 0.01, 0.15, triangle, feasibility="warn")


class TestEmpiricalMoment:
    def test_empty_series(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([]), 1000.0)
        w = lh.scaled_time_kernel(triangle, 0.2, 1000.0)
        f = ShiftedKernel(lh.modulated_freq_kernel(epanechnikov, 0.05, 0.3), 500.0)
        assert lh.empirical_moment(ev, f, w, rho="linear") == 0.0
        assert lh.empirical_moment(ev, f, w, rho="squared-modulus") == 0.0

    def test_linear_matches_convolution_identity(self, triangle, epanechnikov):
        rng = np.random.default_rng(41)
        T = 1000.0
        w = lh.scaled_time_kernel(triangle, 0.2, T)
        for trial in range(5):
            times = np.sort(rng.uniform(350, 650, 10))
            ev = lh.EventSeries(times, T)
            f = ShiftedKernel(
                lh.modulated_freq_kernel(epanechnikov, float(rng.uniform(0.03, 0.2)), float(rng.uniform(0, 1))),
                T * 0.5,
            )
            lin = lh.empirical_moment(ev, f, w, rho="linear")
            oracle = np.sum(convolve_at(f, w, times, n_nodes=4096))
            assert abs(lin - oracle) < 1e-6 * max(abs(oracle), 1.0)

    def test_squared_modulus_nonnegative(self, triangle, epanechnikov):
        rng = np.random.default_rng(42)
        T = 1000.0
        w = lh.scaled_time_kernel(triangle, 0.2, T)
        f = ShiftedKernel(lh.modulated_freq_kernel(epanechnikov, 0.1, 0.5), 500.0)
        for _ in range(10):
            ev = lh.EventSeries(np.sort(rng.uniform(300, 700, 25)), T)
            assert lh.empirical_moment(ev, f, w, rho="squared-modulus") >= 0.0

    def test_bad_rho(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([500.0]), 1000.0)
        w = lh.scaled_time_kernel(triangle, 0.2, 1000.0)
        f = ShiftedKernel(lh.modulated_freq_kernel(epanechnikov, 0.1, 0.5), 500.0)
        with pytest.raises(ValueError):
            lh.empirical_moment(ev, f, w, rho="cubic")


class TestEstimateBartlett:
    def test_empty(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([]), 1e4)
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.02)
        assert lh.estimate_bartlett(ev, 0.5, 0.05, cfg, triangle, epanechnikov) == 0.0

    def test_three_events_vs_brute_force(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([4990.0, 5000.0, 5020.0]), 1e4)
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.02, quad_nodes=16384)
        val = lh.estimate_bartlett(ev, 0.5, 0.05, cfg, triangle, epanechnikov)
        oracle = brute_force_bartlett(ev, 0.5, 0.05, 0.1, 0.02, triangle, epanechnikov, 20 * 16384 + 1)
        assert abs(val - oracle) < 1e-6 * abs(oracle)

    def test_nonnegative_on_random_inputs(self, triangle, epanechnikov):
        rng = np.random.default_rng(43)
        cfg = lh.EstimatorConfig(b1=0.2, b2=0.1, refine_check=False)
        for _ in range(200):
            T = float(rng.uniform(100, 2000))
            n = int(rng.integers(0, 40))
            times = np.sort(rng.uniform(0, T, n))
            times = times[np.concatenate([[True], np.diff(times) > 0])] if n else times
            ev = lh.EventSeries(times, T)
            w0 = float(rng.uniform(0, 3))
            val = lh.estimate_bartlett(ev, 0.5, w0, cfg, triangle, epanechnikov)
            assert val >= 0.0

    def test_shift_equivariance(self, poisson_model, triangle, epanechnikov):
        ev = lh.simulate_ls_hawkes(poisson_model, 1e4, lh.SimulationConfig(seed=9))
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.05, refine_check=False)
        s = 123.456
        shifted = lh.EventSeries(ev.times[(ev.times + s) <= 1e4] + s, 1e4)
        v1 = lh.estimate_bartlett(ev, 0.4, 0.1, cfg, triangle, epanechnikov)
        v2 = lh.estimate_bartlett(shifted, 0.4 + s / 1e4, 0.1, cfg, triangle, epanechnikov)
        assert_allclose(v1, v2, rtol=1e-6)

    def test_inadmissible_config(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([50.0]), 100.0)
        cfg = lh.EstimatorConfig(b1=0.05, b2=0.05)
        with pytest.raises(BandwidthError):
            lh.estimate_bartlett(ev, 0.5, 0.1, cfg, triangle, epanechnikov)

    def test_strict_feasibility(self, triangle, epanechnikov):
        ev = lh.EventSeries(np.array([5000.0]), 1e4)
        cfg = lh.EstimatorConfig(b1=0.15, b2=0.05)
        with pytest.raises(FeasibilityError):
            lh.estimate_bartlett(ev, 0.02, 0.1, cfg, triangle, epanechnikov)

    def test_refinement_guard_trips_on_absurd_tolerance(self, poisson_model, triangle, epanechnikov):
        ev = lh.simulate_ls_hawkes(poisson_model, 1e4, lh.SimulationConfig(seed=10))
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.05, refine_rtol=1e-14)
        with pytest.raises(ResolutionError):
            lh.estimate_bartlett(ev, 0.5, 0.3, cfg, triangle, epanechnikov)


class TestEstimateTfGrid:
    def test_single_cell_equals_single_call(self, poisson_model, triangle, epanechnikov):
        ev = lh.simulate_ls_hawkes(poisson_model, 1e4, lh.SimulationConfig(seed=11))
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.05)
        grid = lh.estimate_tf_grid(ev, [0.5], [0.1], cfg, triangle, epanechnikov)
        single = lh.estimate_bartlett(ev, 0.5, 0.1, cfg, triangle, epanechnikov)
        assert grid.values[0, 0] == single

    def test_infeasible_rows_are_nan(self, poisson_model, triangle, epanechnikov):
        ev = lh.simulate_ls_hawkes(poisson_model, 1e4, lh.SimulationConfig(seed=12))
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.05)
        grid = lh.estimate_tf_grid(ev, [0.01, 0.5, 0.99], [0.0, 0.1], cfg, triangle, epanechnikov)
        assert np.all(np.isnan(grid.values[0]))
        assert np.all(np.isnan(grid.values[2]))
        assert np.all(np.isfinite(grid.values[1]))

    def test_deterministic_reevaluation(self, poisson_model, triangle, epanechnikov):
        ev = lh.simulate_ls_hawkes(poisson_model, 1e4, lh.SimulationConfig(seed=13))
        cfg = lh.EstimatorConfig(b1=0.1, b2=0.05)
        g1 = lh.estimate_tf_grid(ev, [0.3, 0.5], [0.0, 0.1, 0.2], cfg, triangle, epanechnikov)
        g2 = lh.estimate_tf_grid(ev, [0.3, 0.5], [0.0, 0.1, 0.2], cfg, triangle, epanechnikov)
        assert np.array_equal(g1.values, g2.values)

    def test_poisson_grid_flat(self, poisson_model, triangle, epanechnikov):
        # averaged over replicates the spectrum is flat across frequencies
        cfg = lh.EstimatorConfig(b1=0.15, b2=0.06, refine_check=False)
        freqs = [0.05, 0.1, 0.2, 0.4]
        acc = np.zeros((1, len(freqs)))
        reps = 60
        for r in range(reps):
            ev = lh.simulate_ls_hawkes(poisson_model, 5000.0, lh.SimulationConfig(seed=lh.derive_seed(201, r)))
            acc += lh.estimate_tf_grid(ev, [0.5], freqs, cfg, triangle, epanechnikov).values
        mean = acc / reps
        assert float(mean.max() / mean.min()) < 1.5

    def test_grid_kind_validation(self):
        with pytest.raises(ValueError):
            lh.TFGrid(times=np.array([0.5]), freqs=np.array([0.1]), values=np.zeros((2, 1)))
        with pytest.raises(ValueError):
            lh.TFGrid(times=np.array([0.5]), freqs=np.array([0.1]), values=np.array([[-1.0]]))
