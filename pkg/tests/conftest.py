import numpy as np
import pytest

import lshawkes as lh

_acceptance_lines = []


def record_acceptance(line: str) -> None:
    _acceptance_lines.append(line)


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.line(line)


@pytest.fixture(scope="session")
def triangle():
    return lh.triangle_kernel()


@pytest.fixture(scope="session")
def epanechnikov():
    return lh.epanechnikov_kernel()


@pytest.fixture(scope="session")
def poisson_model():
    """Homogeneous Poisson, lambda = 1 (degenerate zero-fertility case)."""
    return lh.LsHawkesModel(lh.baseline(1.0), lh.zero_fertility())


@pytest.fixture(scope="session")
def stationary_exp_model():
    """Stationary exponential Hawkes: lambda_c = 1, zeta = 0.5, delta = 1."""
    return lh.LsHawkesModel(lh.baseline(1.0), lh.exponential_fertility(0.5, 1.0))


@pytest.fixture(scope="session")
def sinusoidal_model():
    """Time-varying baseline 1 + 0.5 sin(2 pi u), constant zeta = 0.4."""
    return lh.LsHawkesModel(
        lh.baseline(lh.sinusoidal(1.0, 0.5)), lh.exponential_fertility(0.4, 1.0)
    )


@pytest.fixture(scope="session")
def smooth_scan_model():
    """Exponential model whose spectrum is gently curved at omega = 1.

    Used for frequency-bias scans: with zeta = 0.3, delta = 3 the bandwidth
    window b2 <= 0.4 sits inside the quadratic-bias regime.
    """
    return lh.LsHawkesModel(lh.baseline(1.0), lh.exponential_fertility(0.3, 3.0))


def random_valid_model(rng: np.random.Generator) -> "lh.LsHawkesModel":
    """Random subcritical model drawn from the built-in closed-form families."""
    kind = rng.integers(0, 3)
    if rng.random() < 0.5:
        base = lh.baseline(float(rng.uniform(0.2, 3.0)))
    else:
        off = float(rng.uniform(0.5, 2.0))
        amp = float(rng.uniform(0.0, 0.8)) * off
        base = lh.baseline(lh.sinusoidal(off, amp, float(rng.integers(1, 3))))
    if kind == 0:
        fert = lh.zero_fertility()
    elif kind == 1:
        fert = lh.exponential_fertility(float(rng.uniform(0.05, 0.85)), float(rng.uniform(0.3, 4.0)))
    else:
        fert = lh.gamma_fertility(
            float(rng.uniform(0.05, 0.85)), float(rng.uniform(0.5, 4.0)), shape=int(rng.integers(1, 4))
        )
    return lh.LsHawkesModel(base, fert)
