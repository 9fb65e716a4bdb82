"""Bandwidth schedules and admissibility checks.

The admissible region for (b1, b2, T) is

    T >= 1,   b1, b2 in (0, 1],   T * b1 * b2 >= 1,   b1 * ln(T) <= 1.

Balancing the squared bias terms b1**(2*beta) and b2**4 against the variance
term (T*b1*b2)**-1 yields the rate-optimal schedules

    b1 ~ T**(-2/(2+5*beta)),   b2 ~ T**(-beta/(2+5*beta)),

with mean-square error decaying like T**(-4*beta/(5*beta+2)).  For the mean
density alone the optimum is b1 ~ T**(-1/(2*beta+1)) with MSE rate
T**(-2*beta/(2*beta+1)).  Only rates are pinned down; the constants c1, c2
are user choices defaulting to 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BandwidthError


@dataclass(frozen=True)
class BandwidthPlan:
    b1: float
    b2: float
    horizon: float
    beta: float = 1.0
    c1: float = 1.0
    c2: float = 1.0

    def violations(self) -> list[str]:
        out = []
        if self.horizon < 1.0:
            out.append(f"T = {self.horizon:g} < 1")
        if not (0.0 < self.b1 <= 1.0) or not (0.0 < self.b2 <= 1.0):
            out.append(f"bandwidths ({self.b1:g}, {self.b2:g}) outside (0, 1]")
        if self.horizon * self.b1 * self.b2 < 1.0:
            out.append(f"T*b1*b2 = {self.horizon * self.b1 * self.b2:g} < 1")
        if self.b1 * np.log(self.horizon) > 1.0 + 1e-12:
            out.append(f"b1*ln(T) = {self.b1 * np.log(self.horizon):g} > 1")
        return out

    def check(self) -> "BandwidthPlan":
        bad = self.violations()
        if bad:
            raise BandwidthError("inadmissible bandwidth plan: " + "; ".join(bad))
        return self


def optimal_bandwidths(horizon: float, beta: float, c1: float = 1.0, c2: float = 1.0) -> BandwidthPlan:
    """Rate-optimal (b1, b2) for the Bartlett estimator, clamped to (0, 1]."""
    if horizon < 1.0:
        raise BandwidthError("horizon must be >= 1")
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    denom = 2.0 + 5.0 * beta
    b1 = min(1.0, c1 * horizon ** (-2.0 / denom))
    b2 = min(1.0, c2 * horizon ** (-beta / denom))
    return BandwidthPlan(b1=b1, b2=b2, horizon=float(horizon), beta=beta, c1=c1, c2=c2).check()


def mean_density_bandwidth(horizon: float, beta: float, c: float = 1.0) -> float:
    """Rate-optimal b1 for the mean-density estimator: c * T**(-1/(2*beta+1))."""
    if horizon < 1.0:
        raise BandwidthError("horizon must be >= 1")
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    return min(1.0, c * horizon ** (-1.0 / (2.0 * beta + 1.0)))


def predicted_mse_rate(beta: float) -> tuple[float, float]:
    """(mean-density exponent, Bartlett exponent) of the T-power MSE decay."""
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1]")
    return (-2.0 * beta / (2.0 * beta + 1.0), -4.0 * beta / (5.0 * beta + 2.0))
