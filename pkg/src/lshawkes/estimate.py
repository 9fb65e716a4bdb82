"""Kernel estimators of the local mean density and local Bartlett spectrum.

Given events of a process observed on [0, T], an absolute time u0 and an
angular frequency w0, the two estimators are

    mhat(u0)      = sum_j w(t_j - T u0),
    ghat(u0; w0)  = E^[|S|^2; w] - |E^[S; w]|^2,

where ``w`` is the scaled time kernel (a probability density in t),
``K`` the modulated frequency kernel, ``S(t) = sum_j K(t_j - T u0 - t)``,
and ``E^[rho(S); w] = int rho(S(t)) w(t) dt``.

The t-integral is a composite trapezoid over the support of ``w`` whose node
spacing resolves both the modulation (<= pi / (8 w0)) and the envelope of K
(<= |Supp K| / 64), with at least ``quad_nodes`` nodes and an optional
2x-refinement self-check.  The discrete weights are renormalized to unit
mass, so the variance form ``sum a_i |S_i - mean|^2`` is exactly nonnegative.
Estimates at points violating the finite-observation support conditions are
rejected (strict mode) or flagged (warn mode); on grids they are reported as
missing values, never as zeros.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import BandwidthError, FeasibilityError, ResolutionError
from .kernels import (
    FreqKernel,
    ModulatedKernel,
    ScaledTimeKernel,
    TimeKernel,
    modulated_freq_kernel,
    scaled_time_kernel,
)
from .simulate import EventSeries


@dataclass(frozen=True)
class EstimatorConfig:
    """Bandwidths and quadrature controls for the Bartlett estimator."""

    b1: float
    b2: float
    quad_nodes: int = 64
    feasibility: str = "strict"  # strict | warn
    refine_check: bool = True
    refine_rtol: float = 2e-2

    def __post_init__(self):
        if not (0.0 < self.b1 <= 1.0) or not (0.0 < self.b2 <= 1.0):
            raise BandwidthError("bandwidths must lie in (0, 1]")
        if self.quad_nodes < 64:
            raise BandwidthError("quad_nodes must be >= 64")
        if self.feasibility not in ("strict", "warn"):
            raise ValueError("feasibility must be 'strict' or 'warn'")

    def require_admissible(self, horizon: float) -> None:
        if horizon * self.b1 * self.b2 < 1.0:
            raise BandwidthError(
                f"T*b1*b2 = {horizon * self.b1 * self.b2:g} < 1: inadmissible configuration"
            )


@dataclass(frozen=True)
class TFGrid:
    """Estimates over a time-frequency grid; NaN marks infeasible points."""

    times: np.ndarray
    freqs: np.ndarray
    values: np.ndarray
    kind: str = "bartlett"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        f = np.asarray(self.freqs, dtype=np.float64)
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (t.size, f.size):
            raise ValueError(f"values shape {v.shape} does not match axes ({t.size}, {f.size})")
        if self.kind not in ("mean-density", "bartlett", "poisson-normalized"):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        if self.kind == "bartlett" and np.any(v[np.isfinite(v)] < 0):
            raise ValueError("bartlett grid values must be nonnegative")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "freqs", f)
        object.__setattr__(self, "values", v)


# ---------------------------------------------------------------------------
# Feasibility (finite observation window)
# ---------------------------------------------------------------------------


def feasible_mean_density(u0: float, b1: float, k: TimeKernel) -> bool:
    lo, hi = k.support
    return 0.0 <= u0 + b1 * lo and u0 + b1 * hi <= 1.0


def feasible_bartlett(u0: float, b1: float, b2: float, horizon: float, k: TimeKernel, q: FreqKernel) -> bool:
    klo, khi = k.support
    qlo, qhi = q.support
    lo = u0 + b1 * klo + qlo / (horizon * b2)
    hi = u0 + b1 * khi + qhi / (horizon * b2)
    return 0.0 <= lo and hi <= 1.0


def check_feasibility(u0: float, b1: float, b2: float, horizon: float, k: TimeKernel, q: FreqKernel) -> bool:
    """Both support conditions: the mean-density one and the Bartlett one."""
    return feasible_mean_density(u0, b1, k) and feasible_bartlett(u0, b1, b2, horizon, k, q)


def _gate(feasible: bool, mode: str, what: str) -> None:
    if feasible:
        return
    if mode == "strict":
        raise FeasibilityError(f"{what}: estimation point violates the observation-window support condition")
    warnings.warn(f"{what}: support sticks out of [0, 1]; estimate is boundary-biased", stacklevel=3)


# ---------------------------------------------------------------------------
# Mean density
# ---------------------------------------------------------------------------


def estimate_mean_density(
    events: EventSeries,
    u0: float,
    b1: float,
    k: TimeKernel,
    feasibility: str = "strict",
) -> float:
    """mhat(u0) = sum_j k((t_j - T u0)/(T b1)) / (T b1); exact windowed sum."""
    _gate(feasible_mean_density(u0, b1, k), feasibility, "estimate_mean_density")
    T = events.horizon
    w = scaled_time_kernel(k, b1, T)
    lo, hi = w.support
    center = T * u0
    t = events.times
    sel = t[np.searchsorted(t, center + lo, "left"): np.searchsorted(t, center + hi, "right")]
    if sel.size == 0:
        return 0.0
    return float(np.sum(w(sel - center)))


# ---------------------------------------------------------------------------
# Shared t-integral machinery
# ---------------------------------------------------------------------------


def _t_grid(w: ScaledTimeKernel, omega_max: float, supp_k_len: float, quad_nodes: int,
            refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid nodes and unit-mass weights a_i over Supp(w).

    Spacing resolves the modulation at omega_max and the envelope of the
    modulated kernel; the node count is floored at quad_nodes.
    """
    lo, hi = w.support
    span = hi - lo
    dt = supp_k_len / 64.0
    if omega_max > 0:
        dt = min(dt, np.pi / (8.0 * omega_max))
    n_int = max(int(quad_nodes), int(np.ceil(span / dt)))
    n_int += n_int % 2  # keep a node at the support midpoint
    n_int *= refine
    t = np.linspace(lo, hi, n_int + 1)
    tau = np.full(n_int + 1, span / n_int)
    tau[0] *= 0.5
    tau[-1] *= 0.5
    a = tau * w(t)
    a /= a.sum()
    return t, a


def _segment_columns(x: np.ndarray, t: np.ndarray, lo_off: float, hi_off: float):
    """CSR structure of the node-by-event overlap pattern."""
    lo_idx = np.searchsorted(x, t + lo_off, "left")
    hi_idx = np.searchsorted(x, t + hi_off, "right")
    counts = hi_idx - lo_idx
    indptr = np.concatenate([[0], np.cumsum(counts)])
    total = int(indptr[-1])
    flat = np.arange(total) - np.repeat(indptr[:-1], counts)
    cols = np.repeat(lo_idx, counts) + flat
    rows_t = np.repeat(t, counts)
    return indptr.astype(np.int64), cols.astype(np.int64), rows_t


def _bartlett_values(times: np.ndarray, horizon: float, u0: float, omegas: np.ndarray,
                     b1: float, b2: float, k: TimeKernel, q: FreqKernel,
                     quad_nodes: int, refine: int = 1) -> np.ndarray:
    """ghat(u0; w) for every w in omegas, sharing the envelope matrix."""
    T = horizon
    w = scaled_time_kernel(k, b1, T)
    qlo, qhi = q.support
    k_lo, k_hi = qlo / b2, qhi / b2
    omega_max = float(np.max(np.abs(omegas))) if omegas.size else 0.0
    t, a = _t_grid(w, omega_max, k_hi - k_lo, quad_nodes, refine)

    center = T * u0
    wlo, whi = w.support
    ev = times[np.searchsorted(times, center + wlo + k_lo, "left"):
               np.searchsorted(times, center + whi + k_hi, "right")]
    x = ev - center
    out = np.empty(omegas.size, dtype=np.float64)
    if x.size == 0:
        out.fill(0.0)
        return out

    indptr, cols, rows_t = _segment_columns(x, t, k_lo, k_hi)
    env = q(b2 * (x[cols] - rows_t))
    mat = sp.csr_matrix((env, cols, indptr), shape=(t.size, x.size))
    sqrt_b2 = np.sqrt(b2)
    for i, w0 in enumerate(omegas):
        phase = np.exp(1j * w0 * x)
        s_vals = sqrt_b2 * np.exp(-1j * w0 * t) * (mat @ phase)
        mean = np.sum(a * s_vals)
        out[i] = float(np.sum(a * np.abs(s_vals - mean) ** 2))
    return out


def estimate_bartlett(
    events: EventSeries,
    u0: float,
    omega0: float,
    cfg: EstimatorConfig,
    k: TimeKernel,
    q: FreqKernel,
) -> float:
    """Local Bartlett spectrum estimate at (u0, omega0), always >= 0."""
    T = events.horizon
    cfg.require_admissible(T)
    _gate(feasible_bartlett(u0, cfg.b1, cfg.b2, T, k, q), cfg.feasibility, "estimate_bartlett")
    omegas = np.array([float(omega0)])
    val = _bartlett_values(events.times, T, u0, omegas, cfg.b1, cfg.b2, k, q, cfg.quad_nodes)[0]
    if cfg.refine_check:
        fine = _bartlett_values(events.times, T, u0, omegas, cfg.b1, cfg.b2, k, q, cfg.quad_nodes, refine=2)[0]
        if abs(val - fine) > cfg.refine_rtol * max(abs(fine), 1e-300):
            raise ResolutionError(
                f"t-integral failed its 2x refinement check at (u0={u0:g}, omega0={omega0:g}): "
                f"{val:g} vs {fine:g}; increase quad_nodes"
            )
    return float(val)


def estimate_tf_grid(
    events: EventSeries,
    times,
    freqs,
    cfg: EstimatorConfig,
    k: TimeKernel,
    q: FreqKernel,
    kind: str = "bartlett",
) -> TFGrid:
    """ghat over a time-frequency grid; infeasible rows are NaN, not zero.

    The support condition does not involve the frequency, so feasibility is
    decided per time point.  Each feasible row shares one envelope matrix
    across all frequencies and runs the refinement self-check at the most
    oscillatory frequency.
    """
    T = events.horizon
    cfg.require_admissible(T)
    times = np.asarray(times, dtype=np.float64)
    freqs = np.asarray(freqs, dtype=np.float64)
    values = np.full((times.size, freqs.size), np.nan)
    for i, u0 in enumerate(times):
        if not feasible_bartlett(u0, cfg.b1, cfg.b2, T, k, q):
            continue
        values[i] = _bartlett_values(events.times, T, u0, freqs, cfg.b1, cfg.b2, k, q, cfg.quad_nodes)
        if cfg.refine_check and freqs.size:
            j = int(np.argmax(np.abs(freqs)))
            fine = _bartlett_values(
                events.times, T, u0, freqs[j: j + 1], cfg.b1, cfg.b2, k, q, cfg.quad_nodes, refine=2
            )[0]
            if abs(values[i, j] - fine) > cfg.refine_rtol * max(abs(fine), 1e-300):
                raise ResolutionError(
                    f"t-integral failed its refinement check at u0={u0:g}; increase quad_nodes"
                )
    return TFGrid(times=times, freqs=freqs, values=values, kind=kind)


# ---------------------------------------------------------------------------
# Generic empirical moment
# ---------------------------------------------------------------------------


def _sum_f_over_events(f, x: np.ndarray, t: np.ndarray):
    """S(t_i) = sum_j f(x_j - t_i) for compactly supported f."""
    flo, fhi = f.support
    indptr, cols, rows_t = _segment_columns(x, t, flo, fhi)
    vals = f(x[cols] - rows_t)
    mat = sp.csr_matrix((vals, cols, indptr), shape=(t.size, x.size))
    return np.asarray(mat @ np.ones(x.size, dtype=vals.dtype))


_GL32 = np.polynomial.legendre.leggauss(32)


def convolve_at(f, w, points: np.ndarray, n_nodes: int = 512) -> np.ndarray:
    """(f * w)(x) = int f(x - t) w(t) dt, composite 32-point Gauss over Supp(w)."""
    nodes, weights = _GL32
    lo, hi = w.support
    n_panels = max(1, int(np.ceil(n_nodes / 32)))
    edges = np.linspace(lo, hi, n_panels + 1)
    half = 0.5 * (edges[1] - edges[0])
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half * nodes[None, :]).ravel()
    wt = half * np.tile(weights, n_panels) * w(t)
    vals = f(points[:, None] - t[None, :])
    return vals @ wt


def empirical_moment(
    events: EventSeries,
    f,
    w,
    rho: str = "linear",
    quad_nodes: int = 64,
    rtol: float = 1e-7,
    max_refine: int = 6,
):
    """E^[rho(N(f)); w] = int rho(sum_j f(t_j - t)) w(t) dt.

    ``f`` and ``w`` must be compactly supported callables exposing
    ``.support``.  rho is 'linear' or 'squared-modulus'.  The t-integral is
    refined by doubling until stable; failure raises ResolutionError.  For
    the linear moment the value is cross-checked against the exact identity
    N(f * w) evaluated with an independent per-event quadrature.
    """
    if rho not in ("linear", "squared-modulus"):
        raise ValueError("rho must be 'linear' or 'squared-modulus'")
    x = events.times
    wlo, whi = w.support
    flo, fhi = f.support
    x = x[np.searchsorted(x, wlo + flo, "left"): np.searchsorted(x, whi + fhi, "right")]
    if x.size == 0:
        return 0.0 if rho == "squared-modulus" else 0.0 + 0.0j

    span = whi - wlo
    n_int = max(int(quad_nodes), int(np.ceil(span / max((fhi - flo) / 64.0, 1e-12))))
    n_int += n_int % 2

    def evaluate(n):
        t = np.linspace(wlo, whi, n + 1)
        tau = np.full(n + 1, span / n)
        tau[0] *= 0.5
        tau[-1] *= 0.5
        s_vals = _sum_f_over_events(f, x, t)
        integrand = np.abs(s_vals) ** 2 if rho == "squared-modulus" else s_vals
        # the L1 mass sets the natural scale; the integral itself may cancel
        return np.sum(tau * w(t) * integrand), float(np.sum(tau * w(t) * np.abs(integrand)))

    prev, _ = evaluate(n_int)
    val = prev
    converged = False
    for _ in range(max_refine):
        n_int *= 2
        val, scale = evaluate(n_int)
        if abs(val - prev) <= rtol * max(abs(val), scale, 1e-12):
            converged = True
            break
        prev = val
    if not converged:
        raise ResolutionError("empirical_moment t-integral did not converge under refinement")

    if rho == "linear":
        ident = np.sum(convolve_at(f, w, x, n_nodes=max(512, n_int // 4)))
        if abs(val - ident) > 1e-6 * max(abs(ident), 1.0):
            raise ResolutionError(
                f"linear moment {val!r} disagrees with the convolution identity {ident!r}"
            )
        return ident
    return float(val.real) if np.iscomplexobj(val) else float(val)
