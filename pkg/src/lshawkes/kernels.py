"""Smoothing kernels and their scaled/modulated variants.

Two kernel roles appear throughout the estimators:

* a *time kernel* ``k``: nonnegative, compactly supported, integrates to 1.
  Scaled to real time it becomes the weight
  ``w(t) = k(t/(T*b1)) / (T*b1)`` used to localize around an absolute time.
* a *frequency kernel* ``q``: bounded, compactly supported, normalized so
  that the squared modulus of its Fourier transform integrates to one,
  ``int |Q(w)|^2 dw = 1``.  Under the convention
  ``Q(w) = int q(t) exp(-i w t) dt`` this is equivalent to
  ``int q(t)^2 dt = 1/(2*pi)``.  With this mass convention the frequency
  weight ``|Q((w - w0)/b2)|^2 / b2`` is a probability density in ``w``, so
  smoothing a flat (Poisson) spectrum leaves it exactly unchanged.

Validators run at construction; downstream code may assume normalization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .errors import QuadratureError


def _quiet_quad(fn, lo, hi):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(fn, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-13)
    return val

TWO_PI = 2.0 * np.pi

_NORM_TOL = 1e-9


def _as_array_fn(fn, lo, hi):
    """Wrap fn so it evaluates vectorized and vanishes outside [lo, hi]."""

    def wrapped(x):
        x = np.asarray(x, dtype=np.float64)
        inside = (x >= lo) & (x <= hi)
        out = np.zeros(x.shape, dtype=np.result_type(np.float64, np.asarray(fn(np.atleast_1d(x)[:1])).dtype))
        if np.any(inside):
            out[inside] = fn(x[inside])
        return out if out.ndim else out[()]

    return wrapped


@dataclass(frozen=True)
class TimeKernel:
    """Nonnegative kernel with unit integral on a compact support."""

    fn: Callable = field(repr=False)
    support: tuple[float, float]
    name: str = "custom"

    def __call__(self, x):
        return self.fn(x)

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]


@dataclass(frozen=True)
class FreqKernel:
    """Frequency-localization kernel with unit Fourier-weight mass."""

    fn: Callable = field(repr=False)
    support: tuple[float, float]
    name: str = "custom"
    even: bool = True
    analytic_ft: Optional[Callable] = field(default=None, repr=False)

    def __call__(self, x):
        return self.fn(x)

    @property
    def width(self) -> float:
        return self.support[1] - self.support[0]

    def ft(self, omega):
        """Fourier transform Q(w) = int q(t) exp(-i w t) dt."""
        if self.analytic_ft is not None:
            return self.analytic_ft(omega)
        return freq_kernel_ft(self, omega)


def make_time_kernel(fn, support, name="custom") -> TimeKernel:
    """Build and validate a time kernel from a callable and its support."""
    lo, hi = float(support[0]), float(support[1])
    f = _as_array_fn(fn, lo, hi)
    mass = _quiet_quad(f, lo, hi)
    if abs(mass - 1.0) > _NORM_TOL:
        raise ValueError(f"time kernel {name!r}: integral is {mass!r}, expected 1")
    xs = np.linspace(lo, hi, 4097)
    vals = f(xs)
    if np.any(vals < -1e-12):
        raise ValueError(f"time kernel {name!r} takes negative values")
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"time kernel {name!r} is unbounded on its support")
    return TimeKernel(fn=f, support=(lo, hi), name=name)


def make_freq_kernel(fn, support, name="custom", even=True, analytic_ft=None) -> FreqKernel:
    """Build and validate a frequency kernel (weight-mass normalization)."""
    lo, hi = float(support[0]), float(support[1])
    f = _as_array_fn(fn, lo, hi)
    sqmass = _quiet_quad(lambda x: np.abs(f(x)) ** 2, lo, hi)
    if abs(sqmass - 1.0 / TWO_PI) > _NORM_TOL:
        raise ValueError(
            f"freq kernel {name!r}: int q^2 = {sqmass!r}, expected 1/(2*pi) = {1.0 / TWO_PI!r}"
        )
    xs = np.linspace(0.0, max(abs(lo), abs(hi)), 2049)
    if even and not np.allclose(f(xs), f(-xs), atol=1e-10):
        raise ValueError(f"freq kernel {name!r} declared even but is not symmetric")
    if not np.all(np.isfinite(f(np.linspace(lo, hi, 2049)))):
        raise ValueError(f"freq kernel {name!r} is unbounded on its support")
    return FreqKernel(fn=f, support=(lo, hi), name=name, even=even, analytic_ft=analytic_ft)


# ---------------------------------------------------------------------------
# Concrete kernels
# ---------------------------------------------------------------------------


def triangle_kernel() -> TimeKernel:
    """Triangle kernel on [-1/2, 1/2]: k(x) = max(2 - 4|x|, 0).

    The height 2 is the unique choice integrating to one on this support.
    """

    def k(x):
        x = np.asarray(x, dtype=np.float64)
        return np.maximum(2.0 - 4.0 * np.abs(x), 0.0)

    return make_time_kernel(k, (-0.5, 0.5), name="triangle")


#: Height constant of the weight-mass-normalized Epanechnikov kernel,
#: c = sqrt(15 / (16*pi)); solves c**2 * 8/15 = 1/(2*pi).
EPANECHNIKOV_HEIGHT = float(np.sqrt(15.0 / (16.0 * np.pi)))


def _epanechnikov_ft(omega):
    """Closed-form Fourier transform of the Epanechnikov kernel.

    Q(w) = 16 c (sin(w/2) - (w/2) cos(w/2)) / w^3, with a Taylor series
    near w = 0 to avoid cancellation.
    """
    omega = np.asarray(omega, dtype=np.float64)
    scalar = omega.ndim == 0
    w = np.atleast_1d(omega)
    out = np.empty_like(w)
    small = np.abs(w) < 1e-2
    x = 0.5 * w[small]
    # sin x - x cos x = x^3/3 * (1 - x^2/10 + x^4/280 - ...)
    out[small] = (2.0 * EPANECHNIKOV_HEIGHT / 3.0) * (1.0 - x**2 / 10.0 + x**4 / 280.0)
    wl = w[~small]
    xl = 0.5 * wl
    out[~small] = 16.0 * EPANECHNIKOV_HEIGHT * (np.sin(xl) - xl * np.cos(xl)) / wl**3
    res = out[0] if scalar else out
    return complex(res) if scalar else out.astype(np.complex128)


def epanechnikov_kernel() -> FreqKernel:
    """Epanechnikov kernel on [-1/2, 1/2], q(x) = c (1 - 4 x^2)_+.

    Normalized in weight mass rather than probability mass: the height is
    ``EPANECHNIKOV_HEIGHT`` so that int q^2 = 1/(2*pi).
    """

    def q(x):
        x = np.asarray(x, dtype=np.float64)
        return EPANECHNIKOV_HEIGHT * np.maximum(1.0 - 4.0 * x * x, 0.0)

    return make_freq_kernel(q, (-0.5, 0.5), name="epanechnikov", even=True, analytic_ft=_epanechnikov_ft)


# ---------------------------------------------------------------------------
# Scaling and modulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaledTimeKernel:
    """Real-time weight w(t) = k(t / (T*b1)) / (T*b1); integrates to 1."""

    kernel: TimeKernel
    b1: float
    horizon: float

    def __post_init__(self):
        if not (0.0 < self.b1 <= 1.0):
            raise ValueError("time bandwidth b1 must lie in (0, 1]")
        if self.horizon < 1.0:
            raise ValueError("horizon T must be >= 1")

    @property
    def scale(self) -> float:
        return self.horizon * self.b1

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.kernel.support
        return lo * self.scale, hi * self.scale

    def __call__(self, t):
        return self.kernel(np.asarray(t, dtype=np.float64) / self.scale) / self.scale


@dataclass(frozen=True)
class ModulatedKernel:
    """Complex kernel K(t) = sqrt(b2) * exp(i w0 t) * q(b2 t).

    Concentrates around frequency w0:
    |K^(w)|^2 = |Q((w - w0)/b2)|^2 / b2, a unit-mass weight in w.
    """

    kernel: FreqKernel
    b2: float
    omega0: float

    def __post_init__(self):
        if not (0.0 < self.b2 <= 1.0):
            raise ValueError("frequency bandwidth b2 must lie in (0, 1]")

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.kernel.support
        return lo / self.b2, hi / self.b2

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        return np.sqrt(self.b2) * np.exp(1j * self.omega0 * t) * self.kernel(self.b2 * t)

    def ft(self, omega):
        """Fourier transform: b2**-1/2 * Q((w - w0)/b2)."""
        omega = np.asarray(omega, dtype=np.float64)
        return self.kernel.ft((omega - self.omega0) / self.b2) / np.sqrt(self.b2)

    def ft_sqmod(self, omega):
        return np.abs(self.ft(omega)) ** 2


def scaled_time_kernel(k: TimeKernel, b1: float, horizon: float) -> ScaledTimeKernel:
    return ScaledTimeKernel(kernel=k, b1=float(b1), horizon=float(horizon))


def modulated_freq_kernel(q: FreqKernel, b2: float, omega0: float) -> ModulatedKernel:
    return ModulatedKernel(kernel=q, b2=float(b2), omega0=float(omega0))


# ---------------------------------------------------------------------------
# Fourier transform by quadrature
# ---------------------------------------------------------------------------

_leggauss_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _leggauss(n: int):
    if n not in _leggauss_cache:
        _leggauss_cache[n] = np.polynomial.legendre.leggauss(n)
    return _leggauss_cache[n]


def _ft_fixed(q: FreqKernel, omega: np.ndarray, n: int) -> np.ndarray:
    lo, hi = q.support
    nodes, weights = _leggauss(n)
    t = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
    w = 0.5 * (hi - lo) * weights
    vals = q(t) * w
    return np.exp(-1j * np.outer(omega, t)) @ vals


def freq_kernel_ft(q: FreqKernel, omega, rtol: float = 1e-9, atol: float = 1e-12):
    """Q(w) = int q(t) exp(-i w t) dt by Gauss-Legendre quadrature.

    Node count adapts to the phase span over the support; a doubling
    convergence guard raises QuadratureError if the values do not settle.
    """
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=np.float64))
    span = q.support[1] - q.support[0]
    phase = float(np.max(np.abs(omega_arr))) * span
    n = max(64, int(8 * np.ceil(phase / TWO_PI)) + 16)
    prev = _ft_fixed(q, omega_arr, n)
    for _ in range(6):
        n *= 2
        cur = _ft_fixed(q, omega_arr, n)
        if np.max(np.abs(cur - prev)) <= atol + rtol * max(1.0, float(np.max(np.abs(cur)))):
            return cur[0] if np.isscalar(omega) or np.asarray(omega).ndim == 0 else cur
        prev = cur
    raise QuadratureError("freq_kernel_ft did not converge; kernel too rough or |omega| too large")


# ---------------------------------------------------------------------------
# Kernels from sampled tables
# ---------------------------------------------------------------------------


def _interp_fn(xs, ys):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)

    def fn(x):
        return np.interp(np.asarray(x, dtype=np.float64), xs, ys, left=0.0, right=0.0)

    return fn


def time_kernel_from_table(xs, ys, name="table") -> TimeKernel:
    """Time kernel from (x, value) samples, renormalized to unit integral.

    Linear interpolation between samples; the trapezoid mass of the table is
    scaled out before validation, so any nonnegative sampled bump is accepted.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if np.any(ys < 0):
        raise ValueError("time kernel table must be nonnegative")
    mass = np.trapezoid(ys, xs)
    if mass <= 0:
        raise ValueError("time kernel table has zero mass")
    return make_time_kernel(_interp_fn(xs, ys / mass), (xs[0], xs[-1]), name=name)


def freq_kernel_from_table(xs, ys, name="table", even=None) -> FreqKernel:
    """Frequency kernel from samples, rescaled so that int q^2 = 1/(2*pi)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    # exact energy of the linear interpolant: per segment h (a^2 + a b + b^2)/3
    h = np.diff(xs)
    a, b = ys[:-1], ys[1:]
    sqmass = float(np.sum(h * (a * a + a * b + b * b) / 3.0))
    if sqmass <= 0:
        raise ValueError("freq kernel table has zero energy")
    ys = ys * np.sqrt(1.0 / (TWO_PI * sqmass))
    if even is None:
        # symmetric support and symmetric samples => declare even
        even = bool(
            np.isclose(xs[0], -xs[-1])
            and np.allclose(np.interp(np.abs(xs), xs, ys), np.interp(-np.abs(xs), xs, ys), atol=1e-9)
        )
    return make_freq_kernel(_interp_fn(xs, ys), (xs[0], xs[-1]), name=name, even=even)


def load_kernel_table(path):
    """Read a two-column CSV (x, value); '#' comments and a header row allowed."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                continue  # header row
    if len(rows) < 2:
        raise ValueError(f"kernel table {path!r} needs at least two numeric rows")
    arr = np.array(sorted(rows))
    return arr[:, 0], arr[:, 1]
