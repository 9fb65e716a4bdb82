"""Locally stationary Hawkes models and their population quantities.

A model is a pair: a baseline (immigrant) intensity curve ``lambda_c(u)`` and
a fertility family ``p(s; u)`` indexed by absolute time u, together with a
smoothness exponent beta.  All first/second order population quantities are
closed-form:

* local mean density          m1(u) = lambda_c(u) / (1 - zeta(u))
* local Bartlett density      gamma(u; w) = m1(u)/(2*pi) * |1 - phat(w; u)|^-2
* baseline identification     lambda_c(u) = m1 * sqrt(m1 / (2*pi*gamma(u;0)))

where zeta(u) = int p(s; u) ds is the branching ratio and phat the Fourier
transform of p in its first argument.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .curves import Curve, as_curve, constant
from .errors import ModelError, QuadratureError
from .kernels import TWO_PI, FreqKernel

FAMILY_ZERO = 0
FAMILY_EXPONENTIAL = 1
FAMILY_GAMMA = 2
FAMILY_TABLE = 3

_FAMILY_CODES = {
    "zero": FAMILY_ZERO,
    "exponential": FAMILY_EXPONENTIAL,
    "gamma-shape": FAMILY_GAMMA,
    "sampled-table": FAMILY_TABLE,
}

_EMPTY = np.empty(0, dtype=np.float64)
_EMPTY2 = np.empty((0, 0), dtype=np.float64)

#: Safety inflation applied to numerically derived envelope constants.
_ENVELOPE_MARGIN = 1.0001


# ---------------------------------------------------------------------------
# Baseline
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BaselineCurve:
    """Immigrant intensity curve lambda_c(u), events per unit real time."""

    curve: Curve
    sup_bound: float = 0.0
    holder_beta: float = 1.0
    holder_const: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.holder_beta <= 1.0):
            raise ModelError("holder_beta must lie in (0, 1]")
        lo, hi = self.curve.bounds()
        if lo < 0:
            raise ModelError(f"baseline takes negative values (min {lo})")
        if self.sup_bound <= 0.0:
            object.__setattr__(self, "sup_bound", hi)
        if self.holder_const <= 0.0:
            object.__setattr__(
                self, "holder_const", self.curve.holder_constant(self.holder_beta) * 1.05 + 1e-12
            )

    def __call__(self, u):
        return self.curve(u)


def baseline(curve, sup_bound: float = 0.0, holder_beta: float = 1.0, holder_const: float = 0.0) -> BaselineCurve:
    return BaselineCurve(as_curve(curve), sup_bound, holder_beta, holder_const)


# ---------------------------------------------------------------------------
# Fertility families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FertilityFamily:
    """Time-varying fertility function p(s; u), supported on s >= 0.

    ``zeta_curve`` is the branching ratio zeta(u) = int p(s; u) ds.  The pair
    (tail_rate, tail_const) declares the exponential envelope
    p(s; u) <= tail_const * exp(-tail_rate * s); the thinning sampler uses it
    as its dominating excitation, so it must genuinely majorize p.
    """

    family: str
    zeta_curve: Curve = field(default_factory=lambda: constant(0.0))
    decay: Curve = field(default_factory=lambda: constant(1.0))
    shape: int = 1
    s_grid: np.ndarray = field(default_factory=lambda: _EMPTY)
    u_grid: np.ndarray = field(default_factory=lambda: _EMPTY)
    table: np.ndarray = field(default_factory=lambda: _EMPTY2)
    tail_rate: float = 0.0
    tail_const: float = 0.0
    holder_envelope_l1: float = 0.0

    def __post_init__(self):
        if self.family not in _FAMILY_CODES:
            raise ModelError(f"unknown fertility family {self.family!r}")
        if self.family == "gamma-shape" and (self.shape < 1 or self.shape != int(self.shape)):
            raise ModelError("gamma-shape fertility needs an integer shape >= 1")
        if self.family == "sampled-table":
            s = np.asarray(self.s_grid, dtype=np.float64)
            u = np.asarray(self.u_grid, dtype=np.float64)
            tbl = np.asarray(self.table, dtype=np.float64)
            if tbl.shape != (s.size, u.size):
                raise ModelError("fertility table must be shaped (len(s_grid), len(u_grid))")
            if s[0] < 0:
                raise ModelError("fertility table s_grid must start at s >= 0 (causality)")
            if np.any(tbl < 0):
                raise ModelError("fertility table must be nonnegative")
            object.__setattr__(self, "s_grid", s)
            object.__setattr__(self, "u_grid", u)
            object.__setattr__(self, "table", tbl)
            # branching ratio derived from the table itself
            zeta_vals = np.trapezoid(tbl, s, axis=0)
            object.__setattr__(self, "zeta_curve", Curve("sampled-table", knots=u, values=zeta_vals))
        if self.tail_rate <= 0.0 or self.tail_const <= 0.0:
            d, c = self._derive_envelope()
            object.__setattr__(self, "tail_rate", d)
            object.__setattr__(self, "tail_const", c)

    # -- envelope -----------------------------------------------------------

    def _derive_envelope(self) -> tuple[float, float]:
        ug = np.linspace(-0.5, 1.5, 513)
        if self.family == "zero":
            return 1.0, 1e-300
        zeta = np.asarray(self.zeta_curve(ug))
        if self.family == "exponential":
            delta = np.asarray(self.decay(ug))
            d = float(delta.min())
            return d, float((zeta * delta).max()) * _ENVELOPE_MARGIN
        if self.family == "gamma-shape":
            delta = np.asarray(self.decay(ug))
            n = self.shape
            d = 0.5 * float(delta.min())
            fact = math.factorial(n - 1)
            if n == 1:
                peak = zeta * delta**n / fact
            else:
                peak = zeta * delta**n / fact * ((n - 1) / (np.e * (delta - d))) ** (n - 1)
            return d, float(peak.max()) * _ENVELOPE_MARGIN
        # sampled table: compact support on [0, s_max]
        s_max = float(self.s_grid[-1])
        d = 3.0 / max(s_max, 1e-12)
        c = float((self.table * np.exp(d * self.s_grid)[:, None]).max()) * _ENVELOPE_MARGIN
        return d, max(c, 1e-300)

    def envelope(self, s):
        """Declared dominating envelope tail_const * exp(-tail_rate * s), s >= 0."""
        s = np.asarray(s, dtype=np.float64)
        return np.where(s >= 0, self.tail_const * np.exp(-self.tail_rate * np.maximum(s, 0.0)), 0.0)

    # -- evaluation -----------------------------------------------------------

    def zeta(self, u):
        """Branching ratio zeta(u) = int p(s; u) ds."""
        return self.zeta_curve(u)

    def density(self, s, u):
        """p(s; u), vectorized over s for a scalar absolute time u."""
        s = np.asarray(s, dtype=np.float64)
        if self.family == "zero":
            out = np.zeros_like(s)
            return out if out.ndim else float(out)
        pos = s >= 0
        out = np.zeros_like(s, dtype=np.float64)
        if self.family == "exponential":
            z, dl = float(self.zeta_curve(u)), float(self.decay(u))
            out[pos] = z * dl * np.exp(-dl * s[pos])
        elif self.family == "gamma-shape":
            z, dl, n = float(self.zeta_curve(u)), float(self.decay(u)), self.shape
            out[pos] = z * dl**n * s[pos] ** (n - 1) * np.exp(-dl * s[pos]) / math.factorial(n - 1)
        else:
            uc = float(np.clip(u, self.u_grid[0], self.u_grid[-1]))
            j = int(np.searchsorted(self.u_grid, uc, side="right") - 1)
            j = min(max(j, 0), self.u_grid.size - 2)
            w = 0.0 if self.u_grid[j + 1] == self.u_grid[j] else (uc - self.u_grid[j]) / (
                self.u_grid[j + 1] - self.u_grid[j]
            )
            col = (1.0 - w) * self.table[:, j] + w * self.table[:, j + 1]
            out[pos] = np.interp(s[pos], self.s_grid, col, left=0.0, right=0.0)
        return out if out.ndim else float(out)

    def ft(self, omega, u):
        """phat(w; u) = int p(s; u) exp(-i w s) ds.

        Closed form for the zero/exponential/gamma families; trapezoid over
        the sampled grid for table families, with a resolution guard on w.
        """
        omega = np.asarray(omega, dtype=np.float64)
        scalar = omega.ndim == 0
        if self.family == "zero":
            out = np.zeros(omega.shape, dtype=np.complex128)
            return complex(out) if scalar else out
        if self.family == "exponential":
            z, dl = float(self.zeta_curve(u)), float(self.decay(u))
            out = z * dl / (dl + 1j * omega)
            return complex(out) if scalar else out
        if self.family == "gamma-shape":
            z, dl = float(self.zeta_curve(u)), float(self.decay(u))
            out = z * (dl / (dl + 1j * omega)) ** self.shape
            return complex(out) if scalar else out
        ds = float(np.max(np.diff(self.s_grid)))
        wmax = float(np.max(np.abs(omega)))
        if wmax * ds > np.pi / 4.0:
            raise QuadratureError(
                f"fertility table too coarse for omega={wmax:g}: "
                f"step {ds:g} exceeds the pi/4 phase-per-sample guard"
            )
        # trapezoid on the interpolant at 10x and 30x the table resolution;
        # agreement between the two levels guards convergence
        def level(mult: int):
            s = np.linspace(self.s_grid[0], self.s_grid[-1], mult * (self.s_grid.size - 1) + 1)
            p = self.density(s, u)
            return np.trapezoid(np.exp(-1j * np.outer(np.atleast_1d(omega), s)) * p, s, axis=1)

        fine = level(10)
        finer = level(30)
        if np.max(np.abs(finer - fine)) > 1e-8 + 1e-4 * np.max(np.abs(finer)):
            raise QuadratureError("fertility table quadrature failed its 10x refinement check")
        return finer[0] if omega.ndim == 0 else finer


def zero_fertility() -> FertilityFamily:
    return FertilityFamily("zero")


def exponential_fertility(zeta, decay=1.0) -> FertilityFamily:
    return FertilityFamily("exponential", zeta_curve=as_curve(zeta), decay=as_curve(decay))


def gamma_fertility(zeta, decay=1.0, shape: int = 2) -> FertilityFamily:
    return FertilityFamily("gamma-shape", zeta_curve=as_curve(zeta), decay=as_curve(decay), shape=int(shape))


def table_fertility(s_grid, u_grid, table) -> FertilityFamily:
    return FertilityFamily(
        "sampled-table",
        s_grid=np.asarray(s_grid, dtype=np.float64),
        u_grid=np.asarray(u_grid, dtype=np.float64),
        table=np.asarray(table, dtype=np.float64),
    )


# ---------------------------------------------------------------------------
# Model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LsHawkesModel:
    """Locally stationary Hawkes model: baseline + fertility + smoothness."""

    baseline: BaselineCurve
    fertility: FertilityFamily
    beta: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ModelError("smoothness exponent beta must lie in (0, 1]")

    def frozen_at(self, u: float) -> "LsHawkesModel":
        """Stationary comparison model with parameters frozen at absolute time u."""
        lam = float(self.baseline(u))
        fert = self.fertility
        if fert.family == "zero":
            frozen_fert = zero_fertility()
        elif fert.family in ("exponential", "gamma-shape"):
            frozen_fert = FertilityFamily(
                fert.family,
                zeta_curve=constant(float(fert.zeta(u))),
                decay=constant(float(fert.decay(u))),
                shape=fert.shape,
                tail_rate=fert.tail_rate,
                tail_const=fert.tail_const,
            )
        else:
            col = fert.density(fert.s_grid, u)
            frozen_fert = FertilityFamily(
                "sampled-table",
                s_grid=fert.s_grid,
                u_grid=np.array([0.0, 1.0]),
                table=np.column_stack([col, col]),
                tail_rate=fert.tail_rate,
                tail_const=fert.tail_const,
            )
        return LsHawkesModel(
            baseline=BaselineCurve(
                constant(lam), sup_bound=lam if lam > 0 else 1e-300,
                holder_beta=self.baseline.holder_beta, holder_const=1e-300,
            ),
            fertility=frozen_fert,
            beta=self.beta,
        )


# ---------------------------------------------------------------------------
# Population quantities
# ---------------------------------------------------------------------------


def local_mean_density(model: LsHawkesModel, u):
    """m1(u) = lambda_c(u) / (1 - zeta(u)), events per unit real time."""
    lam = np.asarray(model.baseline(u), dtype=np.float64)
    zeta = np.asarray(model.fertility.zeta(u), dtype=np.float64)
    if np.any(zeta >= 1.0):
        raise ModelError(f"branching ratio >= 1 at u={u}: mean density undefined")
    out = lam / (1.0 - zeta)
    return out if out.ndim else float(out)


def fertility_ft(model: LsHawkesModel, u: float, omega):
    """Fourier transform of the fertility function at absolute time u."""
    return model.fertility.ft(omega, u)


def local_bartlett(model: LsHawkesModel, u: float, omega):
    """Local Bartlett spectral density gamma(u; w) = m1(u)/(2 pi) |1 - phat(w; u)|^-2."""
    m1 = local_mean_density(model, u)
    phat = model.fertility.ft(omega, u)
    out = (m1 / TWO_PI) / np.abs(1.0 - phat) ** 2
    return out if np.ndim(out) else float(out)


def regularized_bartlett(
    model: LsHawkesModel,
    u0: float,
    omega0: float,
    b2: float,
    q: FreqKernel,
    rtol: float = 1e-9,
) -> float:
    """Frequency-smoothed target int |Q(x)|^2 gamma(u0; omega0 + b2 x) dx.

    The weight |Q((w - w0)/b2)|^2 / b2 has unit mass, so a flat (Poisson)
    spectrum is reproduced exactly for any b2, and the value converges to
    the pointwise density as b2 -> 0.
    """
    if b2 <= 0:
        raise ValueError("b2 must be positive")

    def integrand(x):
        return np.abs(q.ft(x)) ** 2 * local_bartlett(model, u0, omega0 + b2 * x)

    nodes, weights = np.polynomial.legendre.leggauss(16)

    def composite(half_width: float, n_panels: int) -> float:
        edges = np.linspace(-half_width, half_width, n_panels + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])
        half = 0.5 * (edges[1] - edges[0])
        x = (mid[:, None] + half * nodes[None, :]).ravel()
        return float(np.sum(integrand(x).reshape(n_panels, -1) @ weights) * half)

    def converged_panels(half_width: float) -> float:
        # ~2 panels per unit of x resolves both the |Q|^2 oscillation and
        # the gamma variation (scale 1/b2 in x); double until stable.
        n = max(128, int(2 * half_width))
        prev = composite(half_width, n)
        for _ in range(5):
            n *= 2
            cur = composite(half_width, n)
            if abs(cur - prev) <= 0.25 * rtol * max(abs(cur), 1e-300):
                return cur
            prev = cur
        raise QuadratureError("regularized_bartlett panel refinement did not converge")

    # |Q(x)|^2 decays at least like x^-4 for admissible kernels; widen the
    # integration window until the added tail mass is below tolerance.
    half_width = 64.0
    prev = converged_panels(half_width)
    for _ in range(5):
        half_width *= 4.0
        cur = converged_panels(half_width)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300):
            return float(cur)
        prev = cur
    raise QuadratureError("regularized_bartlett tail truncation did not converge")


def identify_baseline(m1: float, gamma_at_zero: float) -> float:
    """Recover lambda_c from (m1, gamma(u; 0)): m1 * sqrt(m1 / (2 pi gamma(0)))."""
    if m1 < 0:
        raise ValueError("mean density must be nonnegative")
    if m1 == 0.0:
        return 0.0
    if gamma_at_zero <= 0:
        raise ValueError("gamma(u; 0) must be strictly positive")
    return float(m1 * np.sqrt(m1 / (TWO_PI * gamma_at_zero)))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    worst: float
    bound: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> ConditionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            lines.append(f"[{status}] {c.name}: worst {c.worst:.6g} vs bound {c.bound:.6g} {c.detail}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def validate_model(model: LsHawkesModel, grid_resolution: int = 64) -> ValidationReport:
    """Numerically check the structural conditions of a model.

    All checks are finite-sample: evaluations on (s, u) grids provide
    evidence, not proof.  Failures are reported, not raised.
    """
    if grid_resolution < 16:
        raise ValueError("grid_resolution must be >= 16")
    n = int(grid_resolution)
    ug = np.linspace(-0.25, 1.25, 4 * n + 1)
    fert = model.fertility
    checks = []

    # subcriticality: sup_u zeta(u) < 1
    zeta_sup = float(np.max(fert.zeta(ug)))
    checks.append(ConditionCheck("subcriticality", zeta_sup < 1.0, zeta_sup, 1.0, "sup zeta(u)"))

    # baseline bounded by its declared sup and nonnegative
    lam = np.asarray(model.baseline(ug), dtype=np.float64)
    lam_max, lam_min = float(lam.max()), float(lam.min())
    checks.append(
        ConditionCheck(
            "baseline-bounded",
            lam_max <= model.baseline.sup_bound * (1 + 1e-12) and lam_min >= 0.0,
            lam_max,
            model.baseline.sup_bound,
            "sup lambda_c(u)",
        )
    )

    # causal support: p(s; u) = 0 for s < 0
    s_neg = np.linspace(-5.0, -1e-9, n)
    worst_neg = max(float(np.max(np.abs(fert.density(s_neg, u)))) for u in ug[:: max(1, len(ug) // 16)])
    checks.append(ConditionCheck("causal-support", worst_neg == 0.0, worst_neg, 0.0, "sup p(s<0; u)"))

    # exponential envelope p(s; u) <= tail_const exp(-d s)
    horizon = 40.0 / fert.tail_rate if fert.family != "zero" else 1.0
    sg = np.linspace(0.0, horizon, 8 * n + 1)
    env = fert.envelope(sg)
    worst_ratio = 0.0
    for u in ug[:: max(1, len(ug) // 32)]:
        p = np.asarray(fert.density(sg, u))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(env > 0, p / np.maximum(env, 1e-300), np.where(p > 0, np.inf, 0.0))
        worst_ratio = max(worst_ratio, float(np.max(ratio)))
    checks.append(
        ConditionCheck("exponential-envelope", worst_ratio <= 1.0 + 1e-9, worst_ratio, 1.0, "sup p/envelope")
    )

    # Hoelder smoothness of the baseline on sampled pairs
    beta_b = model.baseline.holder_beta
    worst_h = 0.0
    for lag in (1, 3, 9, 27):
        if lag >= ug.size:
            break
        du = ug[lag:] - ug[:-lag]
        worst_h = max(worst_h, float(np.max(np.abs(lam[lag:] - lam[:-lag]) / du**beta_b)))
    checks.append(
        ConditionCheck(
            "baseline-holder",
            worst_h <= model.baseline.holder_const * (1 + 1e-9) + 1e-12,
            worst_h,
            model.baseline.holder_const,
            f"beta={beta_b:g}",
        )
    )

    # Hoelder smoothness of the fertility in u: L1 norm of the increment ratio
    if fert.family == "zero":
        checks.append(ConditionCheck("fertility-holder", True, 0.0, 0.0, "zero fertility"))
    else:
        sgrid = np.linspace(0.0, horizon, 4 * n + 1)
        upairs = ug[:: max(1, len(ug) // 16)]
        worst_l1 = 0.0
        for i in range(len(upairs) - 1):
            u1, u2 = float(upairs[i]), float(upairs[i + 1])
            dp = np.abs(fert.density(sgrid, u2) - fert.density(sgrid, u1))
            worst_l1 = max(worst_l1, float(np.trapezoid(dp, sgrid)) / abs(u2 - u1) ** model.beta)
        bound = fert.holder_envelope_l1 if fert.holder_envelope_l1 > 0 else worst_l1 * 1.05 + 1e-9
        checks.append(
            ConditionCheck(
                "fertility-holder", worst_l1 <= bound * (1 + 1e-9), worst_l1, bound, f"beta={model.beta:g}"
            )
        )

    return ValidationReport(checks=tuple(checks))


# ---------------------------------------------------------------------------
# Model specification files (JSON)
# ---------------------------------------------------------------------------


def model_to_dict(model: LsHawkesModel) -> dict:
    fert = model.fertility
    fd: dict = {
        "family": fert.family,
        "zeta_curve": fert.zeta_curve.to_dict(),
        "params": {},
        "tail": {"d": fert.tail_rate, "const": fert.tail_const},
    }
    if fert.family in ("exponential", "gamma-shape"):
        fd["params"]["decay"] = fert.decay.to_dict()
    if fert.family == "gamma-shape":
        fd["params"]["shape"] = fert.shape
    if fert.family == "sampled-table":
        fd["params"]["s_grid"] = fert.s_grid.tolist()
        fd["params"]["u_grid"] = fert.u_grid.tolist()
        fd["params"]["values"] = fert.table.tolist()
    if fert.holder_envelope_l1 > 0:
        fd["holder_envelope_l1"] = fert.holder_envelope_l1
    return {
        "baseline": {
            **model.baseline.curve.to_dict(),
            "sup_bound": model.baseline.sup_bound,
            "holder": {"beta": model.baseline.holder_beta, "const": model.baseline.holder_const},
        },
        "fertility": fd,
        "beta": model.beta,
    }


def model_from_dict(d: dict) -> LsHawkesModel:
    b = d["baseline"]
    holder = b.get("holder", {})
    base = BaselineCurve(
        Curve.from_dict({"form": b["form"], "params": b["params"]}),
        sup_bound=float(b.get("sup_bound", 0.0)),
        holder_beta=float(holder.get("beta", d.get("beta", 1.0))),
        holder_const=float(holder.get("const", 0.0)),
    )
    f = d["fertility"]
    family = f["family"]
    params = f.get("params", {})
    tail = f.get("tail", {})
    kwargs = dict(
        tail_rate=float(tail.get("d", 0.0)),
        tail_const=float(tail.get("const", 0.0)),
        holder_envelope_l1=float(f.get("holder_envelope_l1", 0.0)),
    )
    if family == "zero":
        fert = FertilityFamily("zero", **kwargs)
    elif family in ("exponential", "gamma-shape"):
        fert = FertilityFamily(
            family,
            zeta_curve=as_curve(f.get("zeta_curve", 0.0)),
            decay=as_curve(params.get("decay", 1.0)),
            shape=int(params.get("shape", 1)),
            **kwargs,
        )
    elif family == "sampled-table":
        fert = FertilityFamily(
            "sampled-table",
            s_grid=np.asarray(params["s_grid"], dtype=np.float64),
            u_grid=np.asarray(params["u_grid"], dtype=np.float64),
            table=np.asarray(params["values"], dtype=np.float64),
            **kwargs,
        )
    else:
        raise ModelError(f"unknown fertility family {family!r}")
    return LsHawkesModel(baseline=base, fertility=fert, beta=float(d.get("beta", 1.0)))


def save_model(model: LsHawkesModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(model), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_model(path) -> LsHawkesModel:
    with open(path, "r", encoding="utf-8") as fh:
        return model_from_dict(json.load(fh))
