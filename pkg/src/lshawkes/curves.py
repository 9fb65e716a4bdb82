"""Parameter curves over absolute (rescaled) time.

A curve maps absolute time u = t/T to a scalar parameter value (baseline
intensity, branching ratio, decay rate, ...).  Four forms are supported:

* ``constant``         -- value
* ``sinusoidal``       -- offset + amplitude * sin(2*pi*cycles*u + phase)
* ``piecewise-linear`` -- linear interpolation between knots, clamped outside
* ``sampled-table``    -- same interpolation, constructed from a sampled grid

Curves are immutable and evaluate vectorized.  Outside the knot range,
piecewise forms extend with their edge values so that every curve is defined
on the whole real line (processes are simulated with a burn-in before u = 0).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Integer codes shared with the numba simulation core.
CURVE_CONSTANT = 0
CURVE_SINUSOIDAL = 1
CURVE_PWLINEAR = 2
CURVE_TABLE = 3

_FORM_CODES = {
    "constant": CURVE_CONSTANT,
    "sinusoidal": CURVE_SINUSOIDAL,
    "piecewise-linear": CURVE_PWLINEAR,
    "sampled-table": CURVE_TABLE,
}
_CODE_FORMS = {v: k for k, v in _FORM_CODES.items()}

_EMPTY = np.empty(0, dtype=np.float64)


@dataclass(frozen=True)
class Curve:
    """Immutable scalar curve u -> value."""

    form: str
    coeffs: np.ndarray = field(default_factory=lambda: _EMPTY)
    knots: np.ndarray = field(default_factory=lambda: _EMPTY)
    values: np.ndarray = field(default_factory=lambda: _EMPTY)

    def __post_init__(self):
        if self.form not in _FORM_CODES:
            raise ValueError(f"unknown curve form {self.form!r}")
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=np.float64))
        object.__setattr__(self, "knots", np.asarray(self.knots, dtype=np.float64))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.form in ("piecewise-linear", "sampled-table"):
            if self.knots.size < 2 or self.knots.size != self.values.size:
                raise ValueError("piecewise curve needs matching knots/values, >= 2 points")
            if np.any(np.diff(self.knots) <= 0):
                raise ValueError("curve knots must be strictly increasing")

    def __call__(self, u):
        u = np.asarray(u, dtype=np.float64)
        if self.form == "constant":
            out = np.full_like(u, self.coeffs[0])
        elif self.form == "sinusoidal":
            off, amp, cyc, ph = self.coeffs
            out = off + amp * np.sin(2.0 * np.pi * cyc * u + ph)
        else:
            out = np.interp(u, self.knots, self.values)
        return out if out.ndim else float(out)

    # -- exact range ------------------------------------------------------

    def bounds(self) -> tuple[float, float]:
        """Exact (inf, sup) of the curve over the real line."""
        if self.form == "constant":
            v = float(self.coeffs[0])
            return v, v
        if self.form == "sinusoidal":
            off, amp = float(self.coeffs[0]), abs(float(self.coeffs[1]))
            return off - amp, off + amp
        return float(self.values.min()), float(self.values.max())

    def holder_constant(self, beta: float, lo: float = -1.0, hi: float = 2.0, n: int = 2048) -> float:
        """Numeric Hoelder constant sup |f(v)-f(u)| / |v-u|**beta on a pair grid.

        A finite-sample surrogate: exact only for constant curves.
        """
        if self.form == "constant":
            return 0.0
        u = np.linspace(lo, hi, n)
        f = self(u)
        worst = 0.0
        for lag in (1, 2, 4, 16, 64, 256):
            if lag >= n:
                break
            du = u[lag:] - u[:-lag]
            ratio = np.abs(f[lag:] - f[:-lag]) / du**beta
            worst = max(worst, float(ratio.max()))
        return worst

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        if self.form == "constant":
            params = {"value": float(self.coeffs[0])}
        elif self.form == "sinusoidal":
            params = dict(zip(("offset", "amplitude", "cycles", "phase"), map(float, self.coeffs)))
        else:
            params = {"knots": self.knots.tolist(), "values": self.values.tolist()}
        return {"form": self.form, "params": params}

    @staticmethod
    def from_dict(d: dict) -> "Curve":
        form = d["form"]
        params = d.get("params", {})
        if form == "constant":
            return constant(params["value"])
        if form == "sinusoidal":
            return sinusoidal(
                params.get("offset", 0.0),
                params.get("amplitude", 0.0),
                params.get("cycles", 1.0),
                params.get("phase", 0.0),
            )
        return Curve(form, knots=np.asarray(params["knots"]), values=np.asarray(params["values"]))

    def encode(self) -> tuple[int, np.ndarray, np.ndarray, np.ndarray]:
        """(code, coeffs, knots, values) for the numba simulation core."""
        return _FORM_CODES[self.form], self.coeffs, self.knots, self.values


def constant(value: float) -> Curve:
    return Curve("constant", coeffs=np.array([float(value)]))


def sinusoidal(offset: float, amplitude: float, cycles: float = 1.0, phase: float = 0.0) -> Curve:
    return Curve("sinusoidal", coeffs=np.array([offset, amplitude, cycles, phase], dtype=np.float64))


def piecewise_linear(knots, values) -> Curve:
    return Curve("piecewise-linear", knots=np.asarray(knots), values=np.asarray(values))


def sampled_table(grid, values) -> Curve:
    return Curve("sampled-table", knots=np.asarray(grid), values=np.asarray(values))


def as_curve(obj) -> Curve:
    """Coerce a Curve, a number, or a curve dict into a Curve."""
    if isinstance(obj, Curve):
        return obj
    if isinstance(obj, dict):
        return Curve.from_dict(obj)
    return constant(float(obj))
