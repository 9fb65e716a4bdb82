"""Event simulation for (locally stationary) Hawkes processes by thinning.

The conditional intensity of the process with horizon T is

    lambda_T(t) = lambda_c(t/T) + sum_{t_i < t} p(t - t_i; t/T),

which drives an Ogata-style rejection sampler: candidates are drawn from the
dominating rate ``sup(lambda_c) + tail_const * sum_i exp(-d (t - t_i))``
given by the model's declared exponential envelope, and accepted with
probability lambda_T / bound.  Simulation starts at ``-burn_in`` so that the
process near time 0 approximates its steady regime (the idealized process
lives on the whole real line); only events in [0, T] are returned.

Determinism: every run is a pure function of its seed.  Replicate streams
are derived with ``derive_seed(master_seed, *keys)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ._thinning import thinning_core
from .errors import ExplosionError, LsHawkesError, ModelError
from .model import LsHawkesModel, _FAMILY_CODES

_EMPTY = np.empty(0, dtype=np.float64)
_EMPTY2 = np.empty((0, 0), dtype=np.float64)


@dataclass(frozen=True)
class EventSeries:
    """Sorted event times on [0, horizon]."""

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=np.float64)
        object.__setattr__(self, "times", t)
        if self.horizon < 1.0:
            raise ValueError("horizon must be >= 1")
        if t.size:
            if np.any(np.diff(t) <= 0):
                raise ValueError("event times must be strictly increasing")
            if t[0] < 0 or t[-1] > self.horizon:
                raise ValueError("event times must lie within [0, horizon]")

    @property
    def n(self) -> int:
        return int(self.times.size)

    def count(self, lo: float, hi: float) -> int:
        """Number of events in (lo, hi]."""
        return int(np.searchsorted(self.times, hi, "right") - np.searchsorted(self.times, lo, "right"))

    def shifted(self, offset: float, horizon: float | None = None) -> "EventSeries":
        return EventSeries(self.times + offset, self.horizon if horizon is None else horizon)

    # -- serialization: one decimal event time per line ---------------------

    def to_csv(self, path, seed: int | None = None) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# horizon={float(self.horizon)!r}\n")
            if seed is not None:
                fh.write(f"# seed={seed}\n")
            for t in self.times:
                fh.write(f"{float(t)!r}\n")

    @staticmethod
    def from_csv(path) -> "EventSeries":
        horizon = None
        times = []
        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    if "horizon=" in line:
                        horizon = float(line.split("horizon=")[1])
                    continue
                times.append(float(line))
        if horizon is None:
            raise LsHawkesError("event file missing '# horizon=' header")
        return EventSeries(np.asarray(times), horizon)


@dataclass(frozen=True)
class SimulationConfig:
    """Sampler configuration.

    burn_in None resolves to five envelope e-foldings, 5 / tail_rate.
    history_epsilon truncates excitation contributions once the envelope
    drops below it, bounding the sliding-history window.
    """

    seed: int = 0
    burn_in: float | None = None
    history_epsilon: float = 1e-12
    max_events: int = 50_000_000

    def resolve_burn_in(self, model: LsHawkesModel) -> float:
        if self.burn_in is not None:
            return float(self.burn_in)
        if model.fertility.family == "zero":
            return 0.0
        return 5.0 / model.fertility.tail_rate


def derive_seed(master_seed: int, *keys) -> int:
    """Stable 64-bit stream seed from a master seed and mixed int/float keys."""
    ints = [int(master_seed) & 0xFFFFFFFFFFFFFFFF]
    for k in keys:
        if isinstance(k, (int, np.integer)):
            ints.append(int(k) & 0xFFFFFFFFFFFFFFFF)
        else:
            ints.append(int(np.float64(k).view(np.uint64)))
    return int(np.random.SeedSequence(ints).generate_state(1, dtype=np.uint64)[0])


def conditional_intensity(model: LsHawkesModel, horizon: float, history, t: float,
                          history_epsilon: float = 1e-12) -> float:
    """lambda_T(t) given past events; contributions below the envelope cutoff are dropped."""
    times = history.times if isinstance(history, EventSeries) else np.asarray(history, dtype=np.float64)
    if times.size and times[-1] >= t:
        raise ValueError("all history times must precede t")
    fert = model.fertility
    lam = float(model.baseline(t / horizon))
    if fert.family == "zero" or times.size == 0:
        return lam
    trunc = math.log(max(fert.tail_const / history_epsilon, 1.0)) / fert.tail_rate
    recent = times[np.searchsorted(times, t - trunc, "left"):]
    if recent.size:
        lam += float(np.sum(fert.density(t - recent, t / horizon)))
    return lam


def _encode_model(model: LsHawkesModel):
    fert = model.fertility
    bl_code, bl_coeffs, bl_knots, bl_values = model.baseline.curve.encode()
    z_code, z_coeffs, z_knots, z_values = fert.zeta_curve.encode()
    d_code, d_coeffs, d_knots, d_values = fert.decay.encode()
    fam_code = _FAMILY_CODES[fert.family]
    const_delta = -1.0
    if fert.family == "exponential" and fert.decay.form == "constant":
        const_delta = float(fert.decay.coeffs[0])
    tbl_s, tbl_u, tbl_p = _EMPTY, _EMPTY, _EMPTY2
    if fert.family == "sampled-table":
        tbl_s, tbl_u, tbl_p = fert.s_grid, fert.u_grid, fert.table
    return dict(
        bl_code=bl_code, bl_coeffs=bl_coeffs, bl_knots=bl_knots, bl_values=bl_values,
        lam_sup=float(model.baseline.sup_bound),
        fam_code=fam_code, shape_n=int(fert.shape),
        inv_factorial=1.0 / math.factorial(max(fert.shape - 1, 0)),
        z_code=z_code, z_coeffs=z_coeffs, z_knots=z_knots, z_values=z_values,
        d_code=d_code, d_coeffs=d_coeffs, d_knots=d_knots, d_values=d_values,
        tbl_s=tbl_s, tbl_u=tbl_u, tbl_p=tbl_p,
        tail_const=float(fert.tail_const), tail_rate=float(fert.tail_rate),
        const_delta=const_delta,
    )


def _run_thinning(model: LsHawkesModel, horizon: float, t_start: float, t_end: float,
                  cfg: SimulationConfig) -> np.ndarray:
    fert = model.fertility
    enc = _encode_model(model)
    trunc_horizon = (
        math.log(max(fert.tail_const / cfg.history_epsilon, 1.0)) / fert.tail_rate
        if fert.family != "zero"
        else 1.0
    )
    zeta_sup = float(np.max(fert.zeta(np.linspace(-0.5, 1.5, 513)))) if fert.family != "zero" else 0.0
    if zeta_sup >= 1.0:
        raise ModelError(f"branching ratio sup {zeta_sup:g} >= 1: thinning would not terminate")
    expected = (t_end - t_start) * enc["lam_sup"] / max(1.0 - zeta_sup, 1e-6)
    cap = int(2.0 * expected + 10.0 * math.sqrt(expected + 1.0) + 1024)
    seed = np.uint64(cfg.seed & 0xFFFFFFFFFFFFFFFF)
    while True:
        buf = np.empty(min(cap, max(cfg.max_events + 1, 1024)), dtype=np.float64)
        n, status = thinning_core(
            enc["bl_code"], enc["bl_coeffs"], enc["bl_knots"], enc["bl_values"], enc["lam_sup"],
            enc["fam_code"], enc["shape_n"], enc["inv_factorial"],
            enc["z_code"], enc["z_coeffs"], enc["z_knots"], enc["z_values"],
            enc["d_code"], enc["d_coeffs"], enc["d_knots"], enc["d_values"],
            enc["tbl_s"], enc["tbl_u"], enc["tbl_p"],
            enc["tail_const"], enc["tail_rate"], trunc_horizon,
            enc["const_delta"],
            horizon, t_start, t_end,
            cfg.max_events, seed,
            buf,
        )
        if status == 0:
            return buf[:n].copy()
        if status == 1:
            cap *= 2
            continue
        if status == 2:
            raise ExplosionError(
                f"simulation exceeded max_events={cfg.max_events}; "
                "model is near-critical or the horizon is too long"
            )
        raise ModelError(
            "declared exponential envelope does not dominate the fertility function; "
            "fix tail_rate/tail_const (validate_model reports the violation)"
        )


def simulate_ls_hawkes(model: LsHawkesModel, horizon: float, cfg: SimulationConfig) -> EventSeries:
    """Simulate the locally stationary Hawkes process N_T on [0, T].

    Thinning runs on [-burn_in, T]; only events in [0, T] are returned.
    Bit-for-bit deterministic given the seed.
    """
    if horizon < 1.0:
        raise ValueError("horizon must be >= 1")
    burn = cfg.resolve_burn_in(model)
    times = _run_thinning(model, horizon, -burn, float(horizon), cfg)
    inside = times[(times >= 0.0) & (times <= horizon)]
    return EventSeries(inside, float(horizon))


def simulate_frozen(model: LsHawkesModel, u: float, duration: float, cfg: SimulationConfig) -> EventSeries:
    """Simulate the stationary comparison process N(.; u) on [0, duration]."""
    frozen = model.frozen_at(u)
    return simulate_ls_hawkes(frozen, float(duration), cfg)


def simulate_replicates(model: LsHawkesModel, horizon: float, n_replicates: int,
                        master_seed: int, burn_in: float | None = None,
                        frozen_u: float | None = None) -> list[EventSeries]:
    """Independent replicates with seeds derived from (master_seed, horizon, index)."""
    out = []
    for rep in range(n_replicates):
        cfg = SimulationConfig(seed=derive_seed(master_seed, horizon, rep), burn_in=burn_in)
        if frozen_u is None:
            out.append(simulate_ls_hawkes(model, horizon, cfg))
        else:
            out.append(simulate_frozen(model, frozen_u, horizon, cfg))
    return out
