"""End-to-end analysis of day-indexed event timestamps.

Mirrors the transaction-data workflow: ingest a two-column CSV of
(day_id, seconds-since-open) rows, estimate the local mean density and the
local Bartlett spectrum for each day over a shared session horizon, average
the per-day estimates, and Poisson-normalize the averaged spectrum,

    normalized(u, w) = 2 * pi * gamma_avg(u, w) / m_avg(u),

so a Poisson stream maps to the constant 1 and values above 1 indicate
self-excitation.  Estimators consume angular frequency (rad/s); this layer
converts Hz at the boundary (w = 2 * pi * f) and the default session length
is 30600 s (an 8.5 h trading day).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DivisionGuardError, IngestError
from .estimate import (
    EstimatorConfig,
    TFGrid,
    estimate_mean_density,
    estimate_tf_grid,
    feasible_mean_density,
)
from .kernels import FreqKernel, TimeKernel, epanechnikov_kernel, triangle_kernel
from .model import LsHawkesModel
from .simulate import EventSeries, SimulationConfig, derive_seed, simulate_ls_hawkes

DEFAULT_SESSION_SECONDS = 30600.0  # 9:00 -> 17:30

TWO_PI = 2.0 * math.pi


def hz_to_rad(f):
    return 2.0 * np.pi * np.asarray(f, dtype=np.float64)


def rad_to_hz(w):
    return np.asarray(w, dtype=np.float64) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# Event tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EventTable:
    """Per-day event series sharing one session horizon."""

    days: tuple  # of (day_id, EventSeries)
    session_length: float = DEFAULT_SESSION_SECONDS

    def __post_init__(self):
        ids = [d for d, _ in self.days]
        if len(set(ids)) != len(ids):
            raise IngestError("day_ids must be unique")
        for d, series in self.days:
            if series.horizon != self.session_length:
                raise IngestError(f"day {d}: series horizon differs from the session length")

    @property
    def n_days(self) -> int:
        return len(self.days)

    def counts(self) -> dict:
        return {d: s.n for d, s in self.days}


def _dedup_jitter(times: np.ndarray, day_id: int) -> np.ndarray:
    """Spread duplicate timestamps by a deterministic sub-millisecond offset.

    Point processes are simple; collisions come from clock resolution.  The
    jitter scale is drawn from a generator seeded by the day id, and offsets
    never cross the next distinct timestamp, so ordering is preserved.
    """
    if times.size < 2 or np.all(np.diff(times) > 0):
        return times
    rng = np.random.default_rng(np.random.SeedSequence([0x6A17, int(day_id)]))
    scale = 1e-4 * (0.5 + 0.5 * rng.random())
    out = times.astype(np.float64).copy()
    i = 0
    n = out.size
    while i < n:
        j = i
        while j + 1 < n and out[j + 1] == out[i]:
            j += 1
        if j > i:
            nxt = out[j + 1] if j + 1 < n else np.inf
            step = min(scale, (nxt - out[i]) / (j - i + 1) * 0.5)
            for m in range(i + 1, j + 1):
                out[m] = out[i] + step * (m - i)
        i = j + 1
    return out


def ingest_csv(path, session_length: float = DEFAULT_SESSION_SECONDS, clock_policy: str = "strict",
               jitter_duplicates: bool = True) -> EventTable:
    """Read a (day_id, time_s) CSV into an EventTable.

    clock_policy 'strict' rejects out-of-session timestamps naming the line;
    'clip' drops them silently.  Duplicate timestamps within a day are
    jittered (see _dedup_jitter) unless jitter_duplicates is false, in which
    case they raise.
    """
    if clock_policy not in ("strict", "clip"):
        raise ValueError("clock_policy must be 'strict' or 'clip'")
    per_day: dict[int, list[float]] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if len(parts) < 2:
                raise IngestError(f"{path}:{lineno}: expected 'day_id,time_s', got {line!r}")
            try:
                day = int(parts[0])
                t = float(parts[1])
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise IngestError(f"{path}:{lineno}: could not parse {line!r}") from None
            if t < 0.0 or t > session_length:
                if clock_policy == "strict":
                    raise IngestError(
                        f"{path}:{lineno}: timestamp {t:g} outside session [0, {session_length:g}]"
                    )
                continue
            per_day.setdefault(day, []).append(t)
    if not per_day:
        raise IngestError(f"{path}: no event rows found")
    days = []
    for day in sorted(per_day):
        times = np.sort(np.asarray(per_day[day], dtype=np.float64))
        if jitter_duplicates:
            times = _dedup_jitter(times, day)
        elif np.any(np.diff(times) <= 0):
            raise IngestError(f"day {day}: duplicate timestamps (jitter disabled)")
        days.append((day, EventSeries(times, session_length)))
    return EventTable(days=tuple(days), session_length=session_length)


def write_days_csv(table: EventTable, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("day_id,time_s\n")
        for day, series in table.days:
            for t in series.times:
                fh.write(f"{day},{float(t)!r}\n")


def make_synthetic_table(model: LsHawkesModel, n_days: int, session_length: float,
                         master_seed: int, burn_in: float | None = None) -> EventTable:
    """Simulate n_days independent sessions of a model; day streams derive from the seed."""
    days = []
    for day in range(1, n_days + 1):
        cfg = SimulationConfig(seed=derive_seed(master_seed, day), burn_in=burn_in)
        days.append((day, simulate_ls_hawkes(model, session_length, cfg)))
    return EventTable(days=tuple(days), session_length=session_length)


# ---------------------------------------------------------------------------
# Per-day estimation, averaging, normalization
# ---------------------------------------------------------------------------


def analyze_days(
    table: EventTable,
    times,
    freqs_hz,
    b1: float,
    b2_hz: float,
    k: TimeKernel | None = None,
    q: FreqKernel | None = None,
    quad_nodes: int = 64,
) -> tuple[list[TFGrid], list[np.ndarray]]:
    """Per-day Bartlett grids and mean-density curves on shared axes.

    Returns (grids, density_curves); density curves hold NaN at infeasible
    times.  Frequencies are given in Hz and converted once here.
    """
    k = k or triangle_kernel()
    q = q or epanechnikov_kernel()
    times = np.asarray(times, dtype=np.float64)
    freqs = hz_to_rad(freqs_hz)
    cfg = EstimatorConfig(b1=b1, b2=float(hz_to_rad(b2_hz)), quad_nodes=quad_nodes)
    grids, densities = [], []
    for _, series in table.days:
        grids.append(estimate_tf_grid(series, times, freqs, cfg, k, q))
        dens = np.full(times.size, np.nan)
        for i, u0 in enumerate(times):
            if feasible_mean_density(u0, b1, k):
                dens[i] = estimate_mean_density(series, u0, b1, k)
        densities.append(dens)
    return grids, densities


def average_days(grids: list[TFGrid]) -> TFGrid:
    """Pointwise mean across days, skipping missing cells with count bookkeeping."""
    if not grids:
        raise ValueError("no grids to average")
    ref = grids[0]
    for g in grids[1:]:
        if not (np.array_equal(g.times, ref.times) and np.array_equal(g.freqs, ref.freqs)):
            raise ValueError("grids must share axes to be averaged")
    stack = np.stack([g.values for g in grids])
    finite = np.isfinite(stack)
    counts = finite.sum(axis=0)
    sums = np.where(finite, stack, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore"):
        avg = np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)
    return TFGrid(times=ref.times, freqs=ref.freqs, values=avg, kind=ref.kind)


def average_density_curves(curves: list[np.ndarray]) -> np.ndarray:
    stack = np.stack(curves)
    finite = np.isfinite(stack)
    counts = finite.sum(axis=0)
    sums = np.where(finite, stack, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore"):
        return np.where(counts > 0, sums / np.maximum(counts, 1), np.nan)


def poisson_normalize(gamma_avg: TFGrid, m_avg: np.ndarray, tiny: float = 1e-12) -> TFGrid:
    """2*pi*gamma/m per time row; exactly 1 for a Poisson stream."""
    m = np.asarray(m_avg, dtype=np.float64)
    if m.size != gamma_avg.times.size:
        raise ValueError("mean-density curve does not match the grid time axis")
    usable = np.isfinite(gamma_avg.values).any(axis=1)
    if np.any(usable & ~(m > tiny)):
        raise DivisionGuardError("mean density vanishes at a grid time; cannot Poisson-normalize")
    values = TWO_PI * gamma_avg.values / np.where(m > tiny, m, np.nan)[:, None]
    return TFGrid(times=gamma_avg.times, freqs=gamma_avg.freqs, values=values, kind="poisson-normalized")


# ---------------------------------------------------------------------------
# Heatmap artifacts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HeatmapArtifact:
    grid: TFGrid
    metadata: dict = field(default_factory=dict)


def _fmt(x: float) -> str:
    return "" if not np.isfinite(x) else repr(float(x))


def export_heatmap(artifact: HeatmapArtifact, path, format: str = "csv") -> None:
    """Write a heatmap artifact.

    CSV: first row is the frequency axis in Hz (top-left cell empty), first
    column the absolute times, cells the values, missing cells empty.
    JSON adds the full metadata.  Floats are written with shortest
    round-trip precision so export -> import is bit-exact.
    """
    grid = artifact.grid
    freqs_hz = artifact.metadata.get("freqs_hz")
    if freqs_hz is None or len(freqs_hz) != grid.freqs.size:
        freqs_hz = [float(f) for f in rad_to_hz(grid.freqs)]
    if format == "csv":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("," + ",".join(_fmt(f) for f in freqs_hz) + "\n")
            for i, u in enumerate(grid.times):
                fh.write(_fmt(u) + "," + ",".join(_fmt(v) for v in grid.values[i]) + "\n")
    elif format == "json":
        payload = {
            "kind": grid.kind,
            "times": [float(u) for u in grid.times],
            "freqs_hz": [float(f) for f in freqs_hz],
            "values": [[None if not np.isfinite(v) else float(v) for v in row] for row in grid.values],
            "metadata": artifact.metadata,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        raise ValueError("format must be 'csv' or 'json'")


def import_heatmap(path, format: str | None = None, kind: str = "bartlett") -> HeatmapArtifact:
    if format is None:
        format = "json" if str(path).endswith(".json") else "csv"
    if format == "json":
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
        values = np.array(
            [[np.nan if v is None else v for v in row] for row in d["values"]], dtype=np.float64
        )
        grid = TFGrid(
            times=np.asarray(d["times"]), freqs=hz_to_rad(d["freqs_hz"]), values=values, kind=d["kind"]
        )
        return HeatmapArtifact(grid=grid, metadata=d.get("metadata", {}))
    with open(path, "r", encoding="utf-8") as fh:
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    freqs_hz = np.array([float(v) for v in rows[0][1:]])
    times = np.array([float(r[0]) for r in rows[1:]])
    values = np.array(
        [[np.nan if v == "" else float(v) for v in r[1:]] for r in rows[1:]], dtype=np.float64
    )
    return HeatmapArtifact(
        grid=TFGrid(times=times, freqs=hz_to_rad(freqs_hz), values=values, kind=kind), metadata={}
    )


# ---------------------------------------------------------------------------
# Full chain
# ---------------------------------------------------------------------------


def analyze(
    table: EventTable,
    times,
    freqs_hz,
    b1: float = 0.15,
    b2_hz: float = 0.005,
    k: TimeKernel | None = None,
    q: FreqKernel | None = None,
    quad_nodes: int = 64,
) -> tuple[HeatmapArtifact, HeatmapArtifact, HeatmapArtifact]:
    """ingest -> per-day -> average -> normalize, returning the three artifacts.

    Returns (mean-density curve, averaged Bartlett grid, Poisson-normalized
    grid), each with shared metadata: kernels, bandwidths in both units,
    session length and per-day event counts.
    """
    k = k or triangle_kernel()
    q = q or epanechnikov_kernel()
    grids, densities = analyze_days(table, times, freqs_hz, b1, b2_hz, k, q, quad_nodes)
    gamma_avg = average_days(grids)
    m_avg = average_density_curves(densities)
    normalized = poisson_normalize(gamma_avg, m_avg)
    meta = {
        "time_kernel": k.name,
        "freq_kernel": q.name,
        "b1": float(b1),
        "b2_hz": float(b2_hz),
        "b2_rad_per_s": float(hz_to_rad(b2_hz)),
        "session_length_s": float(table.session_length),
        "n_days": table.n_days,
        "events_per_day": table.counts(),
        "freqs_hz": [float(f) for f in np.asarray(freqs_hz, dtype=np.float64)],
    }
    times_arr = np.asarray(times, dtype=np.float64)
    density_grid = TFGrid(
        times=times_arr, freqs=np.array([0.0]), values=m_avg[:, None], kind="mean-density"
    )
    return (
        HeatmapArtifact(density_grid, {**meta, "kind": "mean-density"}),
        HeatmapArtifact(gamma_avg, {**meta, "kind": "bartlett"}),
        HeatmapArtifact(normalized, {**meta, "kind": "poisson-normalized"}),
    )
