"""Command-line interface.

Subcommands: simulate, theory, estimate-density, estimate-spectrum, analyze,
validate.  Frequencies are taken in Hz where the flag says so (converted to
rad/s at this boundary) and in rad per unit time otherwise.  Exit code 0 on
success, 1 with a one-line diagnostic on domain errors, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .bandwidth import optimal_bandwidths, predicted_mse_rate
from .errors import LsHawkesError
from .estimate import EstimatorConfig, estimate_bartlett, estimate_mean_density, estimate_tf_grid
from .kernels import (
    epanechnikov_kernel,
    freq_kernel_from_table,
    load_kernel_table,
    time_kernel_from_table,
    triangle_kernel,
)
from .model import (
    load_model,
    local_bartlett,
    local_mean_density,
    validate_model,
)
from .pipeline import (
    HeatmapArtifact,
    analyze,
    export_heatmap,
    hz_to_rad,
    ingest_csv,
)
from .simulate import EventSeries, SimulationConfig, simulate_frozen, simulate_ls_hawkes
from .validate import (
    fit_rate,
    frequency_bias_scan,
    mse_experiment,
    variance_growth_scan,
)


def _axis(spec: str) -> np.ndarray:
    """Parse 'start:stop:count' into a linspace."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise LsHawkesError(f"axis spec {spec!r} must be start:stop:count")
    return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))


def _time_kernel(name: str):
    if name == "triangle":
        return triangle_kernel()
    xs, ys = load_kernel_table(name)
    return time_kernel_from_table(xs, ys, name=name)


def _freq_kernel(name: str):
    if name == "epanechnikov":
        return epanechnikov_kernel()
    xs, ys = load_kernel_table(name)
    return freq_kernel_from_table(xs, ys, name=name)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lshawkes", description=__doc__)
    p.add_argument("--version", action="version", version=f"lshawkes {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a (locally stationary) Hawkes process")
    sim.add_argument("--model", required=True, help="model specification JSON")
    sim.add_argument("--horizon", type=float, required=True)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", required=True, help="output events CSV (one time per line)")
    sim.add_argument("--burn-in", type=float, default=None)
    sim.add_argument("--frozen-u", type=float, default=None,
                     help="simulate the stationary process frozen at this absolute time")

    th = sub.add_parser("theory", help="closed-form local mean density and Bartlett density")
    th.add_argument("--model", required=True)
    th.add_argument("--u", type=float, required=True)
    th.add_argument("--omega", type=float, default=0.0, help="angular frequency, rad per unit time")
    th.add_argument("--check", action="store_true", help="also print the model validation report")

    ed = sub.add_parser("estimate-density", help="kernel estimate of the local mean density")
    ed.add_argument("--events", required=True)
    ed.add_argument("--horizon", type=float, default=None, help="override the horizon header")
    ed.add_argument("--u0", type=float, required=True)
    ed.add_argument("--b1", type=float, required=True)
    ed.add_argument("--time-kernel", default="triangle")
    ed.add_argument("--feasibility", choices=("strict", "warn"), default="strict")

    es = sub.add_parser("estimate-spectrum", help="kernel estimate of the local Bartlett spectrum")
    es.add_argument("--events", required=True)
    es.add_argument("--horizon", type=float, default=None)
    es.add_argument("--u0", type=float, default=None)
    es.add_argument("--omega0-hz", type=float, default=None, help="frequency in Hz")
    es.add_argument("--omega0", type=float, default=None, help="angular frequency, rad per unit time")
    es.add_argument("--b1", type=float, default=None)
    es.add_argument("--b2-hz", type=float, default=None)
    es.add_argument("--b2", type=float, default=None)
    es.add_argument("--bandwidths", choices=("auto",), default=None,
                    help="'auto' resolves rate-optimal bandwidths from --beta")
    es.add_argument("--beta", type=float, default=1.0)
    es.add_argument("--times", default=None, help="grid axis start:stop:count (grid mode)")
    es.add_argument("--freqs-hz", default=None, help="grid axis start:stop:count in Hz (grid mode)")
    es.add_argument("--time-kernel", default="triangle")
    es.add_argument("--freq-kernel", default="epanechnikov")
    es.add_argument("--quad-nodes", type=int, default=64)
    es.add_argument("--feasibility", choices=("strict", "warn"), default="strict")
    es.add_argument("--out", default=None, help="write grid artifact (.csv or .json)")

    an = sub.add_parser("analyze", help="per-day estimation, day averaging, Poisson normalization")
    an.add_argument("--data", required=True, help="CSV with header day_id,time_s")
    an.add_argument("--session", type=float, default=30600.0, help="session length in seconds")
    an.add_argument("--b1", type=float, default=0.15)
    an.add_argument("--b2-hz", type=float, default=0.005)
    an.add_argument("--times", default="0.15:0.85:15")
    an.add_argument("--freqs-hz", default="0:0.1:11")
    an.add_argument("--time-kernel", default="triangle")
    an.add_argument("--freq-kernel", default="epanechnikov")
    an.add_argument("--quad-nodes", type=int, default=64)
    an.add_argument("--clock-policy", choices=("strict", "clip"), default="strict")
    an.add_argument("--format", choices=("csv", "json"), default="csv")
    an.add_argument("--out-prefix", required=True)

    va = sub.add_parser("validate", help="Monte-Carlo rate and deviation-bound suites")
    va.add_argument("--suite", choices=("rates", "devbounds", "freqbias"), required=True)
    va.add_argument("--model", required=True)
    va.add_argument("--out", required=True, help="output report JSON")
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--replicates", type=int, default=100)
    va.add_argument("--u0", type=float, default=0.5)
    va.add_argument("--omega0", type=float, default=1.0)

    return p


def _cmd_simulate(args) -> int:
    model = load_model(args.model)
    cfg = SimulationConfig(seed=args.seed, burn_in=args.burn_in)
    if args.frozen_u is None:
        series = simulate_ls_hawkes(model, args.horizon, cfg)
    else:
        series = simulate_frozen(model, args.frozen_u, args.horizon, cfg)
    series.to_csv(args.out, seed=args.seed)
    print(f"wrote {series.n} events on [0, {series.horizon:g}] to {args.out}")
    return 0


def _cmd_theory(args) -> int:
    model = load_model(args.model)
    m1 = local_mean_density(model, args.u)
    gamma = local_bartlett(model, args.u, args.omega)
    print(f"u = {args.u!r}")
    print(f"omega = {args.omega!r} rad/time")
    print(f"lambda_c(u) = {float(model.baseline(args.u))!r}")
    print(f"zeta(u) = {float(model.fertility.zeta(args.u))!r}")
    print(f"m1(u) = {m1!r}")
    print(f"gamma(u; omega) = {gamma!r}")
    if args.check:
        print(validate_model(model).summary())
    return 0


def _load_events(path, horizon) -> EventSeries:
    series = EventSeries.from_csv(path)
    if horizon is not None and horizon != series.horizon:
        series = EventSeries(series.times, horizon)
    return series


def _cmd_estimate_density(args) -> int:
    series = _load_events(args.events, args.horizon)
    k = _time_kernel(args.time_kernel)
    val = estimate_mean_density(series, args.u0, args.b1, k, feasibility=args.feasibility)
    print(f"mhat({args.u0!r}) = {val!r}")
    return 0


def _cmd_estimate_spectrum(args) -> int:
    series = _load_events(args.events, args.horizon)
    k = _time_kernel(args.time_kernel)
    q = _freq_kernel(args.freq_kernel)
    if args.bandwidths == "auto":
        plan = optimal_bandwidths(series.horizon, args.beta)
        b1, b2 = plan.b1, plan.b2
    else:
        if args.b1 is None or (args.b2 is None and args.b2_hz is None):
            raise LsHawkesError("give --b1 and --b2/--b2-hz, or --bandwidths auto")
        b1 = args.b1
        b2 = args.b2 if args.b2 is not None else float(hz_to_rad(args.b2_hz))
    cfg = EstimatorConfig(b1=b1, b2=b2, quad_nodes=args.quad_nodes, feasibility=args.feasibility)

    if args.times or args.freqs_hz:
        if not (args.times and args.freqs_hz):
            raise LsHawkesError("grid mode needs both --times and --freqs-hz")
        times = _axis(args.times)
        freqs_hz = _axis(args.freqs_hz)
        grid = estimate_tf_grid(series, times, hz_to_rad(freqs_hz), cfg, k, q)
        meta = {
            "b1": b1, "b2_rad_per_s": b2, "time_kernel": k.name, "freq_kernel": q.name,
            "horizon": series.horizon, "freqs_hz": [float(f) for f in freqs_hz],
        }
        if args.out is None:
            raise LsHawkesError("grid mode needs --out")
        fmt = "json" if args.out.endswith(".json") else "csv"
        export_heatmap(HeatmapArtifact(grid, meta), args.out, format=fmt)
        print(f"wrote {grid.values.shape[0]}x{grid.values.shape[1]} grid to {args.out}")
        return 0

    if args.omega0 is None and args.omega0_hz is None:
        raise LsHawkesError("give --omega0 or --omega0-hz (or grid axes)")
    omega0 = args.omega0 if args.omega0 is not None else float(hz_to_rad(args.omega0_hz))
    val = estimate_bartlett(series, args.u0, omega0, cfg, k, q)
    print(f"ghat(u0={args.u0!r}, omega0={omega0!r}) = {val!r}")
    return 0


def _cmd_analyze(args) -> int:
    table = ingest_csv(args.data, session_length=args.session, clock_policy=args.clock_policy)
    k = _time_kernel(args.time_kernel)
    q = _freq_kernel(args.freq_kernel)
    artifacts = analyze(
        table,
        _axis(args.times),
        _axis(args.freqs_hz),
        b1=args.b1,
        b2_hz=args.b2_hz,
        k=k,
        q=q,
        quad_nodes=args.quad_nodes,
    )
    names = ("mean_density", "bartlett", "poisson_normalized")
    for name, artifact in zip(names, artifacts):
        path = f"{args.out_prefix}_{name}.{args.format}"
        export_heatmap(artifact, path, format=args.format)
        print(f"wrote {path}")
    return 0


def _cmd_validate(args) -> int:
    model = load_model(args.model)
    if args.suite == "rates":
        horizons = [2048.0, 4096.0, 8192.0, 16384.0, 32768.0]
        dens = mse_experiment(
            model, "mean-density", args.u0, horizons, args.replicates,
            bandwidths="optimal", master_seed=args.seed,
        )
        bart = mse_experiment(
            model, "bartlett", (args.u0, args.omega0), horizons, args.replicates,
            bandwidths="optimal", master_seed=args.seed,
        )
        payload = (
            '{"mean_density": ' + dens.to_json()
            + ', "mean_density_fit": ' + _fit_json(dens)
            + ', "bartlett": ' + bart.to_json()
            + ', "bartlett_fit": ' + _fit_json(bart)
            + ', "predicted_rates": ' + str(list(predicted_mse_rate(model.beta)))
            + "}"
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    elif args.suite == "devbounds":
        report = variance_growth_scan(
            model, args.u0, [100.0, 316.0, 1000.0, 3162.0, 10000.0],
            replicates=args.replicates, master_seed=args.seed,
        )
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    else:
        report = frequency_bias_scan(model, args.u0, args.omega0, [0.4, 0.2, 0.1, 0.05])
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
    print(f"wrote {args.out}")
    return 0


def _fit_json(report) -> str:
    import json as _json

    fit = fit_rate(report)
    return _json.dumps({"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared})


_COMMANDS = {
    "simulate": _cmd_simulate,
    "theory": _cmd_theory,
    "estimate-density": _cmd_estimate_density,
    "estimate-spectrum": _cmd_estimate_spectrum,
    "analyze": _cmd_analyze,
    "validate": _cmd_validate,
}


def cli_main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage error or --help/--version
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except (LsHawkesError, OSError, ValueError) as exc:
        print(f"lshawkes {args.command}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())
