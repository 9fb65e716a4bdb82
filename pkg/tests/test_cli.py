import numpy as np
from numpy.testing import assert_allclose

import lshawkes as lh
from lshawkes.cli import cli_main


def _write_model(tmp_path, model, name="model.json"):
    path = tmp_path / name
    lh.save_model(model, path)
    return str(path)


def test_theory_passthrough(tmp_path, capsys, stationary_exp_model):
    path = _write_model(tmp_path, stationary_exp_model)
    assert cli_main(["theory", "--model", path, "--u", "0.5", "--omega", "0"]) == 0
    out = capsys.readouterr().out
    m1_line = [l for l in out.splitlines() if l.startswith("m1(u)")][0]
    gamma_line = [l for l in out.splitlines() if l.startswith("gamma")][0]
    assert float(m1_line.split("=")[1]) == lh.local_mean_density(stationary_exp_model, 0.5)
    assert float(gamma_line.split("=")[1]) == lh.local_bartlett(stationary_exp_model, 0.5, 0.0)


def test_simulate_estimate_chain(tmp_path, capsys, stationary_exp_model):
    model_path = _write_model(tmp_path, stationary_exp_model)
    events_path = str(tmp_path / "events.csv")
    assert cli_main([
        "simulate", "--model", model_path, "--horizon", "2000", "--seed", "42", "--out", events_path,
    ]) == 0
    series = lh.EventSeries.from_csv(events_path)
    assert series.horizon == 2000.0 and series.n > 1000

    assert cli_main(["estimate-density", "--events", events_path, "--u0", "0.5", "--b1", "0.2"]) == 0
    out = capsys.readouterr().out
    printed = float(out.splitlines()[-1].split("=")[1])
    assert_allclose(
        printed, lh.estimate_mean_density(series, 0.5, 0.2, lh.triangle_kernel()), rtol=1e-12
    )

    assert cli_main([
        "estimate-spectrum", "--events", events_path, "--u0", "0.5", "--omega0", "0.5",
        "--b1", "0.2", "--b2", "0.05",
    ]) == 0


def test_spectrum_grid_export(tmp_path, capsys, poisson_model):
    model_path = _write_model(tmp_path, poisson_model)
    events_path = str(tmp_path / "ev.csv")
    grid_path = str(tmp_path / "grid.json")
    cli_main(["simulate", "--model", model_path, "--horizon", "5000", "--seed", "7", "--out", events_path])
    assert cli_main([
        "estimate-spectrum", "--events", events_path, "--times", "0.3:0.7:3",
        "--freqs-hz", "0:0.05:4", "--b1", "0.2", "--b2", "0.05", "--out", grid_path,
    ]) == 0
    art = lh.import_heatmap(grid_path)
    assert art.grid.values.shape == (3, 4)


def test_analyze_writes_three_artifacts(tmp_path, capsys, poisson_model):
    table = lh.make_synthetic_table(poisson_model, 2, 4000.0, master_seed=3)
    data_path = str(tmp_path / "days.csv")
    lh.write_days_csv(table, data_path)
    prefix = str(tmp_path / "run")
    assert cli_main([
        "analyze", "--data", data_path, "--session", "4000", "--b1", "0.2", "--b2-hz", "0.005",
        "--times", "0.4:0.6:2", "--freqs-hz", "0:0.02:3", "--out-prefix", prefix, "--format", "json",
    ]) == 0
    for name in ("mean_density", "bartlett", "poisson_normalized"):
        art = lh.import_heatmap(f"{prefix}_{name}.json")
        assert art.grid.values.size > 0


def test_auto_bandwidths(tmp_path, capsys, stationary_exp_model):
    model_path = _write_model(tmp_path, stationary_exp_model)
    events_path = str(tmp_path / "e.csv")
    cli_main(["simulate", "--model", model_path, "--horizon", "4096", "--seed", "1", "--out", events_path])
    assert cli_main([
        "estimate-spectrum", "--events", events_path, "--u0", "0.5", "--omega0", "1.0",
        "--bandwidths", "auto", "--beta", "1",
    ]) == 0


def test_usage_errors():
    assert cli_main(["frobnicate"]) == 2
    assert cli_main(["--help"]) == 0
    assert cli_main([]) == 2


def test_domain_error_exit_code(tmp_path):
    assert cli_main(["theory", "--model", str(tmp_path / "missing.json"), "--u", "0.5"]) == 1


def test_validate_freqbias_suite(tmp_path, smooth_scan_model):
    model_path = _write_model(tmp_path, smooth_scan_model)
    out = str(tmp_path / "report.json")
    assert cli_main([
        "validate", "--suite", "freqbias", "--model", model_path, "--out", out, "--omega0", "1.0",
    ]) == 0
    import json

    report = json.loads(open(out).read())
    assert abs(report["slope"] - 2.0) <= 0.3


def test_validate_devbounds_suite(tmp_path, stationary_exp_model):
    model_path = _write_model(tmp_path, stationary_exp_model)
    out = str(tmp_path / "dev.json")
    assert cli_main([
        "validate", "--suite", "devbounds", "--model", model_path, "--out", out,
        "--replicates", "60", "--u0", "0.5",
    ]) == 0
    import json

    report = json.loads(open(out).read())
    assert report["bounded"] is True
