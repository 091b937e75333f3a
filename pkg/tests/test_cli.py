import csv
import json
import subprocess
import sys

import numpy as np
import pytest

RUN = [sys.executable, "-m", "fracmix"]


def run_cli(*args, **kwargs):
    return subprocess.run(
        RUN + list(args), capture_output=True, text=True, timeout=600, **kwargs
    )


def simulate(tmp_path, name="panel.csv", **overrides):
    flags = {
        "--hurst": "0.5",
        "--subjects": "2",
        "--n-obs": "4",
        "--horizon": "5",
        "--mu": "-2",
        "--sigma2": "1",
        "--seed": "7",
    }
    flags.update(overrides)
    out = tmp_path / name
    args = ["simulate"]
    for k, v in flags.items():
        args.extend([k, str(v)])
    args.extend(["--out", str(out)])
    res = run_cli(*args)
    assert res.returncode == 0, res.stderr
    return out, res


# ---------------------------------------------------------------- simulate
def test_simulate_writes_expected_rows(tmp_path):
    out, res = simulate(tmp_path)
    lines = out.read_text().splitlines()
    assert lines[0] == "subject,t,y"
    assert len(lines) == 1 + 8  # header + N*n data rows
    ts = sorted({row.split(",")[1] for row in lines[1:]})
    assert ts == ["1.25", "2.5", "3.75", "5.0"]
    # seed and grid are reported on stderr, results never are
    assert "seed: 7" in res.stderr
    assert "grid:" in res.stderr
    assert res.stdout == ""


def test_simulate_rejects_bad_hurst(tmp_path):
    res = run_cli(
        "simulate", "--hurst", "1.5", "--subjects", "2", "--n-obs", "4",
        "--horizon", "5", "--mu", "0", "--sigma2", "1", "--seed", "1",
        "--out", str(tmp_path / "x.csv"),
    )
    assert res.returncode == 2
    assert "--hurst" in res.stderr


def test_simulate_is_seed_deterministic(tmp_path):
    a, _ = simulate(tmp_path, name="a.csv")
    b, _ = simulate(tmp_path, name="b.csv")
    assert a.read_bytes() == b.read_bytes()
    c, _ = simulate(tmp_path, name="c.csv", **{"--seed": "8"})
    assert a.read_bytes() != c.read_bytes()


def test_simulate_zero_variance_slopes_concentrate(tmp_path):
    outs = {}
    for horizon in (5, 50):
        out, _ = simulate(
            tmp_path,
            name=f"h{horizon}.csv",
            **{"--sigma2": "0", "--subjects": "1000", "--horizon": str(horizon)},
        )
        rows = list(csv.DictReader(out.open()))
        ends = [float(r["y"]) / float(r["t"]) for r in rows if float(r["t"]) == float(horizon)]
        outs[horizon] = np.var(ends)
    # slope spread is T^{2H-2} = 1/T here, so the large horizon shrinks it
    assert outs[50] < 0.5 * outs[5]
    assert outs[50] == pytest.approx(1 / 50, rel=0.3)


def test_round_trip_is_byte_identical(tmp_path):
    out, _ = simulate(tmp_path, **{"--subjects": "3", "--n-obs": "8", "--hurst": "0.85"})
    from fracmix.panel_io import panel_csv_text, read_panel_csv

    panel = read_panel_csv(out)
    assert panel_csv_text(panel).encode() == out.read_bytes()


# ------------------------------------------------------------------- hurst
def test_hurst_estimates_simulated_panel(tmp_path):
    out, _ = simulate(
        tmp_path,
        **{"--hurst": "0.85", "--subjects": "1", "--n-obs": "4096", "--horizon": "1"},
    )
    res = run_cli("hurst", "--input", str(out))
    assert res.returncode == 0, res.stderr
    doc = json.loads(res.stdout)
    assert abs(doc["h_hat"] - 0.85) < 0.03
    assert doc["n"] == 4096
    assert doc["k"] == 2
    assert doc["filter"] == [1, -2, 1]


def test_hurst_rejects_low_order_filter(tmp_path):
    out, _ = simulate(tmp_path)
    res = run_cli("hurst", "--input", str(out), "--filter", "1,-1")
    assert res.returncode == 2
    assert "filter" in res.stderr


def test_hurst_rejects_unknown_filter_name(tmp_path):
    out, _ = simulate(tmp_path)
    res = run_cli("hurst", "--input", str(out), "--filter", "diff9")
    assert res.returncode == 2


def test_hurst_rejects_bad_subject(tmp_path):
    out, _ = simulate(tmp_path)
    res = run_cli("hurst", "--input", str(out), "--subject", "5")
    assert res.returncode == 2
    assert "--subject" in res.stderr


def test_hurst_out_of_range_series_exits_4(tmp_path):
    # drift-only panel: the k-variation is 0, outside the invertible range
    path = tmp_path / "drift.csv"
    n = 64
    with path.open("w") as fh:
        fh.write("subject,t,y\n")
        for j in range(1, n + 1):
            t = j / n
            fh.write(f"1,{t!r},{(-3.0 * t)!r}\n")
    res = run_cli("hurst", "--input", str(path))
    assert res.returncode == 4


def test_hurst_custom_filter_accepted(tmp_path):
    out, _ = simulate(
        tmp_path, **{"--subjects": "1", "--n-obs": "1024", "--horizon": "1"}
    )
    res = run_cli("hurst", "--input", str(out), "--filter=-1,3,-3,1")
    assert res.returncode == 0, res.stderr
    assert json.loads(res.stdout)["filter_order"] == 3


# ----------------------------------------------------------------- effects
def toy_slope_panel(tmp_path, slopes, times=(1.25, 2.5, 3.75, 5.0)):
    path = tmp_path / "toy.csv"
    with path.open("w") as fh:
        fh.write("subject,t,y\n")
        for i, c in enumerate(slopes, start=1):
            for t in times:
                fh.write(f"{i},{t!r},{c * t!r}\n")
    return path


def test_effects_on_pure_slope_panel(tmp_path):
    path = toy_slope_panel(tmp_path, [1.0, 3.0])
    res = run_cli("effects", "--input", str(path), "--hurst", "0.5")
    assert res.returncode == 0, res.stderr
    doc = json.loads(res.stdout)
    assert doc["mu_hat"] == pytest.approx(2.0, abs=1e-10)
    # population variance of slopes is 1, q = T = 5
    assert doc["q"] == pytest.approx(5.0, abs=1e-10)
    assert doc["sigma2_hat"] == pytest.approx(1.0 - 0.2, abs=1e-10)
    assert doc["sigma2_hat_clamped"] == doc["sigma2_hat"]
    assert doc["exact_std_basis"] == "plug-in"
    assert len(doc["ci_mu"]) == 2


def test_effects_clamps_negative_sigma2(tmp_path):
    path = toy_slope_panel(tmp_path, [2.0, 2.0])  # zero spread: sigma2_hat = -1/q
    res = run_cli("effects", "--input", str(path), "--hurst", "0.5")
    doc = json.loads(res.stdout)
    assert doc["sigma2_hat"] == pytest.approx(-0.2, abs=1e-12)
    assert doc["sigma2_hat_clamped"] == 0.0


def test_effects_brownian_mu_is_endpoint_mean(tmp_path):
    out, _ = simulate(tmp_path, **{"--subjects": "20", "--n-obs": "8"})
    res = run_cli("effects", "--input", str(out), "--hurst", "0.5")
    doc = json.loads(res.stdout)
    rows = list(csv.DictReader(out.open()))
    ends = [float(r["y"]) for r in rows if float(r["t"]) == 5.0]
    assert doc["mu_hat"] == pytest.approx(np.mean(ends) / 5.0, abs=1e-10)


def test_effects_requires_hurst_flag(tmp_path):
    path = toy_slope_panel(tmp_path, [1.0, 2.0])
    res = run_cli("effects", "--input", str(path))
    assert res.returncode == 2


def test_effects_rejects_bad_level(tmp_path):
    path = toy_slope_panel(tmp_path, [1.0, 2.0])
    res = run_cli("effects", "--input", str(path), "--hurst", "0.5", "--level", "1.5")
    assert res.returncode == 2
    assert "--level" in res.stderr


def test_effects_grid_inconsistency_exits_4(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(
        "subject,t,y\n"
        "1,1.0,0.5\n1,2.0,1.0\n"
        "2,1.0,0.4\n2,3.0,0.9\n"
    )
    res = run_cli("effects", "--input", str(path), "--hurst", "0.5")
    assert res.returncode == 4


def test_json_reals_round_trip(tmp_path):
    out, _ = simulate(tmp_path, **{"--subjects": "5", "--n-obs": "8", "--hurst": "0.7"})
    res = run_cli("effects", "--input", str(out), "--hurst", "0.7")
    doc = json.loads(res.stdout)
    # serialized with 17 significant digits: parsing and re-serializing
    # reproduces the identical document
    from fracmix.panel_io import dumps_result

    assert dumps_result(doc) == res.stdout


# -------------------------------------------------------------- experiment
CONFIG = """
# reference-style grid, tiny replication count
h_list = 0.15, 0.5, 0.85
subjects_list = 50, 500
n_obs_list = 4, 32, 256
horizon = 5.0
mu0 = -2.0
sigma20 = 1.0
replications = 2
base_seed = 11
"""


def test_experiment_grid_outputs(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(CONFIG)
    outdir = tmp_path / "results"
    res = run_cli("experiment", "--config", str(cfg), "--out", str(outdir))
    assert res.returncode == 0, res.stderr
    tables = sorted(p.name for p in outdir.glob("table_*.csv"))
    assert tables == ["table_n256.csv", "table_n32.csv", "table_n4.csv"]
    for name in tables:
        rows = list(csv.DictReader((outdir / name).open()))
        assert len(rows) == 6  # 3 H values x 2 subject counts
        assert list(rows[0]) == [
            "H", "N", "mean_mu", "exact_std_mu", "emp_std_mu",
            "mean_sigma2", "exact_std_sigma2", "emp_std_sigma2",
        ]
    svgs = list(outdir.glob("hist_*.svg"))
    assert len(svgs) == 36  # 18 cells x 2 estimators
    assert (outdir / "hist_0.5_50_4_mu.svg").exists()
    manifest = json.loads((outdir / "manifest.json").read_text())
    assert manifest["base_seed"] == 11
    assert manifest["config"]["replications"] == 2
    text = (outdir / "hist_0.5_50_4_mu.svg").read_text()
    assert text.startswith("<?xml") and "</svg>" in text


def test_experiment_exact_std_columns(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(
        "h_list = 0.5\nsubjects_list = 50\nn_obs_list = 4\nhorizon = 5.0\n"
        "mu0 = -2.0\nsigma20 = 1.0\nreplications = 1\n"
    )
    outdir = tmp_path / "res"
    res = run_cli("experiment", "--config", str(cfg), "--out", str(outdir))
    assert res.returncode == 0, res.stderr
    (row,) = list(csv.DictReader((outdir / "table_n4.csv").open()))
    assert float(row["exact_std_mu"]) == pytest.approx(0.1549, abs=5e-5)
    assert float(row["exact_std_sigma2"]) == pytest.approx(0.2376, abs=5e-5)
    assert float(row["emp_std_mu"]) == 0.0  # single replication


def test_experiment_missing_key_exits_2(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(
        "h_list = 0.5\nsubjects_list = 10\nn_obs_list = 4\nhorizon = 5.0\n"
        "mu0 = -2.0\nsigma20 = 1.0\n"
    )
    res = run_cli("experiment", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert res.returncode == 2
    assert "replications" in res.stderr


def test_experiment_config_parse_error_names_line(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text("h_list = 0.5\nthis line is wrong\n")
    res = run_cli("experiment", "--config", str(cfg), "--out", str(tmp_path / "o"))
    assert res.returncode == 2
    assert "line 2" in res.stderr


def test_experiment_unwritable_output_exits_5(tmp_path):
    cfg = tmp_path / "grid.cfg"
    cfg.write_text(
        "h_list = 0.5\nsubjects_list = 5\nn_obs_list = 4\nhorizon = 5.0\n"
        "mu0 = 0.0\nsigma20 = 1.0\nreplications = 1\n"
    )
    # a regular file in the parent position blocks directory creation
    # regardless of privileges
    blocker = tmp_path / "blocked"
    blocker.write_text("")
    res = run_cli("experiment", "--config", str(cfg), "--out", str(blocker / "sub"))
    assert res.returncode == 5


def test_missing_input_file_exits_2(tmp_path):
    res = run_cli("hurst", "--input", str(tmp_path / "nope.csv"))
    assert res.returncode == 2
