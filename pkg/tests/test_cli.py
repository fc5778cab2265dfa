import json
import shutil
import subprocess
import sys

import numpy as np
import pytest

from satgrowth import GrowthParams, SolutionSpec
from satgrowth import reports
from satgrowth.cli import main
from satgrowth.dataio import generate, series_to_csv

CUMULATIVE = "1,0.15,5e-7"
HEADCOUNT = "1,0.09,2e-6"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def ok(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    report = reports.loads(out)
    assert report["command"] == argv[0]
    return report


@pytest.fixture
def benchmark_csv(tmp_path):
    spec = SolutionSpec(GrowthParams(1.0, 0.15, 5e-7), 1.0, 1914.0)
    path = tmp_path / "cum.csv"
    path.write_text(series_to_csv(generate(spec, np.arange(96.0), sigma_log=0.01, seed=4, label="cumulative-revenue")))
    return path


def test_fit_and_predict_from_report(capsys, benchmark_csv, tmp_path):
    fit = ok(capsys, "fit", str(benchmark_csv), "--starts", "4", "--plot", str(tmp_path / "fit.tsv"))
    assert fit["result"]["params"]["lam"] == pytest.approx(0.15, rel=0.05)
    assert fit["result"]["t_origin"] == 1914.0
    assert fit["inputs"]["csv"]["sha256"]
    header = (tmp_path / "fit.tsv").read_text().splitlines()[0].split("\t")
    assert header == ["t", "observed", "model"]

    report_path = tmp_path / "fit.json"
    report_path.write_text(reports.dumps(fit))
    pred = ok(capsys, "predict", str(report_path))
    assert pred["result"]["phi_sat"] == pytest.approx(1.0 / fit["result"]["params"]["eta"], rel=1e-12)
    assert pred["result"]["t_nl_calendar"] == pytest.approx(1914.0 + pred["result"]["t_nl"])


def test_predict_from_csv(capsys, benchmark_csv):
    pred = ok(capsys, "predict", str(benchmark_csv), "--starts", "4")
    assert pred["result"]["fit"]["kind"] == "fit"
    assert pred["result"]["t_nl"] > 0


def test_predict_from_params(capsys):
    pred = ok(capsys, "predict", "--params", "1,0.145,1e-5")
    assert pred["result"]["phi_sat"] == pytest.approx(1e5, rel=1e-12)
    assert pred["result"]["t_nl"] is None
    pred = ok(capsys, "predict", "--params", "1,0.1,1e-4", "--c", "1")
    assert pred["result"]["t_nl"] == pytest.approx(92.10340371976183, rel=1e-13)


def test_stability(capsys):
    rep = ok(capsys, "stability", "--r-params", CUMULATIVE, "--h-params", HEADCOUNT)
    res = rep["result"]
    assert res["classification"] == "stable node"
    assert res["equilibrium"] == pytest.approx([2e6, 5e5])
    assert res["omega1"]["re"] == pytest.approx(-0.09) and res["omega2"]["re"] == pytest.approx(-0.15)


def test_stability_at_origin(capsys):
    rep = ok(capsys, "stability", "--r-params", CUMULATIVE, "--h-params", HEADCOUNT, "--point", "0,0")
    assert rep["result"]["classification"] == "unstable node"


def test_powerlaw_noiseless_pair(capsys, tmp_path):
    t = np.arange(0.0, 81.0)
    r = generate(SolutionSpec(GrowthParams(1.0, 0.15, 5e-7), 1.0, 1914.0), t, label="cumulative-revenue")
    h = generate(SolutionSpec(GrowthParams(1.0, 0.09, 2e-6), 10.0, 1914.0), t, label="headcount")
    (tmp_path / "r.csv").write_text(series_to_csv(r))
    (tmp_path / "h.csv").write_text(series_to_csv(h))
    plot = tmp_path / "pl.tsv"
    rep = ok(capsys, "powerlaw", str(tmp_path / "r.csv"), str(tmp_path / "h.csv"), "--starts", "4", "--plot", str(plot))
    res = rep["result"]
    assert res["line_fit"]["slope"] == pytest.approx(0.15 / 0.09, rel=5e-3)
    assert abs(res["relative_difference"]) < 5e-3
    assert plot.read_text().splitlines()[0].split("\t") == ["t", "ln_u", "ln_v", "model_ln_v"]


def test_simulate_logistic(capsys, tmp_path):
    plot = tmp_path / "sim.tsv"
    rep = ok(
        capsys, "simulate", "--system", "logistic", "--params", "1,0.2,1e-3", "--x0", "1",
        "--t1", "100", "--n-out", "11", "--plot", str(plot),
    )
    assert rep["result"]["final_state"][0] == pytest.approx(1000.0, rel=1e-4)
    lines = plot.read_text().splitlines()
    assert lines[0].split("\t") == ["t", "observed", "model"] and len(lines) == 12


def test_simulate_coupled(capsys):
    rep = ok(capsys, "simulate", "--r-params", CUMULATIVE, "--h-params", HEADCOUNT, "--r0", "1", "--h0", "10",
             "--t1", "50", "--method", "rk4", "--step", "0.1")
    assert rep["result"]["labels"] == ["R", "H"]
    assert rep["result"]["step_stats"]["rejected"] == 0


def test_generate_stdout_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "generate", "--params", CUMULATIVE, "--phi0", "1", "--t1", "5", "--origin", "1914", "--seed", "9", "--sigma", "0.01")
    assert code == 0
    assert out.startswith("# satgrowth") and "seed=9" in out
    assert out.splitlines()[3].startswith("1914,")
    rep = ok(capsys, "generate", "--params", CUMULATIVE, "--c", "1", "--t1", "5", "-o", str(tmp_path / "g.csv"))
    assert rep["result"]["n_points"] == 6


def test_seed_from_environment(capsys, monkeypatch, benchmark_csv):
    monkeypatch.setenv("SATGROWTH_SEED", "21")
    assert ok(capsys, "fit", str(benchmark_csv), "--starts", "2")["seed"] == 21
    assert ok(capsys, "fit", str(benchmark_csv), "--starts", "2", "--seed", "5")["seed"] == 5


def test_generate_seed_is_reproducible(capsys):
    args = ["generate", "--params", CUMULATIVE, "--c", "1", "--sigma", "0.05", "--seed", "3"]
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


@pytest.mark.parametrize(
    "argv, code, kind",
    [
        (["frobnicate"], 1, "usage"),
        (["predict"], 1, "usage"),
        (["predict", "--params", "0,0.1,1e-3"], 1, "DomainError"),
        (["stability", "--r-params", "1,0.1", "--h-params", HEADCOUNT], 1, "usage"),
        (["fit", "/nonexistent/series.csv"], 2, "FileNotFoundError"),
        (["generate", "--params", CUMULATIVE], 1, "usage"),
    ],
)
def test_errors(capsys, argv, code, kind):
    got, out, err = run(capsys, *argv)
    assert got == code and out == ""
    payload = json.loads(err)
    assert payload["error"] == kind and payload["message"]


def test_bad_csv_names_line(capsys, tmp_path):
    path = tmp_path / "dup.csv"
    path.write_text("year,v\n2000,1\n2000,2\n")
    code, _, err = run(capsys, "fit", str(path))
    assert code == 1 and "line 3" in json.loads(err)["message"]


@pytest.mark.skipif(shutil.which("satgrowth") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(
        ["satgrowth", "stability", "--r-params", CUMULATIVE, "--h-params", HEADCOUNT],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["classification"] == "stable node"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "satgrowth.cli", "predict", "--params", "1,0.09,2e-6"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["phi_sat"] == pytest.approx(5e5)
