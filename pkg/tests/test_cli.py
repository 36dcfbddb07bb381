import io
import json

import numpy as np
import pandas as pd
import pytest

from brp import load_brp
from main import main


def run(*argv):
    return main(["--log-file", "none", *argv])


def last_json(out: str) -> dict:
    return json.loads(out.strip().splitlines()[-1])


@pytest.fixture
def stored_lift(tmp_path):
    out = tmp_path / "x"
    code = run("lift", "--driver", "polynomial", "--coefficients", "[[0,1],[0,0,0.5]]",
               "--degree", "2", "--gamma", "0.45", "--intervals", "32", "--out", str(out))
    assert code == 0
    return tmp_path / "x.json"


def test_hopf_table_to_stdout(capsys):
    assert run("hopf-table", "--max-degree", "3", "--labels", "1") == 0
    df = pd.read_csv(io.StringIO(capsys.readouterr().out))
    assert len(df) == 7
    assert list(df.columns) == ["forest", "degree", "tree_factorial", "symmetry", "coproduct"]
    assert json.loads(df["forest"][0]) == [{"l": 0, "c": []}]


def test_usage_errors_exit_with_two():
    with pytest.raises(SystemExit) as exc:
        run("hopf-table", "--bogus")
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        run("--jobs", "0", "hopf-table")
    assert exc.value.code == 2


def test_verify_hopf(capsys):
    assert run("verify", "--suite", "hopf", "--max-degree", "4") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["errors"] == []


def test_lift_writes_header(stored_lift, capsys):
    X = load_brp(stored_lift)
    assert X.level == 2 and X.alphabet_size == 2
    assert X.metadata["config"]["driver"] == "polynomial"
    assert stored_lift.with_suffix(".csv").exists()


def test_lift_from_csv(tmp_path, capsys):
    t = np.linspace(0.0, 1.0, 17)
    pd.DataFrame({"t": t, "x0": np.sin(t)}).to_csv(tmp_path / "drv.csv", index=False)
    code = run("lift", "--driver", "csv", "--csv", str(tmp_path / "drv.csv"),
               "--degree", "2", "--out", str(tmp_path / "c"))
    assert code == 0
    assert last_json(capsys.readouterr().out)["trees"] == 2


def test_extend_and_correct(stored_lift, tmp_path, capsys):
    assert run("extend", "--brp", str(stored_lift), "--target", "3", "--out", str(tmp_path / "x3")) == 0
    extended = load_brp(tmp_path / "x3.json")
    assert extended.level == 3
    assert all(r["within"] for r in extended.metadata["bound_propagation"])
    assert run("correct", "--brp", str(stored_lift), "--out", str(tmp_path / "fixed")) == 0
    summary = last_json(capsys.readouterr().out)
    assert summary["multiplicativity_defect"] < 1e-8


def test_solve_rde(stored_lift, tmp_path):
    field = tmp_path / "field.json"
    field.write_text(json.dumps({"variables": ["y0"], "fields": [["y0"], ["0"]]}))
    out = tmp_path / "y.csv"
    code = run("solve-rde", "--brp", str(stored_lift), "--field", str(field), "--eta", "1.0", "--out", str(out))
    assert code == 0
    df = pd.read_csv(out)
    assert df["y0"].iloc[-1] == pytest.approx(np.e, rel=1e-2)
    sidecar = json.loads(out.with_suffix(".json").read_text())
    assert sidecar["subcommand"] == "solve-rde"
    assert set(sidecar["defects"]) == {"control", "control2", "lemma", "scale"}
    assert sidecar["windows"]


def test_solve_rde_reports_errors_as_json(stored_lift, tmp_path, capsys):
    field = tmp_path / "field.json"
    field.write_text(json.dumps({"variables": ["y0"], "fields": [["y0"], ["0"]]}))
    code = run("solve-rde", "--brp", str(stored_lift), "--field", str(field), "--eta", "1.0,2.0")
    assert code == 1
    err = last_json(capsys.readouterr().out)
    assert err["error"] == "ValueError" and err["subcommand"] == "solve-rde"


def test_extend_hypothesis_error(tmp_path, capsys):
    run("lift", "--degree", "2", "--gamma", "0.3", "--intervals", "16", "--out", str(tmp_path / "r"))
    code = run("extend", "--brp", str(tmp_path / "r.json"), "--target", "4", "--out", str(tmp_path / "r4"))
    assert code == 1
    assert last_json(capsys.readouterr().out)["error"] == "HypothesisError"


def test_sew_stored_increment(tmp_path):
    times = np.linspace(0.0, 1.0, 17)
    i, j = np.tril_indices(times.size, -1)
    pd.DataFrame({"i": i, "j": j, "value": times[j] * (times[i] - times[j])}).to_csv(tmp_path / "g.csv", index=False)
    (tmp_path / "g.json").write_text(json.dumps({"times": times.tolist(), "mu": 2.0, "data": "g.csv"}))
    out = tmp_path / "sewn.csv"
    assert run("sew", "--input", str(tmp_path / "g.json"), "--out", str(out)) == 0
    df = pd.read_csv(out)
    sep = times[df["i"]] - times[df["j"]]
    assert df["lambda"].to_numpy() == pytest.approx(-sep ** 2 / 2 + sep / 32, abs=1e-13)


def test_neoclassical_sweep(tmp_path):
    out = tmp_path / "n.csv"
    code = run("--jobs", "2", "neoclassical-sweep", "--gammas", "0.5,0.7", "--ratios", "1,2",
               "--n-max", "20", "--out", str(out))
    assert code == 0
    assert len(pd.read_csv(out)) > 0
    sidecar = json.loads(out.with_suffix(".json").read_text())
    assert sidecar["config"]["n_max"] == 20 and sidecar["summary"]
