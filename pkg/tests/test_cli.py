import io as _io
import json
import math
import subprocess
import sys

import pytest
from hypothesis import given, strategies as st

from catlab import io
from catlab.cli import main
from catlab.errors import InvariantError


def run(*argv):
    out, err = _io.StringIO(), _io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# -- serialization -------------------------------------------------------------

def test_csv_round_trip_with_inf():
    rows = [{"model": "free", "lambda": 2.0, "d": None, "mean_time": math.inf, "ok": True},
            {"model": "tree", "lambda": 0.1 + 0.2, "d": 2, "mean_time": 1.5223962215547504, "ok": False}]
    text = io.to_csv(rows)
    assert "inf" in text and "nan" not in text.lower()
    assert io.read_csv(text) == rows


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False) | st.just(math.inf), min_size=1, max_size=20))
def test_csv_round_trip_floats(values):
    rows = [{"x": v, "i": i} for i, v in enumerate(values)]
    assert io.read_csv(io.to_csv(rows)) == rows


def test_nan_is_never_written():
    with pytest.raises(InvariantError):
        io.to_csv([{"x": math.nan}])
    with pytest.raises(InvariantError):
        io.to_json("tau", {}, [{"x": math.nan}])


def test_json_document_shape():
    doc = json.loads(io.to_json("tau", {"lambda": 2.0}, [{"mean_time": math.inf}]))
    assert list(doc) == ["schema", "command", "params", "results"]
    assert doc["schema"] == "v1" and doc["results"][0]["mean_time"] == "inf"


# -- commands ------------------------------------------------------------------

def test_table1_full_list():
    code, out, _ = run("table1")
    assert code == 0
    rows = io.read_csv(out)
    assert [r["d"] for r in rows] == [2, 3, 5, 7, 10, 20, 50, 100, 200]
    assert [r["lambda_d_3dp"] for r in rows][:5] == [5.026, 3.432, 2.693, 2.456, 2.302]
    assert all(abs(r["lambda_d"] - r["lambda_d_3dp"]) <= 5e-4 for r in rows)


def test_table1_single_row_and_usage_error(tmp_path):
    target = tmp_path / "t.csv"
    assert run("table1", "--d", "2", "--out", str(target))[0] == 0
    assert len(io.read_csv(target.read_text())) == 1
    code, out, err = run("table1", "--d", "1")
    assert code == 2 and out == "" and "--d" in err


def test_psi_examples():
    assert io.read_csv(run("psi", "--model", "free", "--lambda", "1")[1])[0]["psi"] == 1.0
    row = io.read_csv(run("psi", "--model", "binom", "--lambda", "3", "--p", "0.5")[1])[0]
    assert row["psi"] == pytest.approx(1 / 3)
    row = io.read_csv(run("psi", "--model", "tree", "--lambda", "6", "--d", "2")[1])[0]
    assert row["psi"] == pytest.approx(0.8106, abs=1e-4) and row["method"] == "closed-form"
    row = io.read_csv(run("psi", "--model", "tree", "--lambda", "6", "--d", "4")[1])[0]
    assert row["method"] == "fixed-point"


@pytest.mark.parametrize("argv", [
    ("psi", "--model", "tree", "--lambda", "6"),
    ("psi", "--model", "geom", "--lambda", "6"),
    ("psi", "--model", "geom", "--lambda", "6", "--p", "1.5"),
    ("psi", "--model", "free", "--lambda", "-1"),
    ("psi", "--model", "weird", "--lambda", "1"),
    ("psi", "--lambda", "1"),
    ("tau", "--model", "tree", "--d", "2", "--lambda", "6"),
    ("tau", "--model", "tree", "--d", "4", "--lambda", "1"),
    ("simulate", "--model", "free", "--lambda", "4", "--replicates", "0"),
    ("simulate", "--model", "tree", "--lambda", "4"),
    ("figure-data", "--figure", "3", "--p", "0.5"),
    ("figure-data", "--figure", "1", "--p", "0.5", "--lambda", "0"),
    ("nonsense",),
])
def test_usage_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and err


def test_tau_examples():
    assert io.read_csv(run("tau", "--model", "free", "--lambda", "2")[1])[0]["mean_time"] == math.inf
    code, out, _ = run("tau", "--model", "tree", "--d", "2", "--lambda", "5.025724834504721")
    assert code == 0 and "inf" in out
    row = io.read_csv(run("tau", "--model", "tree", "--d", "2", "--lambda", "1")[1])[0]
    assert row["mean_time"] == pytest.approx(1.5223962215547504, abs=1e-12)
    doc = json.loads(run("tau", "--model", "free", "--lambda", "2", "--format", "json")[1])
    assert doc["results"][0]["mean_time"] == "inf"


def test_figure2_has_crossover_rows():
    code, out, _ = run("figure-data", "--figure", "2", "--p", "0.25", "0.5", "--points", "10")
    assert code == 0
    rows = io.read_csv(out)
    cross = [r for r in rows if r["kind"] == "crossover"]
    assert len(cross) == 1 and cross[0]["p"] == 0.25
    assert abs(cross[0]["lambda"] - 10.58) <= 0.01
    assert len([r for r in rows if r["kind"] == "psi"]) == 20


def test_figure1_severity_holds():
    code, out, _ = run("figure-data", "--figure", "1", "--p", "0.25", "0.5", "0.9", "--lambda-max", "30")
    assert code == 0
    assert all(r["psi_uniform"] >= r["psi_other"] for r in io.read_csv(out))


def test_figure1_assertion_fires_for_small_p():
    code, out, err = run("figure-data", "--figure", "1", "--p", "0.1", "--lambda", "5")
    assert code == 3 and "geometric" in err
    assert io.read_csv(out)  # the data is emitted before the check


def test_figure_low_grid_is_all_ones():
    rows = io.read_csv(run("figure-data", "--figure", "2", "--p", "0.5", "--lambda-max", "2", "--points", "8")[1])
    assert all(r["psi_uniform"] == 1.0 for r in rows)


def test_simulate_json_is_reproducible(tmp_path):
    argv = ("simulate", "--model", "tree", "--d", "2", "--lambda", "6", "--seed", "42", "--replicates", "300")
    first, second = run(*argv), run(*argv, "--threads", "2")
    assert first[0] == 0 and first[1] == second[1]
    doc = json.loads(first[1])
    assert doc["schema"] == "v1" and doc["command"] == "simulate"
    res = doc["results"]
    assert res["extinct_count"] + res["survived_count"] == 300
    times = tmp_path / "times.csv"
    run(*argv, "--times-out", str(times))
    assert len(io.read_csv(times.read_text())) == res["extinct_count"]


def test_validate_quick_and_fault():
    code, out, _ = run("validate", "--level", "quick")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run("validate", "--level", "quick", "--inject-fault", "psi3-sign")
    assert code == 3
    assert "FAIL  psi3-fixed-point-residual" in out
    assert run("validate", "--inject-fault", "nope")[0] == 2


def test_validate_json():
    code, out, _ = run("validate", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and all(r["passed"] for r in doc["results"])


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "catlab.cli", "psi", "--model", "free", "--lambda", "4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "fixed-point" in proc.stdout
