import io
import json
from importlib import resources

import jsonschema
import pytest

from polydist.cli import run

SCHEMA = json.loads(resources.files("polydist").joinpath("schemas/run_report.schema.json").read_text())


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    doc = json.loads(out)
    jsonschema.validate(doc, SCHEMA)
    return doc


FACTOR = json.dumps({"p": 2, "n": 7, "polys": [{"degree_slot": 2, "text": "S2"},
                                               {"degree_slot": 4, "text": "S4"}]})

COMMANDS = [
    ["norm", "--p", "2", "--n", "4", "--poly", "S4", "--order", "4"],
    ["norm", "--p", "2", "--n", "6", "--poly", "S4", "--order", "4", "--method", "mc",
     "--samples", "2000", "--seed", "1"],
    ["norm", "--p", "2", "--n", "4", "--poly", "S4", "--order", "4", "--method", "weak"],
    ["bias", "--p", "3", "--n", "1", "--poly", "x1^2"],
    ["rank", "--p", "2", "--n", "4", "--poly", "x1*x2 + x3*x4"],
    ["rank", "--p", "2", "--n", "3", "--poly", "x1*x2*x3", "--mode", "brute", "--d", "2"],
    ["rank", "--p", "2", "--n", "7", "--poly", "S6", "--mode", "measurable", "--witness", "S2",
     "--witness", "S4"],
    ["factor", "census", "--factor", FACTOR],
    ["factor", "regularize", "--factor", FACTOR, "--growth", "1"],
    ["factor", "faces", "--dims", "1,1", "--k", "3"],
    ["factor", "count-boxes", "--factor", json.dumps({"p": 2, "n": 3, "polys": [
        {"degree_slot": 2, "text": "x1*x2"}]}), "--x", "0,0,0", "--k", "2"],
    ["factor", "represent", "--factor", FACTOR, "--poly", "S6", "--D", "6"],
    ["factor", "ideal", "--p", "2", "--n", "3", "--poly", "x1*x3 + x2", "--gen", "x1", "--gen", "x2"],
    ["bv", "approximate", "--p", "2", "--n", "6", "--poly", "x1*x2", "--k", "21", "--seed", "3",
     "--replay", "100"],
    ["bv", "agreement", "--p", "2", "--n", "6", "--poly", "x1*x2", "--sigma", "0.5", "--delta", "0.5",
     "--seed", "3"],
    ["bv", "measures", "--p", "3", "--n", "2", "--poly", "x1^2"],
    ["sym", "qident", "--n", "3"],
    ["sym", "b6", "--n", "3"],
    ["sym", "mod8", "--n", "3"],
    ["sym", "correlate", "--n", "8"],
    ["sym", "moebius", "--d", "4"],
    ["sym", "variety", "--d", "4", "--n", "8", "--trials", "100", "--seed", "1"],
    ["sym", "ramsey", "--graph", json.dumps({"n": 10, "edges2": [[1, 2]], "edges3": [[1, 2, 3]]})],
    ["sym", "factorize", "--d", "6", "--n", "7"],
    ["verify", "nonvanishing", "--n", "4", "--trials", "5", "--seed", "1"],
    ["verify", "recurrence", "--n", "4", "--trials", "5", "--seed", "1"],
    ["verify", "inverse", "--p", "3", "--d", "1", "--n", "2", "--trials", "3", "--seed", "1"],
    ["verify", "gauss", "--p", "3", "--n", "3", "--trials", "3", "--seed", "1"],
    ["verify", "qident", "--n", "8", "--trials", "100", "--seed", "1"],
    ["verify", "moebius-derivative", "--d", "2", "--p", "3", "--n", "2", "--seed", "1"],
    ["verify", "variety", "--d", "3", "--n", "6", "--trials", "50", "--seed", "1"],
    ["verify", "lucas", "--n", "6"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: " ".join(a[:2]))
def test_every_command_emits_a_valid_report(argv):
    doc = report(*argv)
    assert doc["params"]["format"] == "json"
    again = report(*argv)
    assert again["result"] == doc["result"]


def test_documented_examples():
    assert report("bias", "--p", "3", "--n", "1", "--poly", "x1^2")["result"]["magnitude"] == \
        pytest.approx(3**-0.5)
    assert report("sym", "mod8", "--n", "3")["result"]["counts"] == [1, 3, 3, 1, 0, 0, 0, 0]
    doc = report("norm", "--p", "2", "--n", "4", "--poly", "S4", "--order", "4", "--method", "weak")
    assert (doc["result"]["exact"], doc["result"]["witness"]) == ("7/8", "0")
    assert doc["provenance"] == "exhaustive"


def test_params_echo_seed():
    doc = report("verify", "recurrence", "--n", "3", "--trials", "2", "--seed", "42")
    assert doc["params"]["seed"] == 42 and doc["provenance"] == "monte_carlo"


@pytest.mark.parametrize("argv", [
    ["norm", "--p", "2", "--n", "6", "--poly", "S4", "--order", "4", "--method", "mc"],
    ["bv", "agreement", "--p", "2", "--n", "4", "--poly", "x1*x2", "--k", "3"],
    ["sym", "variety", "--d", "4", "--n", "8"],
    ["verify", "nonvanishing"],
])
def test_missing_seed_is_usage_error(argv):
    code, out, err = call(*argv)
    assert code == 2 and out == "" and "--seed" in err


def test_exit_codes():
    assert call("bias", "--p", "2", "--n", "2", "--poly", "x1", "--bogus")[0] == 2
    assert call("frobnicate")[0] == 2
    assert call("bias", "--p", "4", "--n", "2", "--poly", "x1")[0] == 4
    assert call("bias", "--p", "2", "--n", "2", "--poly", "x1 +")[0] == 4
    code, _, err = call("norm", "--p", "2", "--n", "12", "--poly", "S4", "--order", "4")
    assert code == 3 and "max_cube_bits" in err
    assert call("bias", "--p", "2", "--n", "24", "--poly", "x1", "--max-table-bits", "20")[0] == 3
    assert call("factor", "faces", "--dims", "1,1", "--k", "2")[0] == 4
    assert call("bias", "--p", "2", "--n", "2", "--poly", "x1", "--format", "csv")[0] == 2


def test_csv_output():
    code, out, _ = call("sym", "correlate", "--n", "8", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "coeffs,value,value_float" and len(lines) == 17


def test_thread_count_does_not_change_results():
    base = ["norm", "--p", "2", "--n", "8", "--poly", "S4", "--order", "4", "--method", "mc",
            "--samples", "200000", "--seed", "9"]
    results = {json.dumps(report(*base, "--threads", t)["result"]) for t in ("1", "4", "8")}
    assert len(results) == 1
