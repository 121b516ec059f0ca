import csv
import json

import pytest

from hypercyclic.cli import main

UNIT = ["--interval", "0,1"]
SAME = ["--f", "1,0,1,2", "--g", "1,0,1,2"]
INC = ["--f", "1,0,1,2", "--g", "3,1,1,3"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_anchor_pair(capsys):
    code, out, err = run(capsys, "classify", "--f", "1,1,0,1", "--g", "0,1,1,0", "--interval", "0,inf,oo")
    v = json.loads(out)
    assert code == 0 and v["hypercyclic"] and v["case"] == "MixedOntoSubcase"
    assert "hypercyclic" in err


def test_classify_equal_maps_fail(capsys):
    code, out, _ = run(capsys, "classify", *SAME, *UNIT)
    assert code == 1 and json.loads(out)["hypercyclic"] is False


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["--f", "1,0,1,2", "--g", "1,0,1,2", "--interval", "-inf,inf"], "real line"),
        (["--f", "1,2,2,4", "--g", "1,0,1,2", *UNIT], "determinant"),
        (["--f", "0,1,1,0", "--g", "1,0,1,2", *UNIT], "pole"),
        (["--f", "1.5,1,0,1", "--g", "1,0,1,2", *UNIT], "exact rational"),
        (["--f", "1,0,1", "--g", "1,0,1,2", *UNIT], "four coefficients"),
        (["--f", "1,0,1,2", *UNIT], "--input"),
    ],
)
def test_classify_invalid_input(capsys, argv, needle):
    code, out, err = run(capsys, "classify", *argv)
    assert code == 2 and out == "" and needle in err


def test_negative_values_bind_to_their_flag(capsys):
    code, out, _ = run(capsys, "classify", "--f", "-1,0,-1,-2", "--g", "3,1,1,3", "--interval", "-inf,0,oc")
    assert code == 2  # -x/(-x-2) = x/(x+2) is not a self-map of (-inf, 0]
    code, out, _ = run(capsys, "classify", "--f", "-1,0,-1,-2", "--g", "-3,-1,-1,-3", *UNIT)
    assert code == 0 and json.loads(out)["hypercyclic"]


def test_input_file(capsys, tmp_path):
    p = tmp_path / "pair.json"
    p.write_text(json.dumps({"f": ["1", "1", "0", "1"], "g": ["0", "1", "1", "0"],
                             "interval": {"lo": "0", "hi": "inf", "lo_closed": False, "hi_closed": False}}))
    code, out, _ = run(capsys, "classify", "--input", str(p))
    assert code == 0
    code, _, err = run(capsys, "classify", "--input", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err


def test_orbit_pass_and_csv(capsys, tmp_path):
    path = tmp_path / "gaps.csv"
    code, out, _ = run(capsys, "orbit", *INC, *UNIT, "--start", "0", "--budget", "100000",
                       "--epsilon", "0.02", "--omit-points", "--csv", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["certificate"] == "Pass" and "points" not in rep
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["budget", "max_gap", "gap_lo", "gap_hi"] and len(rows) > 10


def test_orbit_fail_and_invalid(capsys):
    code, out, _ = run(capsys, "orbit", *SAME, *UNIT, "--start", "1", "--budget", "500", "--epsilon", "0.02")
    rep = json.loads(out)
    assert code == 1 and rep["certificate"] == "Fail"
    assert abs(float(rep["max_gap"]) - 2 / 3) < 1e-12
    code, _, err = run(capsys, "orbit", *SAME, *UNIT, "--budget", "0")
    assert code == 2 and "budget" in err
    code, _, _ = run(capsys, "orbit", *SAME, *UNIT, "--start", "2")
    assert code == 2


def test_orbit_output_is_byte_identical(capsys):
    argv = ["orbit", *INC, *UNIT, "--start", "1/3", "--budget", "4000"]
    _, one, _ = run(capsys, *argv)
    _, two, _ = run(capsys, *argv, "--workers", "3")
    assert one == two


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "impt", "--seed", "7", "--cases", "50")
    assert code == 0 and json.loads(out)["passed"]
    code, out, err = run(capsys, "verify", "--suite", "nosuch")
    assert code == 2 and out == "" and "unknown suite" in err
    code, _, _ = run(capsys, "verify", "--suite", "impt", "--cases", "0")
    assert code == 2


def test_verify_imp3_reports_the_failing_bound(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "imp3", "--seed", "7", "--cases", "5")
    rep = json.loads(out)
    assert code == 1 and rep["failed"] > 0 and set(rep["notes"]["violations_by_mn"]) == {"1,1"}


def test_batch_keeps_order_and_flags_bad_entries(capsys, tmp_path, catalog):
    entries = [{k: e[k] for k in ("f", "g", "interval")} for e in catalog[:20]]
    entries.insert(5, {"f": ["1", "2", "2", "4"], "g": ["1", "0", "1", "2"], "interval": "0,1"})
    p = tmp_path / "batch.json"
    p.write_text(json.dumps(entries))
    code, out, _ = run(capsys, "batch", "--input", str(p))
    lines = out.splitlines()
    assert code == 2 and len(lines) == 21 and "error" in json.loads(lines[5])
    code2, out2, _ = run(capsys, "batch", "--input", str(p), "--workers", "3")
    assert code2 == 2 and out2 == out
    expected = [e["expected"]["label"] for e in catalog[:20]]
    got = [json.loads(line)["label"] for i, line in enumerate(lines) if i != 5]
    assert got == expected


def test_batch_rejects_non_arrays(capsys, tmp_path):
    p = tmp_path / "obj.json"
    p.write_text("{}")
    code, _, err = run(capsys, "batch", "--input", str(p))
    assert code == 2 and "array" in err


def test_normalize(capsys):
    code, out, _ = run(capsys, "normalize", *INC, *UNIT)
    pair = json.loads(out)
    assert code == 0 and pair["case_tag"] == "BothIncreasing" and (pair["a"], pair["b"], pair["c"]) == ("2", "2", "1")
    code, _, err = run(capsys, "normalize", "--f", "1,0,1,2", "--g", "0,1,-2,3", *UNIT)
    assert code == 1 and "canonical" in err


def test_json_keys_are_sorted(capsys):
    _, out, _ = run(capsys, "classify", *INC, *UNIT)
    assert out == json.dumps(json.loads(out), sort_keys=True) + "\n"
