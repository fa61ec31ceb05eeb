import csv
import json
import subprocess
import sys

import pytest

from frobtest import Caps, builtin_ring, load_ring
from frobtest.cli import main
from frobtest.frobenius import Witness
from frobtest.harness import (
    HOLDS, SUMMARY_COLUMNS, cmd_batch, cmd_verify_bound, cmd_verify_properties, strip_timing)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def ring_file(tmp_path):
    def write(name, data):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(data))
        return str(path)
    return write


FERMAT = {"characteristic": 2, "variables": ["x", "y", "z"], "relations": ["x^3+y^3+z^3"],
          "order": "grevlex", "label": "fermat"}


def test_fte_command(capsys, ring_file):
    path = ring_file("fermat2", FERMAT)
    code, out, _ = run(capsys, "fte", "--ring", path, "--ideal", "x,y")
    assert code == 0
    assert out.splitlines()[0] == "Fte = 1 [CERTIFIED]"
    assert "witness: (z^2)^(2^1)" in out


def test_closure_command(capsys):
    code, out, _ = run(capsys, "closure", "--ring", "poly2", "--ideal", "x^2,y")
    assert code == 0 and out.startswith("I^F = I, Fte = 0")


def test_hsl_command(capsys):
    code, out, _ = run(capsys, "hsl", "--ring", "sr2", "--degree", "1")
    assert code == 0 and out.strip() == "HSL(H^1) = 0, F-nilpotent: no [CERTIFIED-WINDOW]"
    code, out, _ = run(capsys, "hsl", "--ring", "fermat2")
    assert code == 0
    assert "HSL(R) = 1 [CERTIFIED-WINDOW]" in out
    assert "= 1 [CERTIFIED-WINDOW]" in out.splitlines()[-1]


def test_hsl_with_explicit_sequence(capsys):
    code, out, _ = run(capsys, "hsl", "--ring", "fermat2", "--ideal", "y,z", "--degree", "2")
    assert code == 0 and out.startswith("HSL(H^2) = 1")
    code, _, err = run(capsys, "hsl", "--ring", "fermat2", "--ideal", "x,y,z")
    assert code == 1 and "not a system of parameters" in err


def test_h0_command(capsys):
    code, out, _ = run(capsys, "h0", "--ring", "nonreduced2")
    assert code == 0
    assert out.splitlines()[:2] == ["length(H^0_m(R/K)) = 1", "basis: x"]


def test_json_output(capsys):
    code, out, _ = run(capsys, "fte", "--ring", "fermat2", "--ideal", "x,y", "--json")
    data = json.loads(out)
    assert code == 0 and data["result"]["fte"]["value"] == 1
    assert data["result"]["fte"]["status"] == "CERTIFIED"
    assert data["ring"]["label"] == "fermat2"


def test_truncation_exit_code(capsys, monkeypatch):
    code, out, _ = run(capsys, "fte", "--ring", "fermat2", "--ideal", "x,y", "--max-e", "1")
    assert code == 2 and "TRUNCATED(max_e)" in out
    monkeypatch.setenv("FROBTEST_MAX_E", "1")
    assert run(capsys, "fte", "--ring", "fermat2", "--ideal", "x,y")[0] == 2
    # flags win over the environment
    assert run(capsys, "fte", "--ring", "fermat2", "--ideal", "x,y", "--max-e", "4")[0] == 0


@pytest.mark.parametrize("argv,message", [
    (["fte", "--ring", "nosuchring", "--ideal", "x"], "no such ring file"),
    (["fte", "--ring", "poly2", "--ideal", "x,,y"], "empty generator"),
    (["fte", "--ring", "poly2", "--ideal", "x+"], "error:"),
    (["fte", "--ring", "poly2", "--ideal", "w"], "unknown variable"),
    (["fte", "--ring", "poly2", "--ideal", "x"], "positive dimension"),
])
def test_errors_exit_one(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 1 and err.startswith("error:") and message in err


def test_malformed_ring_file(capsys, ring_file):
    path = ring_file("bad", {"characteristic": 4, "variables": ["x"], "relations": []})
    code, _, err = run(capsys, "fte", "--ring", path, "--ideal", "x")
    assert code == 1 and "prime" in err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "frobtest", "fte", "--ring", "fermat2",
                           "--ideal", "x,y"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0 and proc.stdout.startswith("Fte = 1 [CERTIFIED]")


def test_load_ring_file_round_trip(ring_file):
    R = load_ring(ring_file("fermat", FERMAT))
    assert R.to_ringfile() == {**FERMAT, "relations": ["x^3 + y^3 + z^3"]}


# -- harness ----------------------------------------------------------------

def test_verify_bound_report(sr2):
    rep = cmd_verify_bound(sr2, samples=3)
    assert rep["verdict"] == HOLDS and rep["counts"]["VIOLATED"] == 0
    assert rep["hsl"]["bound"]["value"] == 0
    assert len(rep["samples"]) == 3
    assert all(r["fte"]["value"] == 0 for r in rep["samples"])


def test_bound_report_witnesses_reverify(fermat2):
    rep = cmd_verify_bound(fermat2, samples=3)
    assert rep["verdict"] == HOLDS
    for row in rep["samples"]:
        q = fermat2.ideal(",".join(row["ideal"]))
        for w in row["witnesses"]:
            assert Witness(fermat2.parse(w["element"]), w["e"]).verify(fermat2, q)


def test_verify_properties_report(nonreduced2):
    rep = cmd_verify_properties(nonreduced2, samples=2, e_max=2)
    assert rep["verdicts"] == {"identity": HOLDS, "subadditivity": HOLDS, "ladder": HOLDS}
    for row in rep["samples"]:
        assert len(row["claims"]["subadditivity"]) == 2


def test_ladder_undecided_when_caps_bite(fermat2):
    rep = cmd_verify_properties(fermat2, samples=1, e_max=1, caps=Caps(max_e=1))
    assert rep["verdicts"]["ladder"] == "UNDECIDED"
    assert rep["verdict"] == "UNDECIDED"


def test_verify_cli_exit_codes(capsys):
    code, out, _ = run(capsys, "verify-bound", "--ring", "poly2", "--samples", "2")
    assert code == 0 and "bound claim: HOLDS" in out
    code, out, _ = run(capsys, "verify-properties", "--ring", "fermat2", "--samples", "1",
                       "--e-max", "1", "--max-e", "1")
    assert code == 2 and "overall: UNDECIDED" in out


def _small_manifest(tmp_path, extra=()):
    data = {"defaults": {"samples": 2, "e_max": 1},
            "rings": [{"ring": "builtin:poly2"}, {"ring": "nonreduced2"}, *extra]}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(data))
    return path


def test_batch_writes_reports_and_summary(tmp_path):
    code, results = cmd_batch(_small_manifest(tmp_path), tmp_path / "out")
    assert code == 0 and [r["status"] for r in results] == ["OK", "OK"]
    with open(tmp_path / "out" / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == list(SUMMARY_COLUMNS)
    assert [(r["label"], r["bound"], r["bound_verdict"]) for r in rows] == [
        ("poly2", "0", "HOLDS"), ("nonreduced2", "1", "HOLDS")]
    assert (tmp_path / "out" / "poly2.json").exists()


def test_batch_isolates_failures(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, results = cmd_batch(_small_manifest(tmp_path, [{"ring": "bad.json"}]), tmp_path / "out")
    assert code == 2
    assert [r["status"] for r in results] == ["OK", "OK", "FAILED"]
    with open(tmp_path / "out" / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[2]["status"] == "FAILED" and rows[0]["status"] == "OK"


def test_batch_empty_manifest(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"rings": []}))
    code, out, _ = run(capsys, "batch", "--manifest", str(path), "--out-dir", str(tmp_path / "o"))
    assert code == 0
    assert (tmp_path / "o" / "summary.csv").read_text().strip() == ",".join(SUMMARY_COLUMNS)


def _reports(out_dir):
    return {p.name: strip_timing(json.loads(p.read_text()))
            for p in sorted(out_dir.glob("*.json"))}


def test_batch_is_deterministic_across_runs_and_jobs(tmp_path):
    manifest = _small_manifest(tmp_path)
    cmd_batch(manifest, tmp_path / "a")
    cmd_batch(manifest, tmp_path / "b", jobs=2)
    a, b = _reports(tmp_path / "a"), _reports(tmp_path / "b")
    assert a and a == b
    assert (tmp_path / "a" / "summary.csv").read_bytes() == (tmp_path / "b" / "summary.csv").read_bytes()


def test_package_docstring_example():
    import doctest

    import frobtest
    assert doctest.testmod(frobtest).failed == 0
