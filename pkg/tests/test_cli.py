import json

import pytest

from dichotomy.cli import main, parse_script
from dichotomy.engine import Decision, read_trace


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_run_exact_single_hole(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, out, _ = run(["run", "--prop", "single-hole:13", "--prover", "exact", "--steps", "12", "--out", str(path)], capsys)
    assert code == 0
    assert json.loads(path.read_text())["candidate_prefix"] == "13"
    assert "candidate: 13" in out
    assert "density: 1/4096" in out


def test_run_scripted_all_odd(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, out, _ = run(
        ["run", "--prop", "single-hole:13", "--prover", "scripted:odd,odd,odd,odd,odd,odd", "--out", str(path)], capsys
    )
    assert code == 0
    assert json.loads(path.read_text())["candidate_prefix"] == "0"
    assert "EventuallyOddOnly" not in out  # window 16 > 6 steps


def test_run_stuck(tmp_path, capsys):
    code, out, _ = run(["run", "--prop", "multi-hole:5,13", "--prover", "exact", "--out", str(tmp_path / "t.json")], capsys)
    assert code == 2
    assert "stuck at step 4" in out


def test_run_closed_both(tmp_path, capsys):
    code, out, _ = run(["run", "--prop", "multi-hole:", "--out", str(tmp_path / "t.json")], capsys)
    assert code == 2
    assert "closed-both at step 1" in out


def test_run_script_too_short_aborts(tmp_path, capsys):
    code, _, err = run(["run", "--prover", "scripted:odd", "--steps", "3", "--out", str(tmp_path / "t.json")], capsys)
    assert code == 4
    assert "aborted" in err


def test_run_finite(tmp_path, capsys):
    code, out, _ = run(["run", "--prop", "single-hole:5", "--finite-bound", "100", "--out", str(tmp_path / "t.json")], capsys)
    assert code == 0
    assert "resolved at step 7" in out


def test_run_with_oracle(tmp_path, capsys):
    code, out, _ = run(
        ["run", "--prop", "single-hole:13", "--steps", "10", "--oracle-bound", "4096", "--out", str(tmp_path / "t.json")],
        capsys,
    )
    assert code == 0 and "oracle: ok" in out


def test_usage_errors(tmp_path, capsys):
    assert run(["run", "--prop", "bogus:1", "--out", str(tmp_path / "t.json")], capsys)[0] == 3
    assert run(["run", "--prop", "collatz:10", "--out", str(tmp_path / "t.json")], capsys)[0] == 3
    assert run(["run", "--prover", "scripted:up", "--out", str(tmp_path / "t.json")], capsys)[0] == 3
    assert run(["nope"], capsys)[0] == 3
    assert run(["candidate", str(tmp_path / "missing.json")], capsys)[0] == 3
    assert run(["run", "--prop", "single-hole:1", "--out", str(tmp_path / "no" / "dir" / "t.json")], capsys)[0] == 3


@pytest.mark.parametrize(
    "prop",
    ["single-hole:13", "single-hole:0", "multi-hole:7", "periodic:2:1011", "pullback:affine:2:1:single-hole:27"],
)
def test_run_then_verify_round_trip(tmp_path, capsys, prop):
    path = tmp_path / "t.json"
    run(["run", "--prop", prop, "--steps", "14", "--out", str(path)], capsys)
    code, out, _ = run(["verify", str(path), "--prop", prop, "--bound", "65536"], capsys)
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_verify_corrupted_trace(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(["run", "--prop", "single-hole:13", "--steps", "8", "--out", str(path)], capsys)
    obj = json.loads(path.read_text())
    obj["steps"][2]["proven_class"]["remainder"] = "3"
    path.write_text(json.dumps(obj))
    code, out, _ = run(["verify", str(path), "--prop", "single-hole:13", "--bound", "4096"], capsys)
    assert code == 1
    assert json.loads(out)["mismatch_count"] > 0


def test_verify_tampered_candidate(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(["run", "--prop", "single-hole:13", "--steps", "8", "--out", str(path)], capsys)
    obj = json.loads(path.read_text())
    obj["candidate_prefix"] = "14"
    path.write_text(json.dumps(obj))
    code, out, _ = run(["verify", str(path), "--bound", "4096"], capsys)
    assert code == 1 and json.loads(out)["ok"] is False


def test_verify_collatz_unknown_tags(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(["run", "--prover", "scripted:odd*4", "--out", str(path)], capsys)
    code, out, _ = run(["verify", str(path), "--prop", "collatz:20", "--bound", "1024"], capsys)
    assert code == 1
    tags = {v["tag"] for v in json.loads(out)["solved_violations"]}
    assert tags == {"unknown"}


def test_candidate_command(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(["run", "--prover", "scripted:even,odd,even", "--out", str(path)], capsys)
    code, out, _ = run(["candidate", str(path)], capsys)
    assert code == 0 and out.strip() == "5"


def test_deterministic_trace_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        run(["run", "--prop", "periodic:3:11011111", "--steps", "20", "--out", str(p)], capsys)
    assert a.read_bytes() == b.read_bytes()
    assert read_trace(a) == read_trace(b)


def test_collatz_verify_small(capsys):
    code, out, _ = run(["collatz", "verify", "--from", "1", "--to", "1000", "--budget", "10000"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["failures"] == []
    assert rep["max_steps"] == "178"


def test_collatz_verify_zero(capsys):
    code, out, _ = run(["collatz", "verify", "--from", "0", "--to", "1"], capsys)
    assert code == 1
    assert json.loads(out)["failures"][0]["n"] == "0"


def test_collatz_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("DICHOTOMY_THREADS", "2")
    code, out, _ = run(["collatz", "verify", "--to", "5000"], capsys)
    assert code == 0


def test_collatz_descent(capsys):
    code, out, _ = run(["collatz", "descent", "-k", "2"], capsys)
    lines = out.strip().splitlines()
    assert code == 0
    assert [line.split(":")[1].split("(")[0] for line in lines[:4]] == ["Descends", "Descends", "Descends", "Unknown"]
    assert lines[-1] == "certified fraction: 3/4"


def test_parse_script():
    assert parse_script("even,odd*3") == [Decision.PROVEN_EVEN] + [Decision.PROVEN_ODD] * 3
