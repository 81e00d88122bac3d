import json
import subprocess
import sys

import pytest

from dssp.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_machine_output(capsys, servers_path):
    code, out, _ = run(capsys, "synth", servers_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["level"] == 3
    assert doc["policies"][1]["protect"] == {"q0": ["b1", "b4"]}


def test_synth_text_output_and_trace(capsys, servers_path):
    code, out, err = run(capsys, "synth", servers_path, "--format", "text", "--trace")
    assert code == 0
    assert out.splitlines()[0] == "level 3"
    assert "G1: q0 -> {a1}; q1 -> {a2}" in out
    assert "chosen: G2" in err and "V = [1, 3]" in err


def test_synth_writes_files(capsys, tmp_path, servers_path):
    sol, trace, dots = tmp_path / "sol.json", tmp_path / "trace.json", tmp_path / "dot"
    code, out, _ = run(capsys, "synth", servers_path, "--out", str(sol), "--trace", str(trace), "--dot", str(dots))
    assert code == 0 and out == ""
    assert json.loads(sol.read_text())["status"] == "SOLUTION"
    assert json.loads(trace.read_text())["pairs"][1]["chosen"] == 1
    names = {p.name for p in dots.iterdir()}
    assert {"G1_original.dot", "G2_original.dot", "pair2_G2_round2_plant.dot"} <= names
    assert "b1′" in (dots / "pair2_G2_round2_plant.dot").read_text()
    assert not [p for p in tmp_path.iterdir() if p.name.endswith(".tmp")]


def test_synth_no_solution(capsys, servers_r3_path):
    code, out, _ = run(capsys, "synth", servers_r3_path)
    assert code == 1
    assert json.loads(out) == {"status": "NO_SOLUTION"}


def test_synth_is_byte_identical(capsys, servers_path):
    outputs = {run(capsys, "synth", servers_path, "--trace")[1:] for _ in range(3)}
    assert len(outputs) == 1


def test_verify(capsys, tmp_path, servers_path):
    sol = tmp_path / "sol.json"
    run(capsys, "synth", servers_path, "--out", str(sol))
    code, out, _ = run(capsys, "verify", servers_path, str(sol))
    assert code == 0 and out.splitlines()[-1] == "PASS"
    code, out, _ = run(capsys, "verify", servers_path, str(sol), "--format", "machine")
    assert code == 0 and json.loads(out)["status"] == "PASS"

    blank = tmp_path / "blank.json"
    blank.write_text("")
    code, out, _ = run(capsys, "verify", servers_path, str(blank))
    assert code == 1 and out.splitlines()[-1] == "FAIL"


def test_verify_rejects_impossible_policy(capsys, tmp_path, servers_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"status": "SOLUTION", "policies": [{"agent": 1, "protect": {"q0": ["a3"]}}]}))
    code, _, err = run(capsys, "verify", servers_path, str(bad))
    assert code == 2 and "a3" in err


def test_solvable_and_oracle(capsys, servers_path, servers_r3_path):
    assert run(capsys, "solvable", servers_path)[:2] == (0, "yes\n")
    assert run(capsys, "solvable", servers_r3_path)[:2] == (1, "no\n")
    assert run(capsys, "oracle-k", servers_path)[:2] == (0, "3\n")
    assert run(capsys, "oracle-k", servers_r3_path)[:2] == (1, "none\n")


def test_gen_is_reproducible_and_valid(capsys, tmp_path):
    code, first, _ = run(capsys, "gen", "--seed", "5", "--agents", "2-3", "--states", "4:6")
    assert code == 0
    assert run(capsys, "gen", "--seed", "5", "--agents", "2-3", "--states", "4:6")[1] == first
    model = tmp_path / "m.json"
    model.write_text(first)
    assert run(capsys, "validate", str(model))[0] == 0
    assert 2 <= len(json.loads(first)["agents"]) <= 3


def test_gen_bad_arguments(capsys):
    assert run(capsys, "gen", "--agents", "0")[0] == 2
    with pytest.raises(SystemExit) as info:
        main(["gen", "--agents", "x"])
    assert info.value.code == 2


def test_render(capsys, tmp_path, servers_path):
    sol = tmp_path / "sol.json"
    run(capsys, "synth", servers_path, "--out", str(sol))
    out = tmp_path / "dot"
    assert run(capsys, "render", servers_path, "--dot", str(out), "--policy", str(sol))[0] == 0
    assert "protected=true" in (out / "G2.dot").read_text()


def test_invalid_model_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.yaml"
    bad.write_text("agents: [\n")
    code, _, err = run(capsys, "synth", str(bad))
    assert code == 2 and "SYNTAX" in err and "line 2" in err


def test_missing_file_exit_code(capsys, tmp_path):
    code, _, err = run(capsys, "synth", str(tmp_path / "absent.json"))
    assert code == 3 and "cannot read" in err


def test_unwritable_output(capsys, tmp_path, servers_path):
    code, _, _ = run(capsys, "synth", servers_path, "--out", str(tmp_path / "no" / "such" / "dir" / "x.json"))
    assert code == 3


def test_greedy_flag(capsys, tmp_path):
    model = tmp_path / "m.json"
    model.write_text(run(capsys, "gen", "--seed", "4480")[1])
    assert json.loads(run(capsys, "synth", str(model), "--greedy")[1])["level"] == 3
    assert json.loads(run(capsys, "synth", str(model))[1])["level"] == 2


def test_module_entry_point(servers_path):
    proc = subprocess.run(
        [sys.executable, "-m", "dssp", "oracle-k", servers_path], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout == "3\n"
