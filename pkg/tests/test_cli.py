import json
import subprocess
import sys

import pytest

from homsynth.cli import main
from homsynth.circuit import Circuit

PENDANT_CYCLE = "e 1 2 / e 2 3 / e 3 4 / e 1 4 / e 2 6 / e 4 5"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_param_prints_value(capsys):
    code, out, _ = run(capsys, "param", "--graph", "dary:2:3", "--delta", "2", "--pruned", "true", "--format", "text")
    assert code == 0 and out.startswith("ptw_delta(delta=2) = 1")


def test_param_json_report(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "param", "--graph", "cycle:6", "--delta", "3", "--out", str(cert))
    report = json.loads(out)
    assert code == 0 and report["result"]["value"] == 2
    assert report["tool"] == "homsynth" and report["seed"] == 0
    assert json.loads(cert.read_text())["parameter"] == "tw_delta"


def test_param_path_mode(capsys):
    code, out, _ = run(capsys, "param", "--graph", "cycle:4", "--delta", "2", "--decomposition", "path")
    assert code == 0 and json.loads(out)["result"]["parameter"] == "pw_delta"


def test_synth_verify_extract_census(capsys, tmp_path):
    circ = tmp_path / "c.json"
    code, out, _ = run(capsys, "synth", "--graph", PENDANT_CYCLE, "--n", "2", "--delta", "2", "--poly", "colsub", "--out", str(circ))
    assert code == 0
    assert json.loads(out)["result"]["product_depth"] <= 2
    Circuit.from_json(circ.read_text())
    code, out, _ = run(capsys, "verify", "--circuit", str(circ), "--graph", PENDANT_CYCLE, "--n", "2", "--poly", "colsub")
    assert code == 0 and json.loads(out)["result"]["equal"] is True
    code, out, _ = run(capsys, "extract", "--circuit", str(circ), "--graph", PENDANT_CYCLE)
    assert code == 0 and json.loads(out)["result"]["invalid_count"] == 0
    code, out, _ = run(capsys, "census", "--circuit", str(circ), "--graph", PENDANT_CYCLE, "--n", "2")
    assert code == 0 and json.loads(out)["result"]["parse_trees"] == 64


def test_verify_mismatch_exit_code(capsys, tmp_path):
    circ = tmp_path / "c.json"
    run(capsys, "synth", "--graph", "clique:3", "--n", "2", "--delta", "1", "--poly", "hom", "--out", str(circ))
    code, out, _ = run(capsys, "verify", "--circuit", str(circ), "--graph", "clique:3", "--n", "3", "--poly", "hom")
    assert code == 1 and json.loads(out)["result"]["equal"] is False


def test_abp_round_trip_through_verify(capsys, tmp_path):
    abp = tmp_path / "abp.json"
    code, out, _ = run(capsys, "synth", "--graph", "path:4", "--n", "3", "--delta", "3", "--poly", "hom", "--abp",
                       "--out", str(abp))
    result = json.loads(out)["result"]
    assert code == 0 and result["abp"]["length"] <= 3 and result["skew_circuit"]["skew"]
    code, out, _ = run(capsys, "verify", "--circuit", str(abp), "--graph", "path:4", "--n", "3", "--poly", "hom")
    assert code == 0 and json.loads(out)["result"]["abp"] is True


def test_abp_degree_error_exit_code(capsys):
    code, _, err = run(capsys, "synth", "--graph", "clique:3", "--n", "2", "--delta", "2", "--poly", "hom", "--abp")
    assert code == 2 and "length 2 < degree 3" in err


def test_reduce_both_directions(capsys, tmp_path):
    col = tmp_path / "col.json"
    hom = tmp_path / "hom.json"
    run(capsys, "synth", "--graph", "clique:3", "--n", "2", "--delta", "1", "--poly", "colsub", "--out", str(col))
    code, out, _ = run(capsys, "reduce", "--circuit", str(col), "--graph", "clique:3", "--direction", "colsub-to-hom",
                       "--out", str(hom))
    result = json.loads(out)["result"]
    assert code == 0 and result["before"]["product_depth"] == result["after"]["product_depth"]
    code, out, _ = run(capsys, "verify", "--circuit", str(hom), "--graph", "clique:3", "--n", "2", "--poly", "hom")
    assert code == 0
    code, _, err = run(capsys, "reduce", "--circuit", str(col), "--graph", "clique:3", "--direction", "hom-to-colsub")
    assert code == 2 and "--n" in err


def test_hom_to_colsub_cli(capsys, tmp_path):
    hom = tmp_path / "hom.json"
    col = tmp_path / "col.json"
    run(capsys, "synth", "--graph", "clique:2", "--n", "4", "--delta", "1", "--poly", "hom", "--out", str(hom))
    code, _, _ = run(capsys, "reduce", "--circuit", str(hom), "--graph", "clique:2", "--direction", "hom-to-colsub",
                     "--n", "2", "--out", str(col))
    assert code == 0
    code, _, _ = run(capsys, "verify", "--circuit", str(col), "--graph", "clique:2", "--n", "2", "--poly", "colsub")
    assert code == 0


def test_scale_and_hierarchy(capsys):
    code, out, _ = run(capsys, "scale", "--graph", "clique:3", "--delta", "1", "--poly", "hom", "--n-list", "4,8,16")
    result = json.loads(out)["result"]
    assert result["w"] == 3 and len(result["rows"]) == 3
    assert code == (0 if result["ok"] else 1)
    code, out, _ = run(capsys, "hierarchy", "--d", "2", "--delta", "1", "--format", "text")
    assert code == 0 and "ptw_2 = 1" in out


def test_input_errors_exit_2(capsys):
    code, _, err = run(capsys, "param", "--graph", "e 1 1", "--delta", "2")
    assert code == 2 and "self-loop" in err
    code, _, _ = run(capsys, "verify", "--circuit", "/nonexistent.json", "--graph", "clique:2", "--n", "2",
                     "--poly", "hom")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--graph", "clique:2"])
    assert exc.value.code == 2


def test_capacity_exit_3(capsys, monkeypatch):
    code, _, err = run(capsys, "synth", "--graph", "clique:4", "--n", "30", "--delta", "1", "--poly", "hom",
                       "--gate-cap", "1000")
    assert code == 3 and "gate cap" in err
    monkeypatch.setenv("HOMSYNTH_GATE_CAP", "10")
    code, _, _ = run(capsys, "synth", "--graph", "clique:3", "--n", "2", "--delta", "1", "--poly", "hom")
    assert code == 3


def test_dot_artifact(capsys, tmp_path):
    dot = tmp_path / "c.dot"
    code, _, _ = run(capsys, "synth", "--graph", "clique:3", "--n", "2", "--delta", "1", "--poly", "hom",
                     "--format", "dot", "--out", str(dot))
    assert code == 0 and dot.read_text().startswith("digraph circuit")


def test_byte_identical_reruns(capsys, tmp_path):
    outputs = []
    for i in range(2):
        art, rep = tmp_path / f"c{i}.json", tmp_path / f"r{i}.json"
        run(capsys, "synth", "--graph", PENDANT_CYCLE, "--n", "3", "--delta", "2", "--poly", "colsub", "--seed", "42",
            "--out", str(art), "--report", str(rep))
        outputs.append((art.read_bytes(), rep.read_bytes().replace(str(art).encode(), b"")))
    assert outputs[0] == outputs[1]


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "homsynth", "param", "--graph", "clique:3", "--delta", "1", "--format", "text"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "tw_delta(delta=1) = 2" in proc.stdout
