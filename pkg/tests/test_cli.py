import json

import numpy as np
import pytest

from polyslot import morphism_to_json, tensor, wire
from polyslot.categories import haar_unitary
from polyslot.cli import run
from polyslot.fixtures import fixture_path


def run_json(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_verify_identity_passes(tmp_path, capsys):
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"kind": "identity", "input": [2], "output": [2]}))
    code, rep = run_json(capsys, ["verify", "--trials", "10", str(f)])
    assert code == 0
    assert rep["verdict"] == "pass"


def test_verify_discard_fails(tmp_path, capsys):
    code, rep = run_json(
        capsys,
        ["verify", "--trials", "10", str(fixture_path() / "discard_pseudo.json")],
    )
    assert code == 1
    assert rep["verdict"] == "fail"
    assert rep["max_unitarity_defect"] >= 0.1


def test_verify_reads_backend_key(capsys):
    # fixture files wrap the backend under a "backend" key; the CLI accepts both
    code, rep = run_json(
        capsys, ["verify", "--trials", "5", str(fixture_path() / "switch_backend.json")]
    )
    assert code == 0
    assert rep["verdict"] == "pass"


def test_decompose_identity(tmp_path, capsys):
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"kind": "identity", "input": [2], "output": [2]}))
    code, rep = run_json(capsys, ["decompose", str(f)])
    assert code == 0
    assert "comb" in rep


def test_pathing_check_and_extract(tmp_path, capsys):
    rng = np.random.default_rng(0)
    phi = tensor(haar_unitary([2], rng), haar_unitary([2], rng))
    f = tmp_path / "m.json"
    f.write_text(json.dumps(morphism_to_json(phi)))
    code, rep = run_json(
        capsys, ["pathing", "check", str(f), "--from", "1", "--to", "0"]
    )
    assert code == 0
    assert rep["no_path"] is True
    code, rep = run_json(
        capsys, ["pathing", "extract", str(f), "--from", "1", "--to", "0"]
    )
    assert code == 0
    assert rep["witness"]["memory"] == [1]


def test_pathing_check_fails_on_haar(tmp_path, capsys):
    phi = haar_unitary([2, 2], np.random.default_rng(0))
    f = tmp_path / "m.json"
    f.write_text(json.dumps(morphism_to_json(phi)))
    code, rep = run_json(
        capsys, ["pathing", "check", str(f), "--from", "1", "--to", "0"]
    )
    assert code == 1
    assert rep["no_path"] is False


def test_demo_loop(capsys):
    code, rep = run_json(capsys, ["demo", "loop", "--dim", "2"])
    assert code == 0
    assert rep["rejection"] == "AlreadyConnected"
    assert abs(rep["scalar"] - 0.5) <= 1e-10


def test_demo_interchange(capsys):
    code, rep = run_json(capsys, ["demo", "interchange", "--dim", "2"])
    assert code == 0
    assert rep["max_entry_difference"] > 0.1
    assert rep["interchange_holds"] is False


def test_demo_switch_with_plots(tmp_path, capsys):
    plot_dir = tmp_path / "plots"
    code, rep = run_json(
        capsys,
        ["demo", "switch", "--dim", "2", "--trials", "5", "--plot-dir", str(plot_dir)],
    )
    assert code == 0
    assert rep["closed_form_residual"] <= 1e-10
    assert rep["verify"]["verdict"] == "pass"
    names = sorted(p.name for p in plot_dir.iterdir())
    assert names == ["switch_output.csv", "switch_output.png"]


def test_polycat_check_builtin(capsys):
    code, rep = run_json(capsys, ["polycat", "check", "--trials", "5"])
    assert code == 0
    assert rep["verdict"] == "pass"


def test_polycat_eval_network(capsys):
    code, rep = run_json(
        capsys, ["polycat", "eval", str(fixture_path() / "loop_network.json")]
    )
    assert code == 0
    assert "once" in rep["terms"]


def test_bad_file_exit_code(capsys):
    code = run(["verify", "/nonexistent/x.json"])
    assert code == 2


def test_bad_trials_exit_code(capsys):
    code = run(["polycat", "check", "--trials", "0"])
    assert code == 2
