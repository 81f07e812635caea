import json
import subprocess
import sys

import pytest

from gogtools import instances
from gogtools.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_reduce_to_identity(capsys):
    code, rep, _ = run(capsys, "reduce", "zz", "a", "b", "b^-1", "a^-1")
    assert code == 0
    assert rep["results"]["identity"] is True and rep["results"]["normal_form"] == "1"


def test_reduce_bs12_convention(capsys):
    code, rep, _ = run(capsys, "reduce", "bs12", "e", "a", "e^-1")
    assert code == 0 and rep["results"]["normal_form"] == "a^2"


def test_check_and_enumerate(capsys):
    assert run(capsys, "check", "trefoil")[0] == 0
    code, rep, _ = run(capsys, "enumerate", "zz", "--syllables", "1", "--exponent", "1")
    assert code == 0
    assert sorted(rep["results"]["elements"]) == sorted(["1", "a", "a^-1", "b", "b^-1"])


def test_tree_queries(capsys):
    code, rep, _ = run(capsys, "tree", "geodesic", "zz", "1 @ v", "b a @ w")
    assert code == 0 and rep["results"]["length"] == 6
    code, rep, _ = run(capsys, "tree", "barycenter", "zz", "1 @ v", "b @ v", "b^2 @ v")
    assert rep["results"]["barycenter"] == {"kind": "vertex", "site": "w", "rep": "1"}


def test_qm_commands(capsys):
    code, rep, _ = run(capsys, "qm", "defect", "zz", "--family", "v=sgn,w=zero", "--syllables", "6", "--exponent", "3")
    assert code == 0 and rep["results"]["defect"] == "1"
    code, rep, _ = run(capsys, "qm", "diagram-check", "zz", "--syllables", "2")
    assert code == 0 and rep["results"]["failure_count"] == 0


def test_transplant_commands(capsys):
    code, rep, _ = run(capsys, "transplant", "verify", "trefoil", "--samples", "40")
    assert code == 0 and rep["results"]["counterexample_count"] == 0
    code, rep, _ = run(capsys, "transplant", "eval", "zz", "1 @ v", "a @ v", "a b @ w")
    assert code == 0 and "value" in rep["results"]


def test_transplant_with_tabulated_cochain(capsys, tmp_path):
    doc = {
        "degree": 2,
        "families": {
            "v": {"values": [{"points": [{"element": "1"}, {"element": [["a", 1]]}, {"coset": "a", "edge": "E"}], "value": "3/4"}]},
        },
    }
    path = tmp_path / "cochain.json"
    path.write_text(json.dumps(doc))
    code, rep, _ = run(capsys, "transplant", "eval", "zz", "1 @ v", "a @ v", "a b @ w", "--cochain", str(path))
    assert code == 0 and rep["results"]["value"] == "3/4"


def test_norm_commands(capsys):
    code, rep, _ = run(capsys, "norm", "cone-compare", "uw", "--theta", "3")
    assert code == 0
    assert rep["results"]["cone_value"] == rep["results"]["relative_value"] == "2"
    code, rep, _ = run(capsys, "norm", "seminorm", "torus7")
    assert rep["results"]["value"] == "14"
    code, rep, _ = run(capsys, "norm", "duality", "circle")
    assert rep["results"]["dual_value"] == rep["results"]["primal_value"] == "3"
    code, rep, _ = run(capsys, "norm", "thurston", "uw_weighted", "--epsilon", "1/2")
    assert code == 0 and rep["results"]["status"] == "SUCCESS" and rep["results"]["chain_norm"] == "7/5"
    code, rep, _ = run(capsys, "norm", "thurston", "simplex2", "--epsilon", "1")
    assert rep["results"]["status"] == "NOT_GUARANTEED" and rep["results"]["boundary_norm"] == "3"
    code, rep, _ = run(capsys, "norm", "seminorm", "simplex2", "--theta", "inf")
    assert rep["results"]["value"] == "inf"


def test_glue(capsys):
    code, rep, _ = run(capsys, "glue", "annulus_glue")
    assert code == 0 and rep["results"]["correction_norm"] == "6"


def test_input_errors_exit_2(capsys, tmp_path):
    code, rep, err = run(capsys, "reduce", "zz", "q")
    assert code == 2 and rep is None and "UnknownGenerator" in err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    out = tmp_path / "report.json"
    assert run(capsys, "norm", "seminorm", str(bad), "--out", str(out))[0] == 2
    assert not out.exists()
    assert run(capsys, "norm", "seminorm", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "norm", "seminorm", "circle", "--theta", "-1")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_out_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["transplant", "verify", "bs12", "--samples", "30", "--seed", "4", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_manifest(capsys, tmp_path):
    out = tmp_path / "m.json"
    manifest = {"command": "norm cone-compare", "inputs": ["uw"], "params": {"theta": "3"}, "out": str(out)}
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(manifest))
    assert main(["run", str(path)]) == 0
    first = out.read_bytes()
    assert main(["run", str(path)]) == 0
    assert out.read_bytes() == first
    assert json.loads(first)["results"]["equal"] is True
    path.write_text(json.dumps({"inputs": []}))
    assert main(["run", str(path)]) == 2


def test_selftest_passes_and_catches_faults(capsys):
    assert main(["selftest", "quick", "--only", "8,9,10"]) == 0
    assert main(["selftest", "quick", "--only", "6", "--mutate", "cone-sign"]) == 1
    assert main(["selftest", "quick", "--only", "3", "--mutate", "barycenter"]) == 1


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "gogtools.cli", "reduce", "trefoil", "x^2", "y^-3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"]["identity"] is True


def test_bundled_instances_are_listed():
    assert set(instances.GRAPHS) <= set(instances.names())
    assert "annulus_glue" in instances.names()
