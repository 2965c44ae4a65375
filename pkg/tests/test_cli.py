import json
import subprocess
import sys

import pytest

from algco import cli
from algco.serialization import DATA_DIR

D = DATA_DIR


def _run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ce_json_and_text(capsys):
    code, out, _ = _run(capsys, "ce", "--algebra", "sl2")
    assert code == 0
    rep = json.loads(out)
    assert rep["betti"] == [1, 0, 0, 1] and rep["dims"] == [1, 3, 3, 1]
    code, out, _ = _run(capsys, "ce", "--algebra", D / "heisenberg3.json", "--format", "text")
    assert code == 0 and "betti: [1, 2, 2, 1]" in out.splitlines()


def test_ce_representatives(capsys):
    code, out, _ = _run(capsys, "ce", "--algebra", "abelian2", "--rep", D / "weight_abelian2.json",
                        "--representatives")
    rep = json.loads(out)
    assert code == 0 and "representatives" in rep


def test_broken_rep_exits_3(capsys):
    code, out, _ = _run(capsys, "ce", "--algebra", D / "sl2.json", "--rep", D / "broken_rep.json")
    assert code == 3
    rep = json.loads(out)
    assert rep["flatness_report"] and rep["flatness_report"][0]["kind"] == "curvature"


def test_schema_errors_exit_2(capsys, tmp_path):
    code, _, err = _run(capsys, "ce", "--algebra", tmp_path / "missing.json")
    assert code == 2 and "cannot read" in err
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "name": "x",\n  "dim": 2,\n  "brackets": [\n')
    code, _, err = _run(capsys, "ce", "--algebra", bad)
    assert code == 2 and "line 5" in err
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"name": "x", "dim": "two", "brackets": []}))
    code, _, err = _run(capsys, "ce", "--algebra", wrong)
    assert code == 2 and "field dim" in err
    code, _, err = _run(capsys, "ce", "--algebra", "so3", "--rep", D / "sl2_fundamental.json")
    assert code == 2


def test_kunneth_glue_mv(capsys):
    code, out, _ = _run(capsys, "kunneth", "--algebra-a", "sl2", "--algebra-b", "abelian1")
    assert code == 0 and json.loads(out)["direct"] == [1, 1, 0, 1, 1]
    code, out, _ = _run(capsys, "glue", "--cover", D / "cover_sphere_heisenberg3.json")
    rep = json.loads(out)
    assert code == 0 and rep["routes_agree"] and rep["total_betti"] == rep["convolution"]
    code, out, _ = _run(capsys, "mv", "--algebra", "sl2", "--seed", "3")
    rep = json.loads(out)
    assert code == 0 and rep["glued_betti"] == [1, 1, 0, 1, 1] and rep["lift_independent"]


def test_disagreement_exits_4(capsys, monkeypatch):
    def fake(*args, **kwargs):
        return {"direct": [1], "convolution": [2], "match": False}
    monkeypatch.setattr(cli, "kunneth_crosscheck", fake)
    code, _, _ = _run(capsys, "kunneth", "--algebra-a", "abelian1", "--algebra-b", "abelian1")
    assert code == 4


def test_homotopy_commands(capsys):
    code, out, _ = _run(capsys, "homotopy", D / "homotopy_so3_adjoint.json")
    rep = json.loads(out)
    assert code == 0 and rep["morphism_defect"] <= 1e-8 and rep["main"]["passed"]
    code, out, _ = _run(capsys, "homotopy", D / "homotopy_negative_control.json")
    assert code == 1 and json.loads(out)["morphism_defect"] > 1e-2
    code, out, _ = _run(capsys, "homotopy", D / "homotopy_abelian_target.json", "--steps", "50")
    rep = json.loads(out)
    assert code == 0 and rep["psi_constant"] and rep["steps"] == 50


def test_flows_and_cylinder(capsys):
    code, out, _ = _run(capsys, "flows", D / "flows.json")
    rep = json.loads(out)
    assert code == 0 and len(rep["checks"]) == 9
    code, out, _ = _run(capsys, "cylinder", D / "cylinder_heisenberg3.json")
    rep = json.loads(out)
    assert code == 0 and rep["nonzero_homotopy_residuals"] == 0 and rep["betti_invariant"]


def test_output_is_deterministic(capsys):
    outs = []
    for _ in range(2):
        _, out, _ = _run(capsys, "mv", "--algebra", "heisenberg3", "--seed", "7")
        outs.append(out)
    assert outs[0] == outs[1]
    a = _run(capsys, "homotopy", D / "homotopy_so3_poly.json")[1]
    b = _run(capsys, "homotopy", D / "homotopy_so3_poly.json")[1]
    assert a == b


def test_help_lists_exit_codes(capsys):
    with pytest.raises(SystemExit):
        cli.main(["--help"])
    out = capsys.readouterr().out
    for code in ("0", "1", "2", "3", "4"):
        assert f"  {code}  " in out
    assert "ALGCO_THREADS" in out


def test_verify_all(capsys, monkeypatch):
    monkeypatch.setenv("ALGCO_THREADS", "2")
    code, out, _ = _run(capsys, "verify-all")
    rep = json.loads(out)
    assert code == 0 and rep["passed"] and rep["failed"] == []
    assert "homotopy/homotopy_negative_control" in rep["results"]


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "algco", "ce", "--algebra", "so3", "--format", "text"],
                       capture_output=True, text=True, check=False)
    assert p.returncode == 0 and "betti: [1, 0, 0, 1]" in p.stdout
