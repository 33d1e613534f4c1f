import json

import pytest

from stratcat import cosheaf as cs
from stratcat.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_braid_eq(capsys):
    code, out, _ = run(capsys, "braid", "eq", "--n", "3", "s1 s2 s1", "s2 s1 s2")
    assert code == 0 and out == {"equal": True}
    code, out, _ = run(capsys, "braid", "eq", "--method", "artin", "n=3 s1", "n=3 s2")
    assert code == 0 and out == {"equal": False}


def test_braid_other_commands(capsys):
    code, out, _ = run(capsys, "braid", "nf", "n=2 s1^-1")
    assert code == 0 and out["normal_form"] == {"n": 2, "delta": -1, "factors": []}
    code, out, _ = run(capsys, "braid", "perm", "--n", "3", "s1 s2 s1^-1")
    assert out["cycles"] == [[1, 3]]
    code, out, _ = run(capsys, "braid", "cable", "--n", "2", "s1", "--widths", "2,1")
    assert out["n"] == 3
    code, out, _ = run(capsys, "braid", "member", "--n", "3", "s1^-1", "--blocks", "2,1", "--oracle")
    assert out == {"member": True, "oracle": True}


def test_spn_commands(capsys):
    code, out, _ = run(capsys, "spn", "pi0", "--n", "5", "--p", "3,2", "--q", "2,1,1,1", "--brute-force")
    assert code == 0 and out["count"] == 2 and out["brute_force_count"] == 2
    assert {tuple(b["splits"]) for b in out["patterns"][0]["blocks"]} <= {(2, 1), (1, 1), (1, 1, 1), (2,)}
    code, out, _ = run(capsys, "spn", "refines", "--p", "2,2", "--q", "3,1")
    assert out == {"refines": False}
    m1 = json.dumps({"n": 2, "P": [2], "Q": [1, 1], "braid": ""})
    m2 = json.dumps({"n": 2, "P": [2], "Q": [1, 1], "braid": "s1 s1 s1"})
    code, out, _ = run(capsys, "spn", "homeq", m1, m2)
    assert out == {"equal": True}
    loop = json.dumps({"n": 2, "P": [1, 1], "Q": [1, 1], "braid": "s1 s1"})
    code, out, _ = run(capsys, "spn", "compose", m1, loop)
    assert code == 0 and out["morphism"]["braid"] == "s1 s1"
    code, out, _ = run(capsys, "spn", "cover", "--n", "3", "--morphism", json.dumps({"n": 3, "P": [2, 1], "Q": [1, 1, 1], "braid": ""}))
    assert out["objects"] == {"(3)": 1, "(2|1)": 3, "(1|1|1)": 6}
    assert len(out["map"]) == 6


def test_rpn(capsys):
    code, out, _ = run(capsys, "rpn", "pi1", "--n", "2", "--bound", "100")
    assert code == 0 and out["order"] == 2
    code, out, _ = run(capsys, "rpn", "pi1", "--n", "1", "--bound", "100")
    assert code == 3 and out["order"] is None and out["abelianization"]["rank"] == 1
    code, out, _ = run(capsys, "rpn", "skeleton", "--n", "3")
    assert set(out["hom_classes"].values()) == {2}


def test_poset_commands(capsys):
    code, out, _ = run(capsys, "poset", "pi1ab", "pseudocircle")
    assert code == 0 and out == {"rank": 1, "torsion": []}
    code, out, _ = run(capsys, "poset", "cat", "chain:3")
    assert out["morphisms"] == 6
    code, out, _ = run(capsys, "poset", "localize", json.dumps({"elements": [0, 1], "leq": [[True, True], [False, True]]}))
    assert out["abelianization"] == {"rank": 0, "torsion": []}


def test_cosheaf_commands(capsys, tmp_path):
    y = cs.two_origins_model()
    code, out, _ = run(capsys, "cosheaf", "classify", json.dumps(y.to_json()))
    assert code == 0 and out["uniquely_complete"] is False
    f = cs.components_cosheaf(cs.crossing_lines_model())
    path = tmp_path / "f.json"
    path.write_text(json.dumps(f.to_json()))
    code, out, _ = run(capsys, "cosheaf", "check", str(path), "--exhaustive")
    assert out == {"cosheaf": True, "failure": None}
    code, out, _ = run(capsys, "cosheaf", "display", str(path))
    assert len(out["points"]) == 5
    code, out, _ = run(capsys, "cosheaf", "cosheafify", str(path))
    assert out["counit_iso"] is True
    code, out, _ = run(capsys, "cosheaf", "roundtrip", "crossing-lines")
    assert code == 0 and out["ok"] is True


def test_validation_errors(capsys):
    code, out, err = run(capsys, "braid", "eq", "--n", "3", "s7", "s1")
    assert code == 2 and out is None and "error" in err
    code, _, _ = run(capsys, "spn", "pi0", "--p", "2,2", "--q", "3,1")
    assert code == 2
    code, _, _ = run(capsys, "cosheaf", "check", '{"space": {}}')
    assert code == 2
    code, _, _ = run(capsys, "cosheaf", "check", "/no/such/file")
    assert code == 2
    code, _, _ = run(capsys, "spn", "homeq", '{"n": 2, "P": [2], "Q": [1, 1], "braid": "", "x": 1}', "{}")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "braid", "--seed", "7", "--pairs", "200")
    assert code == 0 and out["ok"] is True
    code, out, _ = run(capsys, "oracle", "spn", "--n-max", "4")
    assert code == 0 and out["ok"] is True


def test_deterministic_output(capsys):
    first = run(capsys, "oracle", "poset", "--n-max", "4")
    second = run(capsys, "oracle", "poset", "--n-max", "4")
    assert first == second
