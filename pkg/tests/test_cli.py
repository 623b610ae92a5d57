import json
import shutil
import subprocess
import sys

import pytest

from conftest import DATA, FIXTURES
from lewiskit.cli import BREACH, FAILED, OK, USAGE, main
from lewiskit.spheres import SphereModel
from lewiskit.syntax import parse

MODEL = str(FIXTURES / "two_world.json")
ALG = {n: str(DATA / f"algebra_{n}.json") for n in "ABC"}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    data = json.loads(out)
    assert data["format"] == 1 and data["command"] == argv[0]
    return code, data


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "--formula", "p |> (q & r)")
    assert code == OK and out.strip() == "p |> q & r"
    code, data = run_json(capsys, "parse", "--formula", "box p")
    assert data["tree"] == ["cf", ["imp", ["var", "p"], ["0"]], ["var", "p"]]


def test_parse_error_is_usage(capsys):
    code, _, err = run(capsys, "parse", "--formula", "p |>")
    assert code == USAGE and "position 4" in err


def test_eval_two_world(capsys):
    code, out, _ = run(capsys, "eval", "--model", MODEL, "--formula", "box p")
    assert code == OK and out.strip() == "∅"
    code, data = run_json(capsys, "eval", "--model", MODEL, "--formula", "p |> p")
    assert data["worlds"] == ["w1", "w2"]


def test_missing_model_is_usage(capsys):
    assert run(capsys, "eval", "--formula", "p")[0] == USAGE


def test_model_check(capsys):
    code, out, _ = run(capsys, "model-check", "--model", MODEL, "--class", "Centered")
    assert code == FAILED and "witness w1" in out
    code, data = run_json(capsys, "model-check", "--model", MODEL, "--class", "Normal")
    assert code == OK and data["models"][0]["classes"]["Normal"]["ok"] is True


def test_model_check_samples_are_seeded(capsys):
    _, first = run_json(capsys, "model-check", "--samples", "5", "--seed", "1", "--flags", "CS")
    code, again = run_json(capsys, "model-check", "--samples", "5", "--seed", "1", "--flags", "CS")
    assert code == OK and first == again


def test_model_check_validity(capsys):
    code, _, _ = run(capsys, "model-check", "--model", MODEL, "--formula", "p |> p")
    assert code == OK
    code, _, _ = run(capsys, "model-check", "--model", MODEL, "--formula", "p -> box p")
    assert code == FAILED


def test_algebra_check(capsys):
    code, data = run_json(capsys, "algebra-check", "--algebra", ALG["A"], "--variety", "VCSU", "--variety", "CA")
    assert code == OK and data["ok"]
    assert data["box"] == [0, 0, 0, 3]
    assert len(data["lattice_filters"]) == 4 and len(data["open_filters"]) == 2
    code, out, _ = run(capsys, "algebra-check", "--algebra", ALG["B"], "--variety", "VC")
    assert code == FAILED and "VC: FAIL" in out


def test_algebra_check_rejects_bad_variety(capsys):
    assert run(capsys, "algebra-check", "--algebra", ALG["A"], "--variety", "VQ")[0] == USAGE


def test_dualize_and_back(capsys, tmp_path):
    code, data = run_json(capsys, "dualize", "--algebra", ALG["A"])
    assert code == OK
    alpha = tmp_path / "alpha.json"
    alpha.write_text(json.dumps(data["alpha"]))
    spheres = SphereModel.from_dict(data["spheres"])
    assert spheres.spheres == ((1, 3), (2, 3))
    code, back = run_json(capsys, "dualize", "--alpha", str(alpha))
    assert back["spheres"] == data["spheres"]
    assert code == OK
    code, _, _ = run(capsys, "dualize", "--model", MODEL)
    assert code == OK


def test_roundtrip(capsys):
    for path in ALG.values():
        code, data = run_json(capsys, "roundtrip", "--algebra", path)
        assert code == OK and data["algebra_roundtrip"] and data["alpha_roundtrip"]


def test_enumerate(capsys):
    code, data = run_json(capsys, "enumerate", "--atoms", "1")
    assert code == OK and data["count"] == 2
    code, data = run_json(capsys, "enumerate", "--atoms", "2", "--variety", "VCSU")
    assert code == OK and data["count"] == 36
    assert 0 < data["varieties"]["VCSU"] < 36
    assert run(capsys, "enumerate", "--atoms", "3")[0] == USAGE


def test_countermodel(capsys):
    code, data = run_json(capsys, "countermodel", "--premises", "p", "--formula", "box p", "--logic", "LV",
                          "--max-worlds", "2")
    assert code == FAILED and data["found"]
    m = SphereModel.from_dict(data["model"])
    w = data["world"]
    assert m.holds(parse("p"), w) and not m.holds(parse("box p"), w)
    code, out, _ = run(capsys, "countermodel", "--premises", "p", "--formula", "box p", "--logic", "GV")
    assert code == OK and "none up to 3" in out


def test_consequence(capsys):
    code, data = run_json(capsys, "consequence", "--model", MODEL, "--premises", "p", "--formula", "box p",
                          "--logic", "LV")
    assert code == FAILED and not data["holds"]
    code, data = run_json(capsys, "consequence", "--model", MODEL, "--premises", "p", "--formula", "box p",
                          "--logic", "GV")
    assert code == OK and data["holds"]
    code, data = run_json(capsys, "consequence", "--algebra", ALG["A"], "--premises", "p", "--formula", "box p")
    assert code == FAILED and data["assignment"] == {"p": 1}


def test_prove(capsys):
    code, out, _ = run(capsys, "prove", "--script", "monotonicity", "--semantic")
    assert code == OK and "no countermodel" in out
    code, data = run_json(capsys, "prove", "--script", "c_from_dwc2", "--logic", "LV")
    assert code == FAILED and data["line"] == 4
    assert data["reason"] == "LV applies this rule only to premise-free lines"


def test_prove_needs_a_proof(capsys):
    assert run(capsys, "prove")[0] == USAGE


def test_prove_from_file(capsys, tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"format": 1, "premises": ["p", "p -> q"], "lines": [
        {"f": "p", "by": {"premise": True}},
        {"f": "p -> q", "by": {"premise": True}},
        {"f": "q", "by": {"mp": [1, 2]}},
    ]}))
    code, data = run_json(capsys, "prove", "--proof", str(path), "--logic", "LV", "--semantic")
    assert code == OK and data["accepted"] and data["sound_up_to"] == 3


def test_human_and_json_verdicts_agree(capsys):
    cases = [
        ("model-check", "--model", MODEL, "--class", "Centered"),
        ("algebra-check", "--algebra", ALG["C"], "--variety", "VTSA"),
        ("countermodel", "--formula", "p -> box p", "--logic", "LV"),
        ("consequence", "--model", MODEL, "--formula", "p |> p", "--logic", "LV"),
        ("prove", "--script", "dwc0_rule"),
    ]
    for argv in cases:
        human = run(capsys, *argv)[0]
        machine = run(capsys, *argv, "--json")[0]
        assert human == machine, argv


def test_breach_code_is_distinct():
    assert len({OK, FAILED, USAGE, BREACH}) == 4


@pytest.mark.skipif(shutil.which("lewiskit") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["lewiskit", "parse", "--formula", "~p"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "~p"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "lewiskit.cli", "roundtrip", "--algebra", ALG["B"]],
                         capture_output=True, text=True)
    assert res.returncode == 0
