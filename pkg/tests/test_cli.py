import json
import math

import numpy as np
import pytest

from powermeans.cli import RunConfig, UsageError, main, run
from powermeans.errors import InvalidExponent
from powermeans.matrix_io import matrix_from_obj, save_matrix


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, mat in {
        "A": np.diag([1.0, 4.0]),
        "B": np.diag([9.0, 16.0]),
        "I": np.eye(2),
        "B3": 3 * np.eye(2),
    }.items():
        paths[name] = str(tmp_path / f"{name}.json")
        save_matrix(paths[name], mat)
    paths["phi"] = str(tmp_path / "phi.json")
    with open(paths["phi"], "w") as fh:
        json.dump({"dim": 2, "entries": [1, 0]}, fh)
    return paths


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def all_finite(obj):
    if isinstance(obj, float):
        return math.isfinite(obj)
    if isinstance(obj, dict):
        return all(all_finite(v) for v in obj.values())
    if isinstance(obj, list):
        return all(all_finite(v) for v in obj)
    return True


def test_mean_example(capsys, files):
    code, rep, _ = run_json(capsys, ["mean", "--family", "ka", "--p", "0.5", files["A"], files["B"]])
    assert code == 0
    assert np.allclose(matrix_from_obj(rep["result"]), np.diag([4.0, 9.0]))
    assert rep["version"] and rep["config"]["p"] == 0.5


def test_mean_function_preset(capsys, files):
    code, rep, _ = run_json(capsys, ["mean", "--function", "geometric", files["A"], files["B"]])
    assert code == 0
    assert np.allclose(matrix_from_obj(rep["result"]), np.diag([3.0, 8.0]))


def test_distance(capsys, files):
    code, rep, _ = run_json(capsys, ["distance", files["I"], files["B3"]])
    assert code == 0
    assert rep["thompson_distance"] == pytest.approx(math.log(3))
    assert rep["thompson_distance_log"] == pytest.approx(math.log(3))


def test_strength(capsys, files):
    code, rep, _ = run_json(capsys, ["strength", files["A"], files["phi"]])
    assert code == 0 and rep["strength"] == pytest.approx(1.0) and rep["in_range"]


def test_solve(capsys, files):
    code, rep, _ = run_json(capsys, ["solve", "--p", "1", files["I"], files["B3"]])
    assert code == 0
    assert np.allclose(matrix_from_obj(rep["solution"]), 2 * np.eye(2))
    assert rep["residual"] <= 1e-8
    code, rep, _ = run_json(capsys, ["solve", "--p", "0.5", files["I"], files["I"]])
    assert code == 0 and rep["solution"] is None and rep["residual"] is None


def test_solve_conventional_strict(capsys, files):
    code, rep, _ = run_json(capsys, ["solve", "--family", "conv", "--p", "1", files["I"], files["I"]])
    assert rep["solution"] is not None
    code, rep, _ = run_json(capsys, ["solve", "--family", "conv", "--p", "1", "--strict", files["I"], files["I"]])
    assert rep["solution"] is None


def test_verify_pass_and_fail(capsys):
    code, rep, _ = run_json(capsys, ["verify", "--form", "congruence", "--p", "0.5", "--trials", "20"])
    assert code == 0 and rep["passed"]
    code, rep, _ = run_json(
        capsys, ["verify", "--form", "congruence", "--family", "conv", "--p", "0.5", "--trials", "20"]
    )
    assert code == 1 and not rep["passed"]
    assert rep["max_residual"] > 1e-3 and rep["witnesses"]


def test_verify_with_files(capsys, files):
    code, rep, _ = run_json(
        capsys, ["verify", "--form", "power-congruence", "--family", "conv", "--p", "0.5", "--dim", "2",
                 "--trials", "10", files["A"]]
    )
    assert code == 0 and rep["form"]["T"]["entries"][1][1] == 4.0


def test_suite_example(capsys):
    argv = ["suite", "--name", "L2", "--p", "-0.5", "--dim", "3", "--trials", "500", "--seed", "7"]
    code, rep, _ = run_json(capsys, argv)
    assert code == 0 and rep["passed"]
    assert rep["suite"] == "L2" and rep["trials"] == 500 and rep["seed"] == 7
    assert all_finite(rep)


def test_gap_search_example(capsys):
    code, rep, _ = run_json(capsys, ["gap-search", "--p", "0.5", "--dim", "2", "--trials", "1000", "--seed", "1"])
    assert code == 0
    assert rep["info"]["gap"] > 100 * 1e-8
    assert rep["witnesses"] and len(rep["witnesses"][0]["inputs"]) == 2


@pytest.mark.parametrize("name", ["axioms", "transfer", "gap"])
def test_determinism(tmp_path, name):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        code = main(["suite", "--name", name, "--p", "0.5", "--trials", "20", "--seed", "3", "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert all_finite(json.loads(outs[0]))


def test_input_errors(capsys, tmp_path, files):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "entries": [[1]]}')
    code, _, err = run_json(capsys, ["mean", "--p", "0.5", str(bad), files["B"]])
    assert code == 2 and json.loads(err)["error"] == "InputParseError"
    code, _, err = run_json(capsys, ["mean", "--p", "2", files["A"], files["B"]])
    assert code == 2 and json.loads(err)["error"] == "InvalidExponent"
    code, _, _ = run_json(capsys, ["mean", "--p", "0.5", files["A"]])
    assert code == 2
    code, _, _ = run_json(capsys, ["suite", "--name", "L2", "--p", "0.5", "--trials", "0"])
    assert code == 2


def test_run_config_validation():
    with pytest.raises(InvalidExponent):
        RunConfig("mean", p=0.0).validate()
    with pytest.raises(InvalidExponent):
        RunConfig("mean", p=float("nan")).validate()
    with pytest.raises(UsageError):
        RunConfig("nope").validate()
    RunConfig("mean", p=2.0, family="conv").validate()


def test_run_returns_report():
    code, rep = run(RunConfig("suite", p=-1.0, name="L2", trials=10))
    assert code == 0 and rep["config"]["name"] == "L2" and "out" not in rep["config"]
