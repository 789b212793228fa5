import json

import pytest

from yangslice import cli
from yangslice.scenario import (
    REPORT_SCHEMA, ScenarioError, acceptance_matrix, bundled_scenarios, load_scenario, q_str,
    run_scenario, scenario_from_json,
)


def write(tmp_path, data, name="sc.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


SMALL = {
    "schema": "yangslice-scenario/1",
    "name": "small",
    "type": "A2",
    "lambda": {"coroot": [1, 1]},
    "mu": {"fund": [0, 0]},
    "order": 3,
    "suites": ["relations", "quotient", "grading", "classical", "hilbert"],
    "classical_pairs": 20,
}


def test_bundled_names():
    names = bundled_scenarios()
    assert "a1_fundamental" in names
    for name in names:
        assert load_scenario(name).name == name


def test_verify_pass_and_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["verify", write(tmp_path, SMALL), "--out", str(out)])
    assert code == 0
    report = json.loads((out / "report.json").read_text())
    assert report["schema"] == REPORT_SCHEMA
    assert report["passed"] is True
    assert set(report["suites"]) == set(SMALL["suites"])
    assert (out / "timings.json").exists()
    assert "PASS" in (out / "summary.txt").read_text()
    assert "PASS relations" in capsys.readouterr().out


def test_report_is_deterministic_across_jobs(tmp_path):
    path = write(tmp_path, SMALL)
    assert cli.main(["verify", path, "--out", str(tmp_path / "a")]) == 0
    assert cli.main(["verify", path, "--jobs", "2", "--out", str(tmp_path / "b")]) == 0
    a = (tmp_path / "a" / "report.json").read_bytes()
    b = (tmp_path / "b" / "report.json").read_bytes()
    assert a == b


def test_jobs_environment_default(monkeypatch):
    monkeypatch.setenv("YANGSLICE_JOBS", "3")
    assert cli.default_jobs() == 3
    monkeypatch.setenv("YANGSLICE_JOBS", "x")
    assert cli.default_jobs() == 1


def test_overrides(tmp_path):
    out = tmp_path / "o"
    code = cli.main(["verify", write(tmp_path, SMALL), "--order", "2", "--seed", "5",
                     "--orientation", "reversed", "--out", str(out)])
    assert code == 0
    env = json.loads((out / "report.json").read_text())["environment"]
    assert env["order"] == 2 and env["seed"] == 5 and env["orientation"] == "reversed"
    assert env["arrows"] == [[2, 1]]


def test_failure_exit_code(tmp_path):
    # the casimir suite compares against the quoted constant, which the images do not reproduce
    data = dict(SMALL, type="A1", **{"lambda": {"coroot": [1]}}, mu={"fund": [0]}, suites=["casimir"])
    out = tmp_path / "o"
    assert cli.main(["verify", write(tmp_path, data), "--out", str(out)]) == 1
    report = json.loads((out / "report.json").read_text())
    suite = report["suites"]["casimir"]
    assert [f["check"] for f in suite["failures"]] == ["casimir image equals 2c^(2) - c^(1)^2/2 + h^2/2"]
    assert suite["checks"] == 2


@pytest.mark.parametrize("change", [
    {"type": "Q2"},
    {"lambda": {"fund": [1]}},
    {"mu": {"fund": [1, 0]}},
    {"order": 0},
    {"suites": ["nonsense"]},
    {"c": {"1": ["1", "2"]}},
    {"orientation": [[1, 2], [2, 1]]},
    {"schema": "other/9"},
    {"suites": ["casimir"]},
])
def test_invalid_input_exit_code(tmp_path, change, capsys):
    data = dict(SMALL, **change)
    assert cli.main(["verify", write(tmp_path, data)]) == 2
    assert "invalid input" in capsys.readouterr().err


def test_invalid_json_and_missing_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert cli.main(["verify", str(bad)]) == 2
    assert cli.main(["verify", "no_such_scenario"]) == 2
    assert cli.main(["dump", "--what", "images"]) == 2
    assert cli.main(["frobnicate"]) == 2


def test_dump_targets(tmp_path, capsys):
    assert cli.main(["dump", "--what", "report-schema"]) == 0
    schema = json.loads(capsys.readouterr().out)
    assert schema["title"] == REPORT_SCHEMA

    eq = dict(SMALL, **{"lambda": {"fund": [0, 1]}}, mu={"fund": [0, 1]})
    path = write(tmp_path, eq)
    assert cli.main(["dump", path, "--what", "images"]) == 0
    images = json.loads(capsys.readouterr().out)
    for node in images["nodes"].values():
        assert all(cell == [] for cell in node["E"] + node["F_shifted"])

    assert cli.main(["dump", path, "--what", "rseries"]) == 0
    rs = json.loads(capsys.readouterr().out)["nodes"]
    # m = 0: r_i is (1, c^(1), ..., c^(lambda_i)); lambda_i is read through i -> i*
    assert rs["1"][0] == {"den": [], "num": [["1", "1"]]}
    # lambda = omega_2 on A2: node 1 reads lambda through 1* = 2, node 2 through 2* = 1
    assert rs["1"][1] == {"den": [], "num": [["c1^(1)", "1"]]}
    assert all(x["num"] == [] for x in rs["1"][2:] + rs["2"][1:])


def test_image_dump_a1():
    sc = load_scenario("a1_fundamental")
    from yangslice.scenario import dump_images
    from dataclasses import replace
    data = dump_images(replace(sc, order=2))
    e1 = data["nodes"]["1"]["E"][0]
    assert e1 == [{"beta": [[1, 1, -1]], "coeff": {"den": [], "num": [["1", "1"]]}}]


def test_rational_serialisation():
    assert q_str(0) == "0"
    assert q_str("6/4") == "3/2"
    assert q_str(-5) == "-5"


def test_scenario_defaults_and_errors():
    sc = scenario_from_json({"type": "A1", "lambda": {"coroot": [1]}, "mu": {"fund": [0]}})
    assert sc.suites == ("relations",) and sc.order == 8
    with pytest.raises(ScenarioError):
        scenario_from_json([1, 2])
    with pytest.raises(ScenarioError):
        scenario_from_json({"type": "A1", "lambda": {"coroot": [1]}})
    all_suites = scenario_from_json({"type": "A1", "lambda": {"coroot": [1]}, "mu": {"fund": [0]},
                                     "suites": "all"})
    assert "kleinian" in all_suites.suites


def test_acceptance_matrix_shape():
    matrix = acceptance_matrix()
    labels = {sc.type_label for sc in matrix}
    assert labels == {"A2", "A3", "B2", "C2", "G2"}
    assert len(matrix) == 38
    assert all(sc.c != "symbolic" for sc in matrix if sc.type_label == "A3")
    assert sum(1 for sc in matrix if sc.orientation == "reversed") == 19


def test_run_scenario_returns_timings_separately():
    sc = scenario_from_json(dict(SMALL, suites=["quotient"]))
    report, timings = run_scenario(sc)
    assert "quotient" in timings and "build" in timings
    assert "seconds" not in json.dumps(report)
