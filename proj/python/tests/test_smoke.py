import json

import pytest

import nimbus


def test_builtins_listed():
    names = [name for name, _ in nimbus.builtin_names()]
    assert set(names) == {"step1", "step2", "step2-cost", "step3"}


def test_builtin_scenario_is_valid_json():
    doc = json.loads(nimbus.builtin_scenario("step1"))
    assert len(doc["user_bases"]) == 4
    assert nimbus.validate_scenario(nimbus.builtin_scenario("step1")) == []


def test_unknown_builtin():
    with pytest.raises(KeyError):
        nimbus.builtin_scenario("step9")


def test_validation_reports_paths():
    doc = json.loads(nimbus.builtin_scenario("step1"))
    doc["user_bases"][0]["region"] = 7
    issues = nimbus.validate_scenario(json.dumps(doc))
    assert issues and issues[0][0] == "user_bases[0].region"
    with pytest.raises(nimbus.ScenarioError, match="region out of range"):
        nimbus.run(json.dumps(doc))
    assert issubclass(nimbus.ScenarioError, ValueError)


def test_run_step1():
    report = nimbus.run(nimbus.builtin_scenario("step1"))
    ubs = {ub["name"]: ub for ub in report["user_bases"]}
    avg = {name: ub["response"]["avg_ms"] for name, ub in ubs.items()}
    assert avg["UB2"] > avg["UB3"] > avg["UB4"] > avg["UB1"]
    assert report["balancer"] == "rr"
    assert sum(ub["response"]["count"] for ub in ubs.values()) == report["overall"]["response"]["count"]


def test_run_is_deterministic_and_overrides_apply():
    scenario = nimbus.builtin_scenario("step2")
    a = nimbus.run_json(scenario, balancer="throttled", seed=3)
    assert a == nimbus.run_json(scenario, balancer="throttled", seed=3)
    assert a != nimbus.run_json(scenario, balancer="throttled", seed=4)
    assert json.loads(a)["seed"] == 3
    with pytest.raises(ValueError, match="rr, esce, throttled"):
        nimbus.run(scenario, balancer="random")


def test_tables_and_outputs(tmp_path):
    text = nimbus.run_json(nimbus.builtin_scenario("step1"))
    assert "Overall Response Time" in nimbus.render_tables(text)
    nimbus.write_outputs(text, str(tmp_path))
    assert json.loads((tmp_path / "report.json").read_text()) == json.loads(text)
    assert (tmp_path / "per_ub.csv").read_text().startswith("user_base")


def test_compare_cells():
    cells = nimbus.compare([nimbus.builtin_scenario("step1")], seeds=[0, 1], threads=2)
    assert [c["balancer"] for c in cells] == ["rr", "esce", "throttled"]
    for cell in cells:
        assert not cell["failed"]
        assert len(cell["reports"]) == 2
        assert cell["avg_response_ms"]["stdev"] >= 0
