"""Tests for the seeded verification scenarios."""

import pytest

from prc.scenarios import (
    SCENARIO_NAMES,
    ParamOutOfRange,
    ScenarioParams,
    UnknownScenario,
    run_scenario,
)


@pytest.mark.parametrize("name", SCENARIO_NAMES)
def test_scenarios_pass_at_default_params(name):
    report = run_scenario(name, ScenarioParams())
    assert report.scenario == name
    assert report.overall == "pass", [
        (c.name, c.status, c.witness) for c in report.checks if c.status != "pass"
    ]
    payload = report.to_dict()
    assert set(payload) == {"scenario", "params", "checks", "runtime_ms"}
    assert payload["runtime_ms"] >= 0


def test_seed_determinism():
    a = run_scenario("roundtrips", ScenarioParams(seed=7)).to_dict()
    b = run_scenario("roundtrips", ScenarioParams(seed=7)).to_dict()
    a.pop("runtime_ms")
    b.pop("runtime_ms")
    assert a == b


def test_parameter_validation():
    with pytest.raises(ParamOutOfRange):
        run_scenario("invariants", ScenarioParams(precision=8))
    with pytest.raises(ParamOutOfRange):
        run_scenario("invariants", ScenarioParams(p=6))
    with pytest.raises(UnknownScenario):
        run_scenario("nonsense", ScenarioParams())
