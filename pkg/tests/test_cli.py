"""Tests for the prc command line interface."""

import json

import pytest

from prc.cli import EXIT_FAIL, EXIT_PASS, EXIT_UNKNOWN, main
from prc.insep_algebra import adjoin, tower_to_json
from prc.model_ring import Frob, ModelRing, witness_chain


def run_cli(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_verify_single_scenario_json(capsys):
    code, out = run_cli(capsys, "verify", "--scenario", "tensor", "--format", "json")
    assert code == EXIT_PASS
    payload = json.loads(out)
    assert set(payload) == {"scenario", "params", "checks", "runtime_ms"}
    assert payload["scenario"] == "tensor"
    assert payload["params"]["p"] == 2
    assert all(c["status"] == "pass" for c in payload["checks"])


def test_verify_text_format(capsys):
    code, out = run_cli(capsys, "verify", "--scenario", "roundtrips")
    assert code == EXIT_PASS
    assert "scenario roundtrips" in out
    assert "overall: pass" in out
    assert "[pass" in out


def test_verify_rejects_bad_params(capsys):
    # precision too small for the requested tower depth
    code = main(["verify", "--scenario", "invariants", "--precision", "8"])
    assert code == EXIT_FAIL


def test_height_finite_json(capsys):
    rule = json.dumps({"rule": "nagata", "s": 0})
    code, out = run_cli(
        capsys, "height", "--rule", rule, "--p", "2", "--mu", "2", "--format", "json"
    )
    assert code == EXIT_PASS
    payload = json.loads(out)
    assert payload["status"] == "finite" and payload["nu"] == 2
    assert [e["verdict"] for e in payload["evidence"]] == ["no", "no", "yes"]


def test_height_unknown_exit_code(capsys):
    rule = json.dumps(
        {
            "rule": "product",
            "factors": [
                {"rule": "nagata", "s": 0},
                {"rule": "nagata", "s": 1},
            ],
        }
    )
    code, out = run_cli(capsys, "height", "--rule", rule)
    assert code == EXIT_UNKNOWN
    assert "Unknown" in out


def test_invariants_subcommand(capsys):
    R = ModelRing(2, 1)
    w = witness_chain(R, 0, 0)
    tower = adjoin(R, Frob(1, w), 1, root=w)
    blob = json.dumps(tower_to_json(tower))
    code, out = run_cli(capsys, "invariants", "--tower", blob, "--format", "json")
    assert code == EXIT_PASS
    assert json.loads(out) == {"e": 2, "f": 1, "n": 2}
    code, out = run_cli(capsys, "invariants", "--tower", blob)
    assert code == EXIT_PASS and out.strip() == "e=2 f=1 n=2"


def test_unknown_subcommand_errors():
    with pytest.raises(SystemExit):
        main(["frobnicate"])
