"""Tests for the model ring membership oracle and rule streams.

The soundness oracle here is verify_verdict: every decided verdict must
survive its own witness check, and the classical facts (z outside R_1, z^p
inside) anchor the expected answers.
"""

import random

import pytest

from prc.field_tower import FieldElem, t
from prc.model_ring import (
    Frob,
    ModelRing,
    NagataStream,
    Polynomial,
    Product,
    ScalarMul,
    StreamElem,
    Sum,
    in_model,
    nagata_stream,
    rule_from_json,
    rule_to_json,
    verify_verdict,
    witness_chain,
)


def test_classical_stream_membership():
    p = 2
    R1 = ModelRing(p, 1)
    z = nagata_stream(0)
    assert in_model(z, R1).status == "no"
    assert in_model(Frob(1, z), R1).status == "yes"
    R2 = ModelRing(p, 2)
    assert in_model(z, R2).status == "no"
    assert in_model(Frob(1, z), R2).status == "no"
    assert in_model(Frob(2, z), R2).status == "yes"


def test_no_verdict_carries_full_rank_evidence():
    R = ModelRing(2, 1)
    verdict = in_model(nagata_stream(0), R)
    assert verdict.status == "no"
    assert verdict.rank_evidence == [(8, 8), (16, 16), (32, 32)]


def test_polynomial_and_scalar_rules_are_yes():
    p = 3
    R = ModelRing(p, 2)
    rule = Polynomial([t(0, p), t(1, p) + FieldElem.one(p)])
    v = in_model(rule, R)
    assert v.status == "yes"
    assert verify_verdict(rule, R, v)
    scaled = ScalarMul(t(4, p), rule)
    v2 = in_model(scaled, R)
    assert v2.status == "yes" and verify_verdict(scaled, R, v2)


def test_sum_with_wild_tail():
    p = 2
    R = ModelRing(p, 1)
    # polynomial head + undecided tail: still No, the head only perturbs
    rule = Sum([Polynomial([t(9, p)]), nagata_stream(3)])
    v = in_model(rule, R)
    assert v.status == "no"
    assert verify_verdict(rule, R, v)
    # two wild tails may cancel; the oracle must stay sound, not clever
    twin = Sum([nagata_stream(0), nagata_stream(0)])
    assert in_model(twin, R).status == "unknown"


def test_products_are_opaque_but_frobenius_rescues():
    p = 2
    R = ModelRing(p, 1)
    prod = Product([nagata_stream(0), nagata_stream(1)])
    assert in_model(prod, R).status == "unknown"
    # coefficients of a p-th power are p-th powers, hence in k^p
    assert in_model(Frob(1, prod), R).status == "yes"


def test_decided_verdicts_never_contradicted(count=40):
    rng = random.Random(77)
    p = 2
    R = ModelRing(p, 1, precision=32)

    def random_rule(depth=2):
        kind = rng.randrange(5 if depth else 2)
        if kind == 0:
            return Polynomial([t(rng.randrange(8), p) for _ in range(rng.randrange(1, 4))])
        if kind == 1:
            return NagataStream(rng.randrange(4))
        if kind == 2:
            return Frob(rng.randrange(0, 3), random_rule(depth - 1))
        if kind == 3:
            return ScalarMul(t(rng.randrange(8), p), random_rule(depth - 1))
        return Sum([random_rule(depth - 1), random_rule(depth - 1)])

    decided = 0
    for _ in range(count):
        rule = random_rule()
        verdict = in_model(rule, R)
        if verdict.decided:
            decided += 1
            assert verify_verdict(rule, R, verdict, precision=32), repr(rule)
    assert decided > 0


def test_witness_chain_recurrence():
    # w_j = t_{s+j} + T * w_{j+1}, checked on the evaluated series
    p = 3
    R = ModelRing(p, 1, precision=24)
    for j in range(3):
        w = witness_chain(R, 0, j)
        w_next = witness_chain(R, 0, j + 1)
        lhs = w.eval(p, 24).coeffs
        rhs = w_next.eval(p, 24).coeffs
        assert lhs[0] == t(j, p)
        assert all(lhs[i + 1] == rhs[i] for i in range(23))


def test_eval_cache_consistent_under_refinement():
    p = 2
    z = nagata_stream(0)
    wide = z.eval(p, 16)
    narrow = z.eval(p, 8)
    assert narrow == wide.truncate(8)
    assert z.eval(p, 16) is not None  # cached path


def test_rule_json_roundtrip():
    p = 2
    rules = [
        Polynomial([t(0, p)]),
        NagataStream(2),
        Frob(1, NagataStream(0)),
        ScalarMul(t(3, p), Sum([Polynomial([FieldElem.one(p)]), NagataStream(1)])),
        Product([NagataStream(0), Polynomial([t(1, p)])]),
    ]
    for rule in rules:
        data = rule_to_json(rule)
        back = rule_from_json(data, p)
        assert back == rule
        assert back.eval(p, 12) == rule.eval(p, 12)


def test_rule_from_json_accepts_strings():
    rule = rule_from_json('{"rule": "frob", "nu": 1, "inner": {"rule": "nagata", "s": 0}}', 2)
    assert rule == Frob(1, NagataStream(0))


def test_stream_unhashable_and_validation():
    with pytest.raises(TypeError):
        hash(nagata_stream(0))
    with pytest.raises(ValueError):
        NagataStream(-1)
    with pytest.raises(ValueError):
        ModelRing(4, 1)
    with pytest.raises(ValueError):
        ModelRing(2, 0)
