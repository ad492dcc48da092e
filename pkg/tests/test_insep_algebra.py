"""Tests for purely inseparable towers, their fibers and the reduction checks.

Nilpotency here is verified by the honest oracle: raise each claimed
nilradical element to the p^m-th power by repeated multiplication and demand
zero. Invariants are cross-checked against the e*f = n identity on towers
where the expected triple is known in closed form.
"""

import random

import pytest

from prc.field_tower import FieldElem, t
from prc.insep_algebra import (
    ArtinianAlgebra,
    BaseField,
    DegenerateAdjunction,
    InvariantTriple,
    NotInBase,
    PrecisionTooLow,
    RootMissing,
    SeriesRing,
    Tower,
    adjoin,
    completion,
    invariants,
    nilradical,
    reduction_of_completion,
    special_fiber,
    tensor_square_reduced_check,
    tower_from_json,
    tower_to_json,
)
from prc.model_ring import Frob, ModelRing, Polynomial, nagata_stream, witness_chain


def chain_stage_tower(p, mu, j=0, nu=None):
    """R_mu with the j-th chain witness adjoined as a p^nu-th root."""
    nu = mu if nu is None else nu
    R = ModelRing(p, mu)
    w = witness_chain(R, 0, j)
    root = Frob(mu - nu, w) if mu > nu else w
    return adjoin(R, Frob(mu, w), nu, root=root)


# ---------------------------------------------------------------------------
# adjunction guards
# ---------------------------------------------------------------------------

def test_adjoin_rejects_undecided_constant():
    R = ModelRing(2, 1)
    z = nagata_stream(0)
    with pytest.raises(NotInBase):
        adjoin(R, z, 1, root=z)


def test_adjoin_requires_root_over_model_ring():
    R = ModelRing(2, 1)
    w = nagata_stream(0)
    with pytest.raises(DegenerateAdjunction):
        adjoin(R, Frob(1, w), 1)


def test_adjoin_rejects_wrong_root():
    R = ModelRing(2, 1)
    w, other = nagata_stream(0), nagata_stream(1)
    with pytest.raises(RootMissing):
        adjoin(R, Frob(1, w), 1, root=other)


def test_adjoin_flags_degenerate_extension():
    p = 2
    R = ModelRing(p, 1)
    t0 = t(0, p)
    root = Polynomial([t0 * t0])  # already lies in R_1
    stage = adjoin(R, Frob(1, root), 1, root=root).stages[0]
    assert stage.degenerate
    # a genuine root outside the model is not degenerate
    w = nagata_stream(0)
    assert not adjoin(R, Frob(1, w), 1, root=w).stages[0].degenerate


def test_adjoin_over_field_checks_base_membership():
    p = 2
    with pytest.raises(NotInBase):
        adjoin(BaseField(p, 1), t(0, p), 1)
    C = adjoin(BaseField(p, 1), t(0, p) ** 2, 1)
    assert C.rank == 2 and C.total_nu == 1


# ---------------------------------------------------------------------------
# normal forms and the special fiber
# ---------------------------------------------------------------------------

def test_artinian_relation_and_pow():
    p = 3
    a = t(0, p)
    D = ArtinianAlgebra(p, [1], [a])
    Z = D.gen(0)
    # Z^p reduces to the relation constant
    assert D.equal(D.pow(Z, p), D.scalar(a))
    x = D.add(Z, D.scalar(FieldElem.one(p)))
    acc = D.one()
    for n in range(6):
        assert D.equal(D.pow(x, n), acc)
        acc = D.mul(acc, x)


def test_nilradical_elements_are_honestly_nilpotent():
    p = 2
    A = chain_stage_tower(p, 1)
    A = adjoin(A, Frob(1, witness_chain(A.base, 0, 1)), 1, root=witness_chain(A.base, 0, 1))
    D = special_fiber(A)
    nil = nilradical(D)
    assert len(nil) == A.rank - 1
    m = sum(D.nus)
    for g in nil:
        assert not D.is_zero_elem(g)
        power = g
        for _ in range(p ** m - 1):
            power = D.mul(power, g)
        assert D.is_zero_elem(power)


def test_field_fiber_has_zero_nilradical():
    # t0 has no p-th root in k, so k[Z]/(Z^p - t0) is a field
    p = 2
    D = ArtinianAlgebra(p, [1], [t(0, p)])
    assert nilradical(D) == []
    # whereas a constant with a root in k gives (Z - root)^p = 0
    D2 = ArtinianAlgebra(p, [1], [t(0, p) ** p])
    assert len(nilradical(D2)) == p - 1


# ---------------------------------------------------------------------------
# invariants
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p,mu,nu", [(2, 1, 1), (2, 2, 1), (2, 2, 2), (3, 1, 1)])
def test_invariants_of_chain_towers(p, mu, nu):
    A = chain_stage_tower(p, mu, nu=nu)
    q = p ** nu
    assert invariants(A) == InvariantTriple(e=q, f=1, n=q)


def test_invariants_of_nested_tower():
    p = 2
    A = chain_stage_tower(p, 1, j=0)
    w1 = witness_chain(A.base, 0, 1)
    A = adjoin(A, Frob(1, w1), 1, root=w1)
    triple = invariants(A)
    assert triple == InvariantTriple(e=4, f=1, n=4)
    assert triple.e * triple.f == triple.n


# ---------------------------------------------------------------------------
# completion and reduction
# ---------------------------------------------------------------------------

def test_completion_precision_guard():
    A = chain_stage_tower(2, 1)
    with pytest.raises(PrecisionTooLow):
        completion(A, precision=16)
    That = completion(A)
    assert isinstance(That.base, SeriesRing)
    assert That.base.precision == 64
    assert That.stages[0].a == A.stages[0].a.eval(2, 64)


def test_reduction_of_completion_passes():
    for p, mu in [(2, 1), (3, 1)]:
        That = completion(chain_stage_tower(p, mu))
        result = reduction_of_completion(That, seed=5)
        assert result.passed, result.checks
        names = [name for name, _ in result.checks]
        assert "nilpotency_identity[0]" in names
        assert "quotient_iso" in names and "identity_composite" in names


def test_reduction_recovers_missing_root():
    # drop the designated root; the reduction must reconstruct it by pth_root
    p = 2
    That = completion(chain_stage_tower(p, 1))
    stripped = Tower(That.base, [type(s)(s.nu, s.a, None, s.degenerate) for s in That.stages])
    assert reduction_of_completion(stripped).passed


# ---------------------------------------------------------------------------
# tensor square
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3])
def test_tensor_square_reduced(p):
    rng = random.Random(31)
    C = adjoin(BaseField(p, 1), t(0, p) ** p, 1)
    C = adjoin(C, t(1, p) ** p, 1)
    report = tensor_square_reduced_check(C, rng=rng)
    n = p * p
    assert report.n == n and report.dim == n * n
    assert report.nil_dim == n * n - n
    assert report.passed, report.checks


def test_tensor_square_rejects_constant_outside_subfield():
    p = 2
    C = Tower(BaseField(p, 1), adjoin(BaseField(p, 0), t(0, p), 1).stages)
    with pytest.raises(NotInBase):
        tensor_square_reduced_check(C)


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def test_tower_json_roundtrip():
    A = chain_stage_tower(2, 2, j=1, nu=1)
    back = tower_from_json(tower_to_json(A))
    assert back.base == A.base
    assert len(back.stages) == len(A.stages)
    for s, r in zip(A.stages, back.stages):
        assert (s.nu, s.degenerate) == (r.nu, r.degenerate)
        assert s.a == r.a and s.root == r.root
    with pytest.raises(TypeError):
        tower_to_json(adjoin(BaseField(2, 1), t(0, 2) ** 2, 1))
