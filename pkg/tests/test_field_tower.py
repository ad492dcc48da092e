"""Tests for exact arithmetic in k = F_p(t_0, t_1, ...).

The oracle at the top reimplements polynomial arithmetic naively on dicts
mapping monomials to residues; everything the fast kernels produce is compared
against it on seeded random inputs.
"""

import random

import pytest

from prc.field_tower import (
    FieldElem,
    MultiPoly,
    check_prime,
    in_p_span,
    inv_mod,
    nullspace_over_k,
    p_monomial_decomposition,
    p_span_rank,
    parse_field_elem,
    parse_poly,
    rank_over_k,
    t,
)


# ---------------------------------------------------------------------------
# oracle: naive dict-based polynomial arithmetic
# ---------------------------------------------------------------------------

def oracle_add(a, b, p):
    out = dict(a)
    for mono, c in b.items():
        out[mono] = (out.get(mono, 0) + c) % p
    return {m: c for m, c in out.items() if c}


def oracle_mul(a, b, p):
    out = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            exps = dict(m1)
            for v, e in m2:
                exps[v] = exps.get(v, 0) + e
            mono = tuple(sorted(exps.items()))
            out[mono] = (out.get(mono, 0) + c1 * c2) % p
    return {m: c for m, c in out.items() if c}


def to_dict(poly):
    return {mono: c for mono, c in poly.terms()}


def random_poly_dict(rng, p, nterms=5, nvars=4, max_exp=6):
    out = {}
    for _ in range(rng.randrange(0, nterms + 1)):
        mono = tuple(
            sorted(
                dict(
                    (rng.randrange(nvars), rng.randrange(1, max_exp))
                    for _ in range(rng.randrange(0, 3))
                ).items()
            )
        )
        out[mono] = (out.get(mono, 0) + rng.randrange(1, p)) % p
    return {m: c for m, c in out.items() if c}


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_poly_arith_matches_oracle(p):
    rng = random.Random(100 + p)
    for _ in range(40):
        da = random_poly_dict(rng, p)
        db = random_poly_dict(rng, p)
        a = MultiPoly.from_terms(da, p)
        b = MultiPoly.from_terms(db, p)
        assert to_dict(a + b) == oracle_add(da, db, p)
        assert to_dict(a * b) == oracle_mul(da, db, p)
        assert to_dict(-a) == {m: (-c) % p for m, c in da.items()}


def test_poly_pow_matches_repeated_mul():
    p = 3
    rng = random.Random(7)
    d = random_poly_dict(rng, p)
    a = MultiPoly.from_terms(d, p)
    acc = {(): 1}
    for n in range(5):
        assert to_dict(a ** n) == acc
        acc = oracle_mul(acc, d, p)


def test_poly_frobenius_is_pth_power():
    p = 2
    a = MultiPoly.from_terms({(((0, 1),)): 1, ((1, 2),): 1}, p)
    assert a.frobenius(2) == a * a * a * a
    assert a.frobenius(2).pth_root(2) == a
    # an exponent not divisible by p has no root
    assert MultiPoly.variable(0, p).pth_root(1) is None


def test_poly_parse_print_roundtrip():
    p = 5
    rng = random.Random(3)
    for _ in range(25):
        a = MultiPoly.from_terms(random_poly_dict(rng, p), p)
        assert parse_poly(str(a), p) == a


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------

def random_field_elem(rng, p):
    num = MultiPoly.from_terms(random_poly_dict(rng, p), p)
    den = MultiPoly.zero(p)
    while den.is_zero():
        den = MultiPoly.from_terms(random_poly_dict(rng, p), p)
    return FieldElem(num, den)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_field_axioms(p):
    rng = random.Random(200 + p)
    for _ in range(20):
        x = random_field_elem(rng, p)
        y = random_field_elem(rng, p)
        z = random_field_elem(rng, p)
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x - x == FieldElem.zero(p)
        if not x.is_zero():
            assert x * x.inverse() == FieldElem.one(p)
            assert (y / x) * x == y


def test_field_equality_is_cross_multiplication():
    p = 3
    t0 = t(0, p)
    # (t0^2 - 1) / (t0 - 1) == t0 + 1 without any cancellation performed
    one = FieldElem.one(p)
    lhs = (t0 * t0 - one) / (t0 - one)
    assert lhs == t0 + one


def test_field_frobenius_root_roundtrip():
    p = 3
    rng = random.Random(9)
    for _ in range(20):
        x = random_field_elem(rng, p)
        for nu in (1, 2):
            assert x.frobenius(nu).pth_root(nu) == x
    # t0 itself is not a p-th power
    assert t(0, p).pth_root(1) is None


def test_field_parse_print_roundtrip():
    p = 2
    rng = random.Random(11)
    for _ in range(25):
        x = random_field_elem(rng, p)
        assert parse_field_elem(str(x), p) == x


def test_field_elem_unhashable():
    with pytest.raises(TypeError):
        hash(t(0, 2))


# ---------------------------------------------------------------------------
# semilinear machinery
# ---------------------------------------------------------------------------

def test_p_monomial_decomposition_recomposes():
    rng = random.Random(21)
    for p, mu in [(2, 1), (2, 2), (3, 1)]:
        q = p ** mu
        for _ in range(15):
            x = random_field_elem(rng, p)
            dec = p_monomial_decomposition(x, mu)
            acc = FieldElem.zero(p)
            for residue, g in dec.items():
                mono = FieldElem(MultiPoly.from_terms({residue: 1}, p))
                acc = acc + g ** q * mono
                # residues really are reduced mod p^mu
                assert all(0 < e < q for _, e in residue)
            assert acc == x


def test_p_span_rank_known_values():
    p, mu = 2, 1
    one = FieldElem.one(p)
    t0, t1 = t(0, p), t(1, p)
    assert p_span_rank([one], mu) == 1
    assert p_span_rank([one, t0], mu) == 2
    assert p_span_rank([t0, t0], mu) == 1
    # t0^2 lies in k^p itself, so it is independent of t0 over k^p
    assert p_span_rank([t0, t0 * t0], mu) == 2
    assert p_span_rank([one, t0 * t0], mu) == 1
    assert p_span_rank([one, t0, t1, t0 * t1], mu) == 4


def test_p_span_rank_of_distinct_variables_grows():
    # the coefficient sequence of the classical stream: t_0, t_1, t_2, ...
    p, mu = 2, 1
    for m in (4, 8):
        assert p_span_rank([t(i, p) for i in range(m)], mu) == m


def test_in_p_span():
    p, mu = 2, 1
    t0, t1 = t(0, p), t(1, p)
    gens = [FieldElem.one(p), t0]
    assert in_p_span(t0, gens, mu)
    assert in_p_span(t0 * t0, gens, mu)  # scalar multiple of 1
    assert in_p_span(t0 + FieldElem.one(p), gens, mu)
    assert not in_p_span(t1, gens, mu)


def test_nullspace_over_k():
    p = 3
    one = FieldElem.one(p)
    t0 = t(0, p)
    zero = FieldElem.zero(p)
    # single relation x + t0*y = 0: kernel is one-dimensional
    kernel = nullspace_over_k([[one, t0]], 2, p)
    assert len(kernel) == 1
    vec = kernel[0]
    assert vec[0] + t0 * vec[1] == zero
    assert rank_over_k([[one, t0], [t0, t0 * t0]], p) == 1
    assert rank_over_k([[one, zero], [zero, one]], p) == 2


def test_check_prime_and_inv_mod():
    for p in (2, 3, 5, 7, 11, 13):
        check_prime(p)
        for a in range(1, p):
            assert (a * inv_mod(a, p)) % p == 1
    for bad in (1, 4, 17):
        with pytest.raises(ValueError):
            check_prime(bad)
