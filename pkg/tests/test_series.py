"""Tests for truncated series over k and the term kernels underneath.

The multiplication oracle is the naive double loop over FieldElem
coefficients, independent of the batched kernel path.  The kernel tests run
every backend in prc._kernels.IMPLEMENTATIONS on identical inputs and demand
identical canonical output.
"""

import random

import numpy as np
import pytest

from prc._kernels import IMPLEMENTATIONS, PAD_VAR
from prc.field_tower import FieldElem, t
from prc.series import (
    NotAUnit,
    PRECISION_EXCEEDED,
    Series,
    parse_series,
    series_arith,
)


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def oracle_mul(a, b, n):
    p = a.p
    out = []
    for j in range(n):
        acc = FieldElem.zero(p)
        for i in range(j + 1):
            acc = acc + a.coeffs[i] * b.coeffs[j - i]
        out.append(acc)
    return Series(out, p=p, precision=n)


def random_series(rng, p, precision, dense=False):
    coeffs = []
    for _ in range(precision):
        acc = FieldElem.zero(p)
        for _ in range(rng.randrange(0, 4) if not dense else 2):
            c = FieldElem.const(rng.randrange(1, p), p)
            for _ in range(rng.randrange(0, 3)):
                c = c * t(rng.randrange(6), p) ** rng.randrange(1, 5)
            acc = acc + c
        coeffs.append(acc)
    return Series(coeffs, p=p, precision=precision)


# ---------------------------------------------------------------------------
# ring structure
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5])
def test_mul_matches_oracle(p):
    rng = random.Random(300 + p)
    for _ in range(10):
        a = random_series(rng, p, 18)
        b = random_series(rng, p, 18)
        assert a * b == oracle_mul(a, b, 18)


def test_mul_with_fractional_coefficients():
    # coefficients with nontrivial denominators leave the batched fast path
    p = 3
    x = t(0, p) / (t(1, p) + FieldElem.one(p))
    a = Series([x, FieldElem.one(p)], p=p, precision=6)
    b = Series([FieldElem.one(p), x], p=p, precision=6)
    assert a * b == oracle_mul(a, b, 6)


def test_add_sub_and_precision_propagation():
    p = 2
    rng = random.Random(5)
    a = random_series(rng, p, 20)
    b = random_series(rng, p, 12)
    assert (a + b).precision == 12
    assert (a * b).precision == 12
    assert (a + b) - b == a.truncate(12)
    assert (a - a).is_zero()


def test_zero_and_constant_series():
    p = 3
    z = Series.zero(p, 8)
    u = Series.uniformizer(p, 8)
    two = Series.const(FieldElem.const(2, p), 8)
    assert (z * u).is_zero()
    assert two * two == Series.const(FieldElem.const(4 % p, p), 8)
    assert (u * u).valuation() == 2
    assert z.valuation() is PRECISION_EXCEEDED


def test_pow_matches_repeated_mul():
    p = 2
    rng = random.Random(8)
    s = random_series(rng, p, 10)
    acc = Series.one(p, 10)
    for n in range(5):
        assert s ** n == acc
        acc = acc * s


def test_invert():
    p = 5
    rng = random.Random(12)
    for _ in range(10):
        # sparse units: dense random coefficients make the inverse blow up
        coeffs = [FieldElem.zero(p)] * 16
        coeffs[0] = FieldElem.one(p) + t(0, p)
        for _ in range(2):
            coeffs[rng.randrange(1, 16)] = FieldElem.const(rng.randrange(1, p), p)
        u = Series(coeffs, p=p, precision=16)
        assert u * u.invert() == Series.one(p, 16)
    with pytest.raises(NotAUnit):
        Series.uniformizer(p, 4).invert()


def test_frobenius_and_pth_root():
    p = 3
    rng = random.Random(15)
    for nu in (1, 2):
        q = p ** nu
        s = random_series(rng, p, 20)
        f = s.frobenius(nu)
        # frobenius really is the q-th power
        assert f == s ** q
        root = f.pth_root(nu)
        assert root is not None
        # documented output precision: floor((N-1)/q) + 1
        assert root.precision == (20 - 1) // q + 1
        assert root == s.truncate(root.precision)
    # a live coefficient off the stride kills the root
    bad = Series([FieldElem.zero(p), FieldElem.one(p)], p=p, precision=6)
    assert bad.pth_root(1) is None
    # a coefficient outside k^{p^nu} kills the root too
    bad2 = Series([t(0, p)], p=p, precision=6)
    assert bad2.pth_root(1) is None


def test_parse_print_roundtrip():
    p = 2
    rng = random.Random(19)
    for _ in range(20):
        s = random_series(rng, p, 12)
        assert parse_series(str(s), p) == s
    assert parse_series("O(T^4)", p) == Series.zero(p, 4)


def test_series_arith_dispatch():
    p = 2
    a = Series.one(p, 4)
    b = Series.uniformizer(p, 4)
    assert series_arith(a, b, "add") == a + b
    assert series_arith(a, b, "sub") == a - b
    assert series_arith(a, b, "mul") == b
    with pytest.raises(ValueError):
        series_arith(a, b, "div")


# ---------------------------------------------------------------------------
# kernel backends agree
# ---------------------------------------------------------------------------

def _random_terms(rng, rows, width, p):
    tv = np.full((rows, width), PAD_VAR, dtype=np.int64)
    te = np.zeros((rows, width), dtype=np.int64)
    for i in range(rows):
        nvars = rng.randrange(1, width + 1)
        for k, v in enumerate(sorted(rng.sample(range(6), nvars))):
            tv[i, k] = v
            te[i, k] = rng.randrange(1, 5)
    c = np.array([rng.randrange(1, p) for _ in range(rows)], dtype=np.int64)
    return tv, te, c


@pytest.mark.parametrize("p", [2, 5])
def test_backends_agree(p):
    if len(IMPLEMENTATIONS) < 2:
        pytest.skip("only one backend available")
    rng = random.Random(400 + p)
    tva, tea, ca = _random_terms(rng, 60, 3, p)
    tvb, teb, cb = _random_terms(rng, 40, 3, p)
    ia = np.array([rng.randrange(60) for _ in range(80)], dtype=np.int64)
    ib = np.array([rng.randrange(40) for _ in range(80)], dtype=np.int64)
    outj = np.sort(np.array([rng.randrange(7) for _ in range(60)], dtype=np.int64))
    results = {}
    for name, impl in IMPLEMENTATIONS.items():
        results[name] = {
            "combine": impl["combine"](tva.copy(), tea.copy(), ca.copy(), p),
            "mul_rows": impl["mul_rows"](tva, tea, ca, tvb, teb, cb, p),
            "mul_pairs": impl["mul_pairs"](tva, tea, ca, ia, tvb, teb, cb, ib, p),
            "convolve": impl["convolve"](tva, tea, ca, outj, 7, p),
        }
    names = list(results)
    ref = results[names[0]]
    for other in names[1:]:
        got = results[other]
        for key in ("combine", "convolve"):
            for x, y in zip(ref[key], got[key]):
                assert np.array_equal(x, y), (other, key)
        for key in ("mul_rows", "mul_pairs"):
            # raw products are order/padding sensitive; compare after combining
            rx = IMPLEMENTATIONS["numpy"]["combine"](*ref[key], p)
            ry = IMPLEMENTATIONS["numpy"]["combine"](*got[key], p)
            for x, y in zip(rx, ry):
                assert np.array_equal(x, y), (other, key)
