"""Truncated formal power series over k: the computable shadow of k[[T]].

A Series carries exactly `precision` coefficients; every operation propagates
the minimum precision of its inputs, so all claims downstream are qualified
"mod T^N" with an explicit N.  Equality compares coefficients up to the
common precision.

Multiplication has a fast path for series whose coefficients are polynomials
(trivial denominators): the raw term rows of all numerator products that land
on one output coefficient are gathered and combined in a single kernel call.
That is what keeps honest convolution of Nagata-stream powers affordable at
precisions in the hundreds.
"""

from __future__ import annotations

import re

import numpy as np

from ._kernels import _trim_width, convolve_combine, mul_blocks, pad_rows
from .field_tower import FieldElem, MultiPoly, check_prime, parse_field_elem


class NotAUnit(ValueError):
    """Inversion of a series with vanishing constant term."""


class PrecisionExceeded:
    """Valuation outcome when every stored coefficient vanishes."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PrecisionExceeded"


PRECISION_EXCEEDED = PrecisionExceeded()


class Series:
    __slots__ = ("p", "coeffs", "precision")

    def __init__(self, coeffs, p=None, precision=None):
        coeffs = list(coeffs)
        if p is None:
            if not coeffs:
                raise ValueError("need p for an empty coefficient list")
            p = coeffs[0].p
        check_prime(p)
        if precision is None:
            precision = len(coeffs)
        if precision <= 0:
            raise ValueError("precision must be positive")
        zero = FieldElem.zero(p)
        coeffs = coeffs[:precision] + [zero] * (precision - len(coeffs))
        self.p = p
        self.coeffs = tuple(coeffs)
        self.precision = precision

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p, precision):
        return cls([], p=p, precision=precision)

    @classmethod
    def one(cls, p, precision):
        return cls([FieldElem.one(p)], p=p, precision=precision)

    @classmethod
    def const(cls, c, precision):
        return cls([c], p=c.p, precision=precision)

    @classmethod
    def uniformizer(cls, p, precision):
        """The series T."""
        return cls([FieldElem.zero(p), FieldElem.one(p)], p=p, precision=precision)

    # -- basics -----------------------------------------------------------

    def is_zero(self):
        return all(c.is_zero() for c in self.coeffs)

    def truncate(self, precision):
        if precision > self.precision:
            raise ValueError("cannot extend precision")
        if precision == self.precision:
            return self
        return Series(self.coeffs[:precision], p=self.p, precision=precision)

    def __eq__(self, other):
        """Equality mod T^N for N the minimum of the two precisions."""
        if not isinstance(other, Series):
            return NotImplemented
        if self.p != other.p:
            return False
        n = min(self.precision, other.precision)
        return all(self.coeffs[i] == other.coeffs[i] for i in range(n))

    def __hash__(self):
        raise TypeError("Series is unhashable")

    # -- ring operations --------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Series):
            raise TypeError("expected a Series")
        if self.p != other.p:
            raise ValueError("mixed characteristics")

    def __add__(self, other):
        self._check(other)
        n = min(self.precision, other.precision)
        return Series(
            [self.coeffs[i] + other.coeffs[i] for i in range(n)], p=self.p, precision=n
        )

    def __neg__(self):
        return Series([-c for c in self.coeffs], p=self.p, precision=self.precision)

    def __sub__(self, other):
        self._check(other)
        n = min(self.precision, other.precision)
        return Series(
            [self.coeffs[i] - other.coeffs[i] for i in range(n)], p=self.p, precision=n
        )

    def __mul__(self, other):
        self._check(other)
        n = min(self.precision, other.precision)
        a = self.coeffs
        b = other.coeffs
        if all(c._den_trivial() for c in a[:n]) and all(c._den_trivial() for c in b[:n]):
            return self._mul_poly_coeffs(other, n)
        out = []
        for j in range(n):
            acc = FieldElem.zero(self.p)
            for i in range(j + 1):
                if not a[i].is_zero() and not b[j - i].is_zero():
                    acc = acc + a[i] * b[j - i]
            out.append(acc)
        return Series(out, p=self.p, precision=n)

    def _mul_poly_coeffs(self, other, n):
        # Fast path: all coefficients are polynomials (denominator 1 up to a
        # constant).  The whole truncated convolution is run as a handful of
        # large batched kernel calls: flatten every term of every coefficient
        # into one array, pair rows whose T-degrees sum below n, then combine
        # per output coefficient.
        p = self.p
        fa = _flatten_coeffs(self.coeffs[:n], p)
        fb = _flatten_coeffs(other.coeffs[:n], p)
        zero = FieldElem.zero(p)
        if fa is None or fb is None:
            return Series([zero], p=p, precision=n)
        tva, tea, ca, ja = fa
        tvb, teb, cb, jb = fb
        # Rows are sorted by coefficient index; group them per coefficient and
        # expand only the blocks with combined index below n, in output order,
        # so the kernel sees pairs already bucketed by output coefficient.
        ofs_a = np.searchsorted(ja, np.arange(n + 1))
        ofs_b = np.searchsorted(jb, np.arange(n + 1))
        size_a = np.diff(ofs_a)
        size_b = np.diff(ofs_b)
        live_a = np.nonzero(size_a)[0]
        live_b = np.nonzero(size_b)[0]
        bi = np.repeat(live_a, live_b.shape[0])
        bj = np.tile(live_b, live_a.shape[0])
        jsum = bi + bj
        keep = jsum < n
        bi, bj, jsum = bi[keep], bj[keep], jsum[keep]
        order = np.argsort(jsum, kind="stable")
        bi, bj, jsum = bi[order], bj[order], jsum[order]
        tv, te, c, outj = mul_blocks(
            tva, tea, ca, tvb, teb, cb,
            ofs_a[bi], size_a[bi], ofs_b[bj], size_b[bj], jsum, p,
        )
        if tv.shape[0] == 0:
            return Series([zero], p=p, precision=n)
        tv, te, c, bounds = convolve_combine(tv, te, c, outj, n, p)
        out = [zero] * n
        for j in range(n):
            s, e = int(bounds[j]), int(bounds[j + 1])
            if s == e:
                continue
            # Copy out of the big scratch arrays so coefficients do not pin them.
            poly = MultiPoly(p, *_trim_width(tv[s:e].copy(), te[s:e].copy(), c[s:e].copy()))
            out[j] = FieldElem(poly, _normalised=True)
        return Series(out, p=p, precision=n)

    def scale(self, c: FieldElem):
        return Series([c * x for x in self.coeffs], p=self.p, precision=self.precision)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative series power")
        result = Series.one(self.p, self.precision)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- named operations -------------------------------------------------

    def invert(self):
        """Multiplicative inverse mod T^N; requires a unit constant term."""
        a = self.coeffs
        if a[0].is_zero():
            raise NotAUnit("constant term vanishes")
        inv0 = a[0].inverse()
        out = [inv0]
        for j in range(1, self.precision):
            acc = FieldElem.zero(self.p)
            for i in range(1, j + 1):
                if not a[i].is_zero():
                    acc = acc + a[i] * out[j - i]
            out.append(-inv0 * acc)
        return Series(out, p=self.p, precision=self.precision)

    def valuation(self):
        """Index of the first nonzero coefficient, or PRECISION_EXCEEDED."""
        for i, c in enumerate(self.coeffs):
            if not c.is_zero():
                return i
        return PRECISION_EXCEEDED

    def frobenius(self, nu):
        """self ** (p**nu) == sum c_i^{p^nu} T^{i p^nu}, same precision."""
        if nu < 0:
            raise ValueError("nu must be >= 0")
        if nu == 0:
            return self
        q = self.p ** nu
        zero = FieldElem.zero(self.p)
        out = [zero] * self.precision
        for i, c in enumerate(self.coeffs):
            if i * q >= self.precision:
                break
            out[i * q] = c.frobenius(nu)
        return Series(out, p=self.p, precision=self.precision)

    def pth_root(self, nu):
        """b with b**(p**nu) == self mod T^M, or None.

        Requires every nonzero coefficient to sit at an index divisible by
        p^nu and to be a p^nu-th power in k.  The output precision M is the
        number of root coefficients actually determined by the input,
        floor((N-1)/p^nu) + 1.
        """
        if nu < 0:
            raise ValueError("nu must be >= 0")
        if nu == 0:
            return self
        q = self.p ** nu
        out_prec = (self.precision - 1) // q + 1
        out = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if i % q:
                return None
        for i in range(out_prec):
            c = self.coeffs[i * q]
            if c.is_zero():
                out.append(FieldElem.zero(self.p))
                continue
            root = c.pth_root(nu)
            if root is None:
                return None
            out.append(root)
        return Series(out, p=self.p, precision=out_prec)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        parts = []
        for i, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            text = str(c)
            wrapped = f"({text})" if (" " in text or i > 0) else text
            if i == 0:
                parts.append(wrapped)
            elif i == 1:
                parts.append(f"{wrapped}*T")
            else:
                parts.append(f"{wrapped}*T^{i}")
        parts.append(f"O(T^{self.precision})")
        return " + ".join(parts)

    __repr__ = __str__


def _const_inv(den: MultiPoly) -> int:
    from .field_tower import inv_mod

    return inv_mod(den.const_value(), den.p)


def _flatten_coeffs(coeffs, p):
    """Stack the terms of all nonzero polynomial coefficients into one batch.

    Returns (tv, te, c, idx) where row r is a term of coefficient idx[r], or
    None when every coefficient vanishes.
    """
    polys = []
    for j, elem in enumerate(coeffs):
        if elem.is_zero():
            continue
        num = elem.num
        d = elem.den.const_value()
        if d != 1:
            num = num * MultiPoly.const(_const_inv(elem.den), p)
        polys.append((j, num))
    if not polys:
        return None
    width = max(num.tv.shape[1] for _, num in polys)
    tvs, tes, cs, idxs = [], [], [], []
    for j, num in polys:
        tv, te = pad_rows(num.tv, num.te, width)
        tvs.append(tv)
        tes.append(te)
        cs.append(num.coeffs)
        idxs.append(np.full(num.coeffs.shape[0], j, dtype=np.int64))
    return (
        np.concatenate(tvs),
        np.concatenate(tes),
        np.concatenate(cs),
        np.concatenate(idxs),
    )


_ORDER_RE = re.compile(r"O\(T\^(\d+)\)\s*$")
_POWER_RE = re.compile(r"^\(?(.*?)\)?\*T(?:\^(\d+))?$")


def parse_series(text, p):
    """Inverse of Series.__str__."""
    text = text.strip()
    m = _ORDER_RE.search(text)
    if not m:
        raise ValueError("missing O(T^N) precision marker")
    precision = int(m.group(1))
    body = text[: m.start()].rstrip().rstrip("+").strip()
    coeffs = {}
    for chunk in _split_top_level(body):
        chunk = chunk.strip()
        if not chunk:
            continue
        pm = _POWER_RE.match(chunk)
        if pm:
            idx = int(pm.group(2)) if pm.group(2) else 1
            coeff_text = pm.group(1)
        else:
            idx = 0
            coeff_text = chunk[1:-1] if chunk.startswith("(") and chunk.endswith(")") else chunk
        coeffs[idx] = parse_field_elem(coeff_text, p)
    out = [coeffs.get(i, FieldElem.zero(p)) for i in range(precision)]
    return Series(out, p=p, precision=precision)


def _split_top_level(text):
    parts = []
    depth = 0
    current = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and text.startswith(" + ", i):
            parts.append("".join(current))
            current = []
            i += 3
            continue
        current.append(ch)
        i += 1
    parts.append("".join(current))
    return parts


def series_arith(a: Series, b: Series, op: str) -> Series:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")
