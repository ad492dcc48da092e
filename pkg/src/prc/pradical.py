"""Heights, the filtration by heights, and purely inseparable polynomial
detection over the model ring.

The height of a stream b is the least nu with b^{p^nu} certified inside R_mu;
it drives the filtration B_0 subset B_1 subset ... whose union is the
p-radical closure.  Polynomial detection decides whether f has exactly one
root in the algebraic closure (f = c (X - b)^n), via maximal p-power
deflation and a distinct-root count from gcd(g, g') over k(T).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .field_tower import FieldElem
from .model_ring import (
    Frob,
    ModelRing,
    Polynomial,
    Product,
    NagataStream,
    ScalarMul,
    StreamElem,
    Sum,
    in_model,
)
from .series import Series


class NotARoot(Exception):
    """The designated stream does not annihilate the polynomial mod T^N."""


class UndecidableCoefficients(Exception):
    """A coefficient lies outside the exactly-representable class."""


DEFAULT_HEIGHT_BOUND = 4
MAX_HEIGHT_BOUND = 8


@dataclass
class HeightResult:
    status: str  # "finite" | "exceeds" | "unknown"
    nu: int = None
    bound: int = DEFAULT_HEIGHT_BOUND
    evidence: list = field(default_factory=list)  # (nu, MembershipVerdict)

    def __str__(self):
        if self.status == "finite":
            return f"Finite({self.nu})"
        if self.status == "exceeds":
            return f"ExceedsBound({self.bound})"
        return "Unknown"


def height(b: StreamElem, ring: ModelRing, bound=DEFAULT_HEIGHT_BOUND) -> HeightResult:
    """Smallest nu <= bound with b^{p^nu} in R_mu, with the verdict chain."""
    if not 1 <= bound <= MAX_HEIGHT_BOUND:
        raise ValueError(f"bound must be in [1, {MAX_HEIGHT_BOUND}]")
    evidence = []
    for nu in range(bound + 1):
        candidate = b if nu == 0 else Frob(nu, b)
        verdict = in_model(candidate, ring)
        evidence.append((nu, verdict))
        if verdict.status == "yes":
            return HeightResult("finite", nu=nu, bound=bound, evidence=evidence)
        if verdict.status == "unknown":
            return HeightResult("unknown", bound=bound, evidence=evidence)
    return HeightResult("exceeds", bound=bound, evidence=evidence)


def filtration_member(b: StreamElem, n: int, ring: ModelRing) -> str:
    """Membership of b in B_n = {height <= n}: "yes" | "no" | "unknown"."""
    if n < 0:
        raise ValueError("n must be >= 0")
    result = height(b, ring, bound=max(n, DEFAULT_HEIGHT_BOUND))
    if result.status == "finite":
        return "yes" if result.nu <= n else "no"
    if result.status == "exceeds":
        return "no"
    return "unknown"


# ---------------------------------------------------------------------------
# exact polynomial representations of streams
# ---------------------------------------------------------------------------

def rule_to_polynomial(rule: StreamElem, p):
    """Coefficients of the rule as a finite T-polynomial, or None.

    Nagata streams (and anything containing one outside a deep-enough
    Frobenius) have no finite representation and yield None.  Products and
    sums of convertible rules convert exactly, without truncation.
    """
    if isinstance(rule, Polynomial):
        return _trim([c for c in rule.coeffs])
    if isinstance(rule, NagataStream):
        return None
    if isinstance(rule, Frob):
        sub = rule_to_polynomial(rule.inner, p)
        if sub is None:
            return None
        q = p ** rule.nu
        out = [FieldElem.zero(p)] * (q * max(len(sub) - 1, 0) + 1)
        for i, c in enumerate(sub):
            out[i * q] = c.frobenius(rule.nu)
        return _trim(out)
    if isinstance(rule, ScalarMul):
        sub = rule_to_polynomial(rule.inner, p)
        if sub is None:
            return None
        return _trim([rule.scalar * c for c in sub])
    if isinstance(rule, Sum):
        acc = []
        for part in rule.parts:
            sub = rule_to_polynomial(part, p)
            if sub is None:
                return None
            acc = _list_add(acc, sub, p)
        return _trim(acc)
    if isinstance(rule, Product):
        acc = [FieldElem.one(p)]
        for factor in rule.factors:
            sub = rule_to_polynomial(factor, p)
            if sub is None:
                return None
            acc = _list_mul(acc, sub, p)
        return _trim(acc)
    raise TypeError(f"unknown rule {rule!r}")


def _trim(coeffs):
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    return coeffs


def _list_add(a, b, p):
    n = max(len(a), len(b))
    zero = FieldElem.zero(p)
    return [
        (a[i] if i < len(a) else zero) + (b[i] if i < len(b) else zero)
        for i in range(n)
    ]


def _list_mul(a, b, p):
    if not a or not b:
        return []
    zero = FieldElem.zero(p)
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def _stream_is_zero(rule, p):
    """Three-valued zero test: True / False / None (undecidable)."""
    poly = rule_to_polynomial(rule, p)
    if poly is not None:
        return len(poly) == 0
    if not rule.eval(p, 32).is_zero():
        return False
    return None


# ---------------------------------------------------------------------------
# univariate arithmetic over k and over k(T)
# ---------------------------------------------------------------------------

def _udeg(c):
    return len(c) - 1


def _utrim(c):
    c = list(c)
    while c and c[-1].is_zero():
        c.pop()
    return c


def _udivmod(a, b):
    """Division with remainder in k[T]; b nonzero."""
    rem = list(a)
    inv = b[-1].inverse()
    q = []
    while len(rem) >= len(b):
        factor = rem[-1] * inv
        if not factor.is_zero():
            shift = len(rem) - len(b)
            for i, c in enumerate(b[:-1]):
                rem[shift + i] = rem[shift + i] - factor * c
        q.append(factor)
        rem.pop()
    q.reverse()
    return _utrim(q), _utrim(rem)


def _ugcd(a, b):
    a, b = _utrim(a), _utrim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    if a:
        inv = a[-1].inverse()
        a = [c * inv for c in a]
    return a


class RatFunc:
    """An element of k(T): a reduced fraction of univariate k-polynomials."""

    __slots__ = ("num", "den", "p")

    def __init__(self, num, den=None, p=None):
        num = _utrim(num)
        if p is None:
            p = (num[0] if num else den[0]).p
        if den is None:
            den = [FieldElem.one(p)]
        den = _utrim(den)
        if not den:
            raise ZeroDivisionError("zero denominator in k(T)")
        if not num:
            den = [FieldElem.one(p)]
        else:
            g = _ugcd(num, den)
            if _udeg(g) > 0:
                num, _ = _udivmod(num, g)
                den, _ = _udivmod(den, g)
            lead_inv = den[-1].inverse()
            num = [c * lead_inv for c in num]
            den = [c * lead_inv for c in den]
        self.num = num
        self.den = den
        self.p = p

    @classmethod
    def zero(cls, p):
        return cls([], p=p)

    @classmethod
    def one(cls, p):
        return cls([FieldElem.one(p)], p=p)

    @classmethod
    def const(cls, c):
        return cls([c], p=c.p)

    def is_zero(self):
        return not self.num

    def _lift(self, other):
        if isinstance(other, int):
            return RatFunc([FieldElem.const(other, self.p)], p=self.p)
        if isinstance(other, FieldElem):
            return RatFunc.const(other)
        if isinstance(other, RatFunc):
            return other
        return None

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        diff = _list_add(
            _list_mul(self.num, other.den, self.p),
            [-c for c in _list_mul(other.num, self.den, self.p)],
            self.p,
        )
        return not _utrim(diff)

    def __hash__(self):
        raise TypeError("RatFunc is unhashable")

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        num = _list_add(
            _list_mul(self.num, other.den, self.p),
            _list_mul(other.num, self.den, self.p),
            self.p,
        )
        return RatFunc(num, _list_mul(self.den, other.den, self.p), p=self.p)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc([-c for c in self.num], self.den, p=self.p)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return RatFunc(
            _list_mul(self.num, other.num, self.p),
            _list_mul(self.den, other.den, self.p),
            p=self.p,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero in k(T)")
        return RatFunc(
            _list_mul(self.num, other.den, self.p),
            _list_mul(self.den, other.num, self.p),
            p=self.p,
        )

    def inverse(self):
        return RatFunc.one(self.p) / self

    def __str__(self):
        def fmt(c):
            return " + ".join(
                f"({x})*T^{i}" for i, x in enumerate(c) if not x.is_zero()
            ) or "0"

        if _udeg(self.den) == 0 and self.den[0].is_one():
            return fmt(self.num)
        return f"({fmt(self.num)}) / ({fmt(self.den)})"

    __repr__ = __str__


class Poly1:
    """Dense univariate polynomial over a coefficient field (duck-typed)."""

    def __init__(self, coeffs, zero):
        coeffs = list(coeffs)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        self.coeffs = coeffs
        self.zero = zero

    def degree(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def lead(self):
        return self.coeffs[-1]

    def derivative(self):
        return Poly1(
            [c * i for i, c in enumerate(self.coeffs)][1:], self.zero
        )

    def deflate(self, k):
        return Poly1(self.coeffs[::k], self.zero)

    def divmod(self, other):
        rem = list(self.coeffs)
        inv = other.lead().inverse()
        q = []
        while len(rem) >= len(other.coeffs):
            factor = rem[-1] * inv
            if not factor.is_zero():
                shift = len(rem) - len(other.coeffs)
                for i, c in enumerate(other.coeffs[:-1]):
                    rem[shift + i] = rem[shift + i] - factor * c
            q.append(factor)
            rem.pop()
        q.reverse()
        return Poly1(q, self.zero), Poly1(rem, self.zero)

    def gcd(self, other):
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        if not a.is_zero():
            inv = a.lead().inverse()
            a = Poly1([c * inv for c in a.coeffs], self.zero)
        return a


def _count_distinct_roots(g: Poly1, p: int) -> int:
    """Number of distinct roots of g in the algebraic closure.

    Char-p aware: roots with multiplicity prime to p come out of g/gcd(g,g'),
    the rest (all multiplicities divisible by p) recurse after index deflation
    (taking p-th roots of roots is a bijection in characteristic p).
    """
    while True:
        gp = g.derivative()
        if not gp.is_zero():
            break
        g = g.deflate(p)
        if g.degree() < 1:
            return 0
    d = g.gcd(gp)
    if d.degree() == 0:
        return g.degree()
    w, _ = g.divmod(d)
    remaining = d
    while True:
        c = remaining.gcd(w)
        if c.degree() == 0:
            break
        remaining, _ = remaining.divmod(c)
    extra = _count_distinct_roots(remaining, p) if remaining.degree() > 0 else 0
    return w.degree() + extra


# ---------------------------------------------------------------------------
# purely inseparable polynomials over F = Frac(R)
# ---------------------------------------------------------------------------

@dataclass
class RPolynomial:
    """f = sum lambda_i X^i with stream coefficients over the model ring."""

    coeffs: list  # StreamElem, index = exponent of X
    p: int

    def __post_init__(self):
        if len(self.coeffs) < 2:
            raise ValueError("polynomial must be nonconstant")
        if _stream_is_zero(self.coeffs[-1], self.p) is True:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self):
        return len(self.coeffs) - 1


@dataclass
class InsepResult:
    status: str  # "purely_inseparable" | "not" | "unknown"
    nu: int = None
    m: int = None


def detect_purely_inseparable(f: RPolynomial) -> InsepResult:
    """Does f have exactly one root in the algebraic closure?

    Strip the largest p-power from the exponents: f(X) = g(X^{p^nu}).  A
    linear g settles the question at once.  Otherwise g and g' need exact
    coefficients in k(T), so all of g's coefficients must convert to finite
    T-polynomials; the distinct-root count then falls out of gcd(g, g').
    """
    p = f.p
    zero_status = [_stream_is_zero(c, p) for c in f.coeffs]
    if any(z is None for z in zero_status):
        return InsepResult("unknown")
    nonzero_idx = [i for i, z in enumerate(zero_status) if z is False]
    nu = 0
    while all(i % p ** (nu + 1) == 0 for i in nonzero_idx if i):
        if f.degree % p ** (nu + 1):
            break
        nu += 1
    q = p ** nu
    g_degree = f.degree // q
    if g_degree == 1:
        return InsepResult("purely_inseparable", nu=nu, m=1)
    g_coeffs = []
    for i in range(g_degree + 1):
        poly = rule_to_polynomial(f.coeffs[i * q], p)
        if poly is None:
            raise UndecidableCoefficients(
                "distinct-root counting needs exactly representable coefficients"
            )
        g_coeffs.append(RatFunc(poly, p=p))
    g = Poly1(g_coeffs, RatFunc.zero(p))
    distinct = _count_distinct_roots(g, p)
    if distinct == 1:
        return InsepResult("purely_inseparable", nu=nu, m=g_degree)
    return InsepResult("not", nu=nu, m=g_degree)


@dataclass
class RadicalResult:
    status: str  # "confirmed" | "refuted" | "unknown"
    element: StreamElem = None
    nu: int = None


def radical_from_equation(f: RPolynomial, b: StreamElem, ring: ModelRing,
                          precision=None) -> RadicalResult:
    """Extract the closure element c*b from a purely inseparable equation.

    Requires f purely inseparable and f(b) = 0 mod T^N; then c*b (c the
    leading coefficient) is tested for p^nu-power membership in R_mu.
    """
    det = detect_purely_inseparable(f)
    if det.status != "purely_inseparable":
        raise ValueError("polynomial is not purely inseparable")
    p = ring.p
    N = precision if precision is not None else ring.precision
    b_series = b.eval(p, N)
    acc = Series.zero(p, N)
    power = Series.one(p, N)
    for lam in f.coeffs:
        acc = acc + lam.eval(p, N) * power
        power = power * b_series
    if not acc.is_zero():
        raise NotARoot(f"f(b) != 0 mod T^{N}")
    lead = f.coeffs[-1]
    lead_poly = rule_to_polynomial(lead, p)
    if lead_poly is not None and len(lead_poly) == 1:
        cb = ScalarMul(lead_poly[0], b)
    else:
        cb = Product([lead, b])
    verdict = in_model(Frob(det.nu, cb), ring)
    if verdict.status == "yes":
        return RadicalResult("confirmed", element=cb, nu=det.nu)
    if verdict.status == "no":
        return RadicalResult("refuted", element=cb, nu=det.nu)
    return RadicalResult("unknown", element=cb, nu=det.nu)
