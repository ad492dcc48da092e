"""Exact arithmetic in F_p and in the rational function field k = F_p(t0, t1, ...).

k has infinite p-degree: the variables t_i form arbitrarily large families that
are independent over k^p.  Elements of k are fractions of sparse multivariate
polynomials over F_p.  Fractions are not reduced to a canonical form (no
multivariate gcd); equality is decided by cross-multiplication, which is all
the rest of the package relies on.  To bound growth, fractions are reduced by
their common monomial content and the denominator's leading coefficient is
normalised to 1.

Also provides the k^{p^mu}-semilinear machinery: decomposition of field
elements over the p^mu-monomial basis of k, and ranks of k^{p^mu}-spans via
fraction-free Gaussian elimination (cross-multiplication pivoting, no
canonical forms needed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ._kernels import PAD_VAR, combine_terms, mul_rows, pad_rows

MAX_PRIME = 13
_PRIMES = (2, 3, 5, 7, 11, 13)


def check_prime(p: int) -> int:
    if p not in _PRIMES:
        raise ValueError(f"p must be a prime with 2 <= p <= {MAX_PRIME}, got {p}")
    return p


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in F_p")
    return pow(a, p - 2, p)


@dataclass(frozen=True)
class PrimeFieldElem:
    """A residue in F_p.  value**p == value always (Fermat)."""

    value: int
    p: int

    def __post_init__(self):
        check_prime(self.p)
        if not 0 <= self.value < self.p:
            raise ValueError("residue out of range")

    def _lift(self, other) -> "PrimeFieldElem":
        if isinstance(other, int):
            return PrimeFieldElem(other % self.p, self.p)
        if other.p != self.p:
            raise ValueError("mixed characteristics")
        return other

    def __add__(self, other):
        other = self._lift(other)
        return PrimeFieldElem((self.value + other.value) % self.p, self.p)

    def __sub__(self, other):
        other = self._lift(other)
        return PrimeFieldElem((self.value - other.value) % self.p, self.p)

    def __mul__(self, other):
        other = self._lift(other)
        return PrimeFieldElem((self.value * other.value) % self.p, self.p)

    def __truediv__(self, other):
        other = self._lift(other)
        return PrimeFieldElem((self.value * inv_mod(other.value, self.p)) % self.p, self.p)

    def pth_root(self) -> "PrimeFieldElem":
        # Frobenius is the identity on F_p.
        return self


class MultiPoly:
    """Sparse multivariate polynomial over F_p.

    Terms are rows of (variable, exponent) pairs sorted by variable and padded
    with (PAD_VAR, 0); rows are kept in a canonical lexicographic order with
    coefficients in [1, p).  No zero coefficients are stored.
    """

    __slots__ = ("p", "tv", "te", "coeffs")

    def __init__(self, p, tv, te, coeffs):
        self.p = p
        self.tv = tv
        self.te = te
        self.coeffs = coeffs

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p):
        check_prime(p)
        return cls(
            p,
            np.empty((0, 0), dtype=np.int64),
            np.empty((0, 0), dtype=np.int64),
            np.empty((0,), dtype=np.int64),
        )

    @classmethod
    def const(cls, c, p):
        check_prime(p)
        c %= p
        if c == 0:
            return cls.zero(p)
        return cls(
            p,
            np.empty((1, 0), dtype=np.int64),
            np.empty((1, 0), dtype=np.int64),
            np.array([c], dtype=np.int64),
        )

    @classmethod
    def variable(cls, index, p, exp=1):
        check_prime(p)
        if index < 0 or exp <= 0:
            raise ValueError("variable index must be >= 0 and exponent positive")
        return cls(
            p,
            np.array([[index]], dtype=np.int64),
            np.array([[exp]], dtype=np.int64),
            np.array([1], dtype=np.int64),
        )

    @classmethod
    def from_terms(cls, terms, p):
        """terms: mapping from ((var, exp), ...) tuples to integer coefficients."""
        check_prime(p)
        rows = []
        coeffs = []
        for mono, c in terms.items():
            mono = tuple(sorted((int(v), int(e)) for v, e in mono if e))
            rows.append(mono)
            coeffs.append(int(c) % p)
        if not rows:
            return cls.zero(p)
        width = max(len(r) for r in rows)
        tv = np.full((len(rows), width), PAD_VAR, dtype=np.int64)
        te = np.zeros((len(rows), width), dtype=np.int64)
        for i, mono in enumerate(rows):
            for k, (v, e) in enumerate(mono):
                tv[i, k] = v
                te[i, k] = e
        return cls(p, *combine_terms(tv, te, np.array(coeffs, dtype=np.int64), p))

    # -- basics -----------------------------------------------------------

    @property
    def n_terms(self):
        return self.tv.shape[0]

    def is_zero(self):
        return self.tv.shape[0] == 0

    def is_const(self):
        return self.tv.shape[0] == 0 or (self.tv.shape[0] == 1 and self.tv.shape[1] == 0)

    def const_value(self):
        if self.is_zero():
            return 0
        if not self.is_const():
            raise ValueError("not a constant")
        return int(self.coeffs[0])

    def terms(self):
        """Iterate (((var, exp), ...), coeff) in canonical order."""
        for i in range(self.tv.shape[0]):
            mono = tuple(
                (int(v), int(e))
                for v, e in zip(self.tv[i], self.te[i])
                if v != PAD_VAR
            )
            yield mono, int(self.coeffs[i])

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return (
            self.p == other.p
            and self.tv.shape == other.tv.shape
            and bool(np.array_equal(self.tv, other.tv))
            and bool(np.array_equal(self.te, other.te))
            and bool(np.array_equal(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.p, self.tv.tobytes(), self.te.tobytes(), self.coeffs.tobytes()))

    # -- ring operations --------------------------------------------------

    def _check(self, other):
        if self.p != other.p:
            raise ValueError("mixed characteristics")

    def __add__(self, other):
        self._check(other)
        width = max(self.tv.shape[1], other.tv.shape[1])
        tva, tea = pad_rows(self.tv, self.te, width)
        tvb, teb = pad_rows(other.tv, other.te, width)
        tv = np.concatenate([tva, tvb])
        te = np.concatenate([tea, teb])
        coeffs = np.concatenate([self.coeffs, other.coeffs])
        return MultiPoly(self.p, *combine_terms(tv, te, coeffs, self.p))

    def __neg__(self):
        if self.is_zero():
            return self
        return MultiPoly(self.p, self.tv, self.te, (-self.coeffs) % self.p)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        self._check(other)
        if self.is_zero() or other.is_zero():
            return MultiPoly.zero(self.p)
        raw = mul_rows(self.tv, self.te, self.coeffs, other.tv, other.te, other.coeffs, self.p)
        return MultiPoly(self.p, *combine_terms(*raw, self.p))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = MultiPoly.const(1, self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def scale(self, c):
        c %= self.p
        if c == 0 or self.is_zero():
            return MultiPoly.zero(self.p)
        return MultiPoly(self.p, self.tv, self.te, (self.coeffs * c) % self.p)

    # -- Frobenius and p-th roots ----------------------------------------

    def frobenius(self, nu):
        """x ** (p ** nu).  Coefficients in F_p are Frobenius-fixed."""
        if nu < 0:
            raise ValueError("nu must be >= 0")
        if nu == 0 or self.is_zero():
            return self
        q = self.p ** nu
        return MultiPoly(self.p, self.tv, self.te * q, self.coeffs)

    def pth_root(self, nu):
        """Inverse Frobenius: y with y**(p**nu) == self, or None."""
        if nu < 0:
            raise ValueError("nu must be >= 0")
        if nu == 0 or self.is_zero():
            return self
        q = self.p ** nu
        if (self.te % q).any():
            return None
        return MultiPoly(self.p, self.tv, self.te // q, self.coeffs)

    # -- content / leading data ------------------------------------------

    def monomial_content(self):
        """Per-variable minimum exponent over all terms, as ((var, exp), ...)."""
        n, width = self.tv.shape
        if n == 0 or width == 0:
            return ()
        out = []
        # A shared variable must occur in the first term; each variable occurs
        # at most once per row, so presence-in-every-row is one mask check.
        for v, e in zip(self.tv[0], self.te[0]):
            if v == PAD_VAR:
                break
            mask = self.tv == v
            if mask.any(axis=1).all():
                out.append((int(v), int(self.te[mask].min())))
        return tuple(sorted(out))

    def divide_monomial(self, content):
        if not content:
            return self
        shift = dict(content)
        tv = self.tv
        te = self.te.copy()
        for v, e in shift.items():
            te -= np.where(tv == v, e, 0)
        # Removing exponents may leave (var, 0) pairs; re-normalise rows.
        terms = {}
        for i in range(tv.shape[0]):
            mono = tuple(
                (int(v), int(x))
                for v, x in zip(tv[i], te[i])
                if v != PAD_VAR and x > 0
            )
            terms[mono] = terms.get(mono, 0) + int(self.coeffs[i])
        return MultiPoly.from_terms(terms, self.p)

    def lead_coeff(self):
        """Coefficient of the canonically largest term."""
        if self.is_zero():
            return 0
        return int(self.coeffs[-1])

    def max_var(self):
        real = self.tv[self.tv != PAD_VAR]
        return int(real.max()) if real.size else -1

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if self.is_zero():
            return "0"
        parts = []
        for mono, c in reversed(list(self.terms())):
            factors = []
            if c != 1 or not mono:
                factors.append(str(c))
            for v, e in mono:
                factors.append(f"t{v}" if e == 1 else f"t{v}^{e}")
            parts.append("*".join(factors))
        return " + ".join(parts)

    __repr__ = __str__


_TERM_RE = re.compile(r"^(?:(\d+)\*?)?((?:t\d+(?:\^\d+)?(?:\*t\d+(?:\^\d+)?)*)?)$")


def parse_poly(text, p):
    """Parse the textual format produced by MultiPoly.__str__."""
    text = text.strip()
    if text in ("0", ""):
        return MultiPoly.zero(p)
    terms: dict = {}
    for chunk in text.split("+"):
        chunk = chunk.strip().replace(" ", "")
        neg = False
        while chunk.startswith("-"):
            neg = not neg
            chunk = chunk[1:]
        m = _TERM_RE.match(chunk)
        if not m:
            raise ValueError(f"cannot parse term {chunk!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        if neg:
            coeff = -coeff
        mono = []
        if m.group(2):
            for var in m.group(2).split("*"):
                if "^" in var:
                    name, e = var.split("^")
                    mono.append((int(name[1:]), int(e)))
                else:
                    mono.append((int(var[1:]), 1))
        key = tuple(sorted(mono))
        terms[key] = terms.get(key, 0) + coeff
    return MultiPoly.from_terms(terms, p)


class FieldElem:
    """An element of k = F_p(t0, t1, ...), as a fraction num/den of MultiPoly.

    Equality is by cross-multiplication; the representation is only normalised
    by monomial content and a unit denominator leading coefficient.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalised=False):
        if den is None:
            den = MultiPoly.const(1, num.p)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            num = MultiPoly.zero(num.p)
            den = MultiPoly.const(1, num.p)
        elif not _normalised:
            if not den.is_const():
                # A constant denominator shares no monomial content with num.
                content_n = dict(num.monomial_content())
                content_d = dict(den.monomial_content())
                common = tuple(
                    sorted(
                        (v, min(content_n[v], content_d[v]))
                        for v in content_n
                        if v in content_d
                    )
                )
                if common:
                    num = num.divide_monomial(common)
                    den = den.divide_monomial(common)
            lead = den.lead_coeff()
            if lead != 1:
                unit = inv_mod(lead, num.p)
                num = num.scale(unit)
                den = den.scale(unit)
        self.num = num
        self.den = den

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, p):
        return cls(MultiPoly.zero(p))

    @classmethod
    def one(cls, p):
        return cls(MultiPoly.const(1, p))

    @classmethod
    def const(cls, c, p):
        return cls(MultiPoly.const(c, p))

    @classmethod
    def variable(cls, index, p, exp=1):
        return cls(MultiPoly.variable(index, p, exp))

    # -- basics -----------------------------------------------------------

    @property
    def p(self):
        return self.num.p

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def _den_trivial(self):
        return self.den.is_const()

    def _lift(self, other):
        if isinstance(other, int):
            return FieldElem.const(other, self.p)
        if isinstance(other, FieldElem):
            return other
        return None

    def __eq__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        # a/b == c/d  iff  a*d == c*b, independent of normalisation
        return self.num * other.den == other.num * self.den

    def __hash__(self):
        raise TypeError("FieldElem is unhashable (non-canonical representation)")

    # -- field operations -------------------------------------------------

    def __add__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if self._den_trivial() and other._den_trivial() and self.den == other.den:
            return FieldElem(self.num + other.num, self.den)
        return FieldElem(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return FieldElem(-self.num, self.den, _normalised=True)

    def __sub__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        return FieldElem(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero in k")
        return FieldElem(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def inverse(self):
        return FieldElem.one(self.p) / self

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = FieldElem.one(self.p)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- Frobenius and p-th roots ----------------------------------------

    def frobenius(self, nu):
        if nu == 0:
            return self
        return FieldElem(self.num.frobenius(nu), self.den.frobenius(nu))

    def pth_root(self, nu):
        """y with y**(p**nu) == self, or None if self is not in k^{p^nu}.

        For a fraction u/v the criterion is applied to u * v^(p^nu - 1),
        since u/v = (u v^{q-1}) / v^q.
        """
        if nu == 0 or self.is_zero():
            return self
        q = self.p ** nu
        if self._den_trivial() and self.den.const_value() == 1:
            root = self.num.pth_root(nu)
            if root is None:
                return None
            return FieldElem(root)
        w = self.num * self.den ** (q - 1)
        root = w.pth_root(nu)
        if root is None:
            return None
        return FieldElem(root, self.den)

    # -- printing ---------------------------------------------------------

    def __str__(self):
        if self.den.is_const() and self.den.const_value() == 1:
            return str(self.num)
        return f"{self.num} / {self.den}"

    __repr__ = __str__


def t(index, p):
    """The variable t_index as a FieldElem."""
    return FieldElem.variable(index, p)


def field_arith(x: FieldElem, y: FieldElem, op: str) -> FieldElem:
    """Named dispatch over the four field operations (CLI-facing)."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "div":
        return x / y
    raise ValueError(f"unknown op {op!r}")


def parse_field_elem(text, p):
    """Parse `num / den` (den optional); inverse of FieldElem.__str__."""
    if "/" in text:
        num_text, den_text = text.split("/", 1)
        return FieldElem(parse_poly(num_text, p), parse_poly(den_text, p))
    return FieldElem(parse_poly(text, p))


# ---------------------------------------------------------------------------
# semilinear machinery: p^mu-monomial decomposition and span ranks over k^{p^mu}
# ---------------------------------------------------------------------------

def _decompose_poly(poly: MultiPoly, mu: int):
    """Write poly = sum_r g_r^{p^mu} * t^r over residue monomials r (exps < p^mu).

    Returns a dict mapping residue monomials ((var, exp), ...) to the roots
    g_r as MultiPoly.  Uses that F_p coefficients are their own p-th roots.
    """
    q = poly.p ** mu
    groups: dict[tuple, dict] = {}
    for mono, c in poly.terms():
        residue = tuple((v, e % q) for v, e in mono if e % q)
        quotient = tuple((v, e // q) for v, e in mono if e // q)
        bucket = groups.setdefault(residue, {})
        bucket[quotient] = (bucket.get(quotient, 0) + c) % poly.p
    return {r: MultiPoly.from_terms(b, poly.p) for r, b in groups.items()}


def p_monomial_decomposition(x: FieldElem, mu: int):
    """Decompose x in k as sum_r g_r^{p^mu} t^r with g_r in k.

    Fractions: u/v = (u v^{q-1}) / v^q, so decompose u v^{q-1} and divide
    each root by v.
    """
    q = x.p ** mu
    w = x.num * x.den ** (q - 1)
    return {
        r: FieldElem(g, x.den)
        for r, g in _decompose_poly(w, mu).items()
        if not g.is_zero()
    }


def poly_matrix_rank(rows, p):
    """Rank of a matrix of MultiPoly entries over k.

    Fraction-free Gaussian elimination: row_j <- pivot*row_j - entry*row_i,
    which only needs zero tests (cross-multiplication style), never division.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if not rows[i][col].is_zero():
                if pivot is None or rows[i][col].n_terms < rows[pivot][col].n_terms:
                    pivot = i
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        pv = rows[rank][col]
        for j in range(rank + 1, len(rows)):
            entry = rows[j][col]
            if entry.is_zero():
                continue
            rows[j] = [
                pv * rows[j][c] - entry * rows[rank][c] if c >= col else rows[j][c]
                for c in range(ncols)
            ]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _decomposition_matrix(elems, mu):
    """Common-denominator numerators decomposed over the p^mu basis.

    All elements are scaled by the *same* denominator (multiplication by a
    fixed scalar is k^{p^mu}-linear, so the span rank is unchanged); scaling
    each element individually would not be rank-safe.
    """
    p = elems[0].p
    dens = [e.den for e in elems]
    numerators = []
    for i, e in enumerate(elems):
        u = e.num
        for j, d in enumerate(dens):
            if j != i:
                u = u * d
        numerators.append(u)
    columns: list = []
    col_index: dict = {}
    rows = []
    for u in numerators:
        dec = _decompose_poly(u, mu)
        row = {}
        for r, g in dec.items():
            if g.is_zero():
                continue
            if r not in col_index:
                col_index[r] = len(columns)
                columns.append(r)
            row[col_index[r]] = g
        rows.append(row)
    zero = MultiPoly.zero(p)
    return [[row.get(c, zero) for c in range(len(columns))] for row in rows]


def p_span_rank(elems, mu):
    """Dimension over k^{p^mu} of the span of the given elements of k."""
    if not elems:
        raise ValueError("p_span_rank needs a nonempty list")
    if mu < 1:
        raise ValueError("mu must be >= 1")
    matrix = _decomposition_matrix(list(elems), mu)
    if not matrix or not matrix[0]:
        return 0
    return poly_matrix_rank(matrix, elems[0].p)


def in_p_span(x: FieldElem, gens, mu) -> bool:
    """Is x in the k^{p^mu}-span of gens?  Decided by a rank comparison."""
    gens = [g for g in gens if not g.is_zero()]
    if x.is_zero():
        return True
    if not gens:
        return False
    return p_span_rank(gens, mu) == p_span_rank(gens + [x], mu)


# ---------------------------------------------------------------------------
# dense linear algebra over k (FieldElem entries)
# ---------------------------------------------------------------------------

def nullspace_over_k(rows, ncols, p):
    """Kernel basis of the linear map given by `rows` (each a list of FieldElem).

    Returns a list of coordinate vectors x (length ncols) with M x = 0,
    via reduced row echelon form; k is a field, so pivots divide exactly.
    """
    rows = [list(r) for r in rows if any(not e.is_zero() for e in r)]
    pivots = []
    reduced = []
    for row in rows:
        for pcol, prow in zip(pivots, reduced):
            if not row[pcol].is_zero():
                factor = row[pcol]
                row = [a - factor * b for a, b in zip(row, prow)]
        lead = next((c for c in range(ncols) if not row[c].is_zero()), None)
        if lead is None:
            continue
        inv = row[lead].inverse()
        row = [a * inv for a in row]
        # back-substitute into existing rows
        for i, prow in enumerate(reduced):
            if not prow[lead].is_zero():
                factor = prow[lead]
                reduced[i] = [a - factor * b for a, b in zip(prow, row)]
        pivots.append(lead)
        reduced.append(row)
    zero = FieldElem.zero(p)
    one = FieldElem.one(p)
    basis = []
    pivot_set = set(pivots)
    for free in range(ncols):
        if free in pivot_set:
            continue
        vec = [zero] * ncols
        vec[free] = one
        for pcol, prow in zip(pivots, reduced):
            vec[pcol] = -prow[free]
        basis.append(vec)
    return basis


def rank_over_k(rows, p):
    """Rank of a matrix of FieldElem entries (denominators cleared per row)."""
    cleared = []
    for row in rows:
        den = MultiPoly.const(1, p)
        for e in row:
            den = den * e.den
        cleared.append([e.num * _den_complement(row, i, p) for i, e in enumerate(row)])
    return poly_matrix_rank(cleared, p)


def _den_complement(row, i, p):
    out = MultiPoly.const(1, p)
    for j, e in enumerate(row):
        if j != i:
            out = out * e.den
    return out
