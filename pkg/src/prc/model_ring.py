"""Nagata model rings R_mu = k^{p^mu}[[T]] (x)_{k^{p^mu}} k inside k[[T]].

Elements of the completion are given by rules (lazy coefficient streams).
Membership in R_mu is the statement that the k^{p^mu}-span of the coefficient
sequence is finite-dimensional; that is undecidable for arbitrary streams, so
the oracle is three-valued and *sound*: a Yes carries a finite generating set
of the coefficient span, a No carries rank evidence (p_span_rank of the first
m coefficients equals m for each configured threshold) together with the
structural tail argument, and anything outside the certified rule classes is
Unknown.  Products are tail-opaque and never decided No.

The classical generator z = t0 + t1 T + t2 T^2 + ... is NagataStream(0):
z is not in R_1 but z^p is.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

from .field_tower import (
    FieldElem,
    check_prime,
    p_span_rank,
    parse_field_elem,
    in_p_span,
)
from .series import Series


@dataclass(frozen=True)
class ModelRing:
    p: int
    mu: int
    precision: int = 64
    rank_thresholds: tuple = (8, 16, 32)

    def __post_init__(self):
        check_prime(self.p)
        if self.mu < 1:
            raise ValueError("mu must be >= 1")

    def __str__(self):
        return f"R_{self.mu}(p={self.p})"


class StreamElem:
    """A rule-defined element of k[[T]].

    Evaluation is deterministic and consistent under refinement; the cache
    stores the widest evaluation seen so far (write-once per precision under
    the lock, so concurrent evaluation is safe).
    """

    kind = "abstract"

    def __init__(self):
        self._cache = None
        self._lock = threading.Lock()

    def eval(self, p, precision) -> Series:
        with self._lock:
            cached = self._cache
        if cached is not None and cached.p == p and cached.precision >= precision:
            return cached.truncate(precision)
        result = self._eval(p, precision)
        with self._lock:
            if self._cache is None or self._cache.precision < precision:
                self._cache = result
        return result

    def _eval(self, p, precision):
        raise NotImplementedError

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        return isinstance(other, StreamElem) and self._key() == other._key()

    def __hash__(self):
        raise TypeError("StreamElem is unhashable")


class Polynomial(StreamElem):
    kind = "polynomial"

    def __init__(self, coeffs):
        super().__init__()
        self.coeffs = tuple(coeffs)

    def _eval(self, p, precision):
        return Series(list(self.coeffs), p=p, precision=precision)

    def _key(self):
        return ("polynomial", tuple(str(c) for c in self.coeffs))

    def __repr__(self):
        return f"Polynomial([{', '.join(str(c) for c in self.coeffs)}])"


class NagataStream(StreamElem):
    kind = "nagata"

    def __init__(self, start):
        super().__init__()
        if start < 0:
            raise ValueError("start index must be >= 0")
        self.start = start

    def _eval(self, p, precision):
        return Series(
            [FieldElem.variable(self.start + i, p) for i in range(precision)],
            p=p,
            precision=precision,
        )

    def _key(self):
        return ("nagata", self.start)

    def __repr__(self):
        return f"NagataStream({self.start})"


class Frob(StreamElem):
    kind = "frob"

    def __init__(self, nu, inner):
        super().__init__()
        if nu < 0:
            raise ValueError("nu must be >= 0")
        self.nu = nu
        self.inner = inner

    def _eval(self, p, precision):
        return self.inner.eval(p, precision).frobenius(self.nu)

    def _key(self):
        return ("frob", self.nu, self.inner._key())

    def __repr__(self):
        return f"Frob({self.nu}, {self.inner!r})"


class ScalarMul(StreamElem):
    kind = "scalarmul"

    def __init__(self, scalar: FieldElem, inner):
        super().__init__()
        self.scalar = scalar
        self.inner = inner

    def _eval(self, p, precision):
        return self.inner.eval(p, precision).scale(self.scalar)

    def _key(self):
        return ("scalarmul", str(self.scalar), self.inner._key())

    def __repr__(self):
        return f"ScalarMul({self.scalar}, {self.inner!r})"


class Sum(StreamElem):
    kind = "sum"

    def __init__(self, parts):
        super().__init__()
        self.parts = tuple(parts)
        if not self.parts:
            raise ValueError("empty sum")

    def _eval(self, p, precision):
        acc = self.parts[0].eval(p, precision)
        for part in self.parts[1:]:
            acc = acc + part.eval(p, precision)
        return acc

    def _key(self):
        return ("sum", tuple(part._key() for part in self.parts))

    def __repr__(self):
        return f"Sum([{', '.join(repr(part) for part in self.parts)}])"


class Product(StreamElem):
    """Tail-opaque: products of certified streams leave the decided class."""

    kind = "product"

    def __init__(self, factors):
        super().__init__()
        self.factors = tuple(factors)
        if not self.factors:
            raise ValueError("empty product")

    def _eval(self, p, precision):
        acc = self.factors[0].eval(p, precision)
        for factor in self.factors[1:]:
            acc = acc * factor.eval(p, precision)
        return acc

    def _key(self):
        return ("product", tuple(f._key() for f in self.factors))

    def __repr__(self):
        return f"Product([{', '.join(repr(f) for f in self.factors)}])"


def nagata_stream(start=0) -> StreamElem:
    """w_start: coefficient of T^i is the fresh variable t_{start+i}."""
    return NagataStream(start)


def witness_chain(ring: ModelRing, start: int, j: int) -> StreamElem:
    """w_j in the ascending chain: satisfies w_j = t_{start+j} + T * w_{j+1}."""
    return NagataStream(start + j)


# ---------------------------------------------------------------------------
# membership oracle
# ---------------------------------------------------------------------------

@dataclass
class MembershipVerdict:
    status: str  # "yes" | "no" | "unknown"
    witness_gens: list = field(default_factory=list)  # Yes: generators of the span
    rank_evidence: list = field(default_factory=list)  # No: [(m, rank), ...]
    note: str = ""

    @property
    def decided(self):
        return self.status in ("yes", "no")

    def __str__(self):
        return f"{self.status}({self.note})" if self.note else self.status


class _Yes:
    def __init__(self, gens):
        self.gens = gens


class _Nagata:
    """lam * Frob(nu_total, NagataStream(start)) + (certified-Yes perturbation)."""

    def __init__(self, nu_total, lam, start, pert):
        self.nu_total = nu_total
        self.lam = lam
        self.start = start
        self.pert = pert


_OPAQUE = object()


def _analyze(rule: StreamElem, p: int):
    if isinstance(rule, Polynomial):
        return _Yes([c for c in rule.coeffs if not c.is_zero()])
    if isinstance(rule, NagataStream):
        return _Nagata(0, FieldElem.one(p), rule.start, [])
    if isinstance(rule, Frob):
        if rule.nu == 0:
            return _analyze(rule.inner, p)
        sub = _analyze(rule.inner, p)
        if isinstance(sub, _Yes):
            return _Yes([g.frobenius(rule.nu) for g in sub.gens])
        if isinstance(sub, _Nagata):
            return _Nagata(
                sub.nu_total + rule.nu,
                sub.lam.frobenius(rule.nu),
                sub.start,
                [g.frobenius(rule.nu) for g in sub.pert],
            )
        return _FrobOpaque(rule.nu)
    if isinstance(rule, ScalarMul):
        if rule.scalar.is_zero():
            return _Yes([])
        sub = _analyze(rule.inner, p)
        if isinstance(sub, _Yes):
            return _Yes([rule.scalar * g for g in sub.gens])
        if isinstance(sub, _Nagata):
            return _Nagata(
                sub.nu_total,
                rule.scalar * sub.lam,
                sub.start,
                [rule.scalar * g for g in sub.pert],
            )
        return _OPAQUE
    if isinstance(rule, Sum):
        gens = []
        nagata = None
        for part in rule.parts:
            sub = _analyze(part, p)
            if isinstance(sub, _Yes):
                gens.extend(sub.gens)
            elif isinstance(sub, _Nagata):
                if nagata is not None:
                    return _OPAQUE  # two wild tails may cancel; stay sound
                nagata = sub
            else:
                return _OPAQUE
        if nagata is None:
            return _Yes(gens)
        return _Nagata(nagata.nu_total, nagata.lam, nagata.start, nagata.pert + gens)
    if isinstance(rule, Product):
        return _OPAQUE
    raise TypeError(f"unknown rule {rule!r}")


class _FrobOpaque:
    """Frobenius of an opaque rule: still Yes once the depth reaches mu."""

    def __init__(self, nu):
        self.nu = nu


def in_model(rule: StreamElem, ring: ModelRing) -> MembershipVerdict:
    """Sound three-valued membership of a stream in R_mu."""
    p, mu = ring.p, ring.mu
    analysis = _analyze(rule, p)
    if isinstance(analysis, _Yes):
        return MembershipVerdict("yes", witness_gens=_dedupe(analysis.gens))
    if isinstance(analysis, _FrobOpaque):
        if analysis.nu >= mu:
            # every coefficient is a p^nu-th power, hence lies in k^{p^mu}
            return MembershipVerdict(
                "yes", witness_gens=[FieldElem.one(p)], note=f"frob depth {analysis.nu} >= mu"
            )
        return MembershipVerdict("unknown", note="opaque under shallow Frobenius")
    if analysis is _OPAQUE:
        return MembershipVerdict("unknown", note="rule outside the certified classes")
    # Nagata tail
    if analysis.nu_total >= mu:
        gens = _dedupe(analysis.pert + [analysis.lam])
        return MembershipVerdict(
            "yes", witness_gens=gens, note=f"nagata tail at frob depth {analysis.nu_total} >= mu"
        )
    # Structural No candidate: scaled Frobenius twist of a Nagata stream (depth
    # < mu) plus a finitely generated perturbation.  Certify with rank growth
    # along the live tail coefficients (stride p^depth; the rest vanish).
    evidence = []
    stride = p ** analysis.nu_total
    max_m = max(ring.rank_thresholds)
    coeffs = rule.eval(p, stride * (max_m - 1) + 1).coeffs
    for m in ring.rank_thresholds:
        rank = p_span_rank([coeffs[stride * i] for i in range(m)], mu)
        evidence.append((m, rank))
        if rank != m:
            return MembershipVerdict(
                "unknown",
                rank_evidence=evidence,
                note="structural tail argument not confirmed by rank growth",
            )
    return MembershipVerdict(
        "no",
        rank_evidence=evidence,
        note=(
            f"nagata tail at frob depth {analysis.nu_total} < mu={mu}; "
            f"coefficient span rank grows without bound"
        ),
    )


def _dedupe(gens):
    out = []
    for g in gens:
        if g.is_zero():
            continue
        if any(g == h for h in out):
            continue
        out.append(g)
    return out


def verify_verdict(rule: StreamElem, ring: ModelRing, verdict: MembershipVerdict, precision=None) -> bool:
    """Machine-check a decided verdict against its own witness.

    Yes: every coefficient up to the working precision lies in the
    k^{p^mu}-span of the witness generators.  No: recompute the rank
    evidence.  Unknown verdicts carry nothing to check.
    """
    if precision is None:
        precision = ring.precision
    if verdict.status == "yes":
        coeffs = rule.eval(ring.p, precision).coeffs
        return all(in_p_span(c, verdict.witness_gens, ring.mu) for c in coeffs)
    if verdict.status == "no":
        analysis = _analyze(rule, ring.p)
        if not isinstance(analysis, _Nagata):
            return False
        stride = ring.p ** analysis.nu_total
        max_m = max(m for m, _ in verdict.rank_evidence)
        coeffs = rule.eval(ring.p, stride * (max_m - 1) + 1).coeffs
        return all(
            p_span_rank([coeffs[stride * i] for i in range(m)], ring.mu) == rank == m
            for m, rank in verdict.rank_evidence
        )
    return True


# ---------------------------------------------------------------------------
# rule (de)serialization
# ---------------------------------------------------------------------------

def rule_to_json(rule: StreamElem) -> dict:
    if isinstance(rule, Polynomial):
        return {"rule": "polynomial", "coeffs": [str(c) for c in rule.coeffs]}
    if isinstance(rule, NagataStream):
        return {"rule": "nagata", "s": rule.start}
    if isinstance(rule, Frob):
        return {"rule": "frob", "nu": rule.nu, "inner": rule_to_json(rule.inner)}
    if isinstance(rule, ScalarMul):
        return {"rule": "scalarmul", "scalar": str(rule.scalar), "inner": rule_to_json(rule.inner)}
    if isinstance(rule, Sum):
        return {"rule": "sum", "parts": [rule_to_json(part) for part in rule.parts]}
    if isinstance(rule, Product):
        return {"rule": "product", "factors": [rule_to_json(f) for f in rule.factors]}
    raise TypeError(f"unknown rule {rule!r}")


def rule_from_json(data, p) -> StreamElem:
    if isinstance(data, str):
        data = json.loads(data)
    kind = data["rule"]
    if kind == "polynomial":
        return Polynomial([parse_field_elem(c, p) for c in data["coeffs"]])
    if kind == "nagata":
        return NagataStream(int(data["s"]))
    if kind == "frob":
        return Frob(int(data["nu"]), rule_from_json(data["inner"], p))
    if kind == "scalarmul":
        return ScalarMul(parse_field_elem(data["scalar"], p), rule_from_json(data["inner"], p))
    if kind == "sum":
        return Sum([rule_from_json(part, p) for part in data["parts"]])
    if kind == "product":
        return Product([rule_from_json(f, p) for f in data["factors"]])
    raise ValueError(f"unknown rule kind {kind!r}")
