"""Verification scenarios: self-contained theorem checks with JSON reports.

Each scenario builds a configuration (model ring, adjunction towers, streams),
runs exact precision-qualified checks, and reports pass/fail/unknown per
check.  Reports are deterministic for a fixed seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field

from .field_tower import (
    FieldElem,
    MultiPoly,
    check_prime,
    parse_field_elem,
    parse_poly,
)
from .insep_algebra import (
    BaseField,
    InvariantTriple,
    Tower,
    adjoin,
    completion,
    invariants,
    reduction_of_completion,
    tensor_square_reduced_check,
)
from .model_ring import (
    Frob,
    ModelRing,
    NagataStream,
    Polynomial,
    ScalarMul,
    StreamElem,
    in_model,
    nagata_stream,
    verify_verdict,
    witness_chain,
)
from .pradical import RPolynomial, detect_purely_inseparable, height, filtration_member, radical_from_equation
from .series import Series, parse_series


class UnknownScenario(Exception):
    pass


class ParamOutOfRange(Exception):
    pass


SCENARIO_NAMES = ("invariants", "reduction", "tensor", "chain", "closure", "roundtrips")


@dataclass
class ScenarioParams:
    p: int = 2
    mu: int = 1
    nu: int = 1
    precision: int = 64
    depth: int = 3
    seed: int = 42

    def validate(self):
        try:
            check_prime(self.p)
        except ValueError as exc:
            raise ParamOutOfRange(str(exc)) from None
        if self.mu < 1:
            raise ParamOutOfRange("mu must be >= 1")
        if not 1 <= self.nu <= 6:
            raise ParamOutOfRange("nu must be in [1, 6]")
        if self.depth < 1:
            raise ParamOutOfRange("depth must be >= 1")
        if self.precision < self.p ** self.nu * 16:
            raise ParamOutOfRange(
                f"precision {self.precision} < {self.p ** self.nu * 16} "
                f"(need 16 coefficients past the p^nu scaling)"
            )

    def to_dict(self):
        return {
            "p": self.p,
            "mu": self.mu,
            "nu": self.nu,
            "precision": self.precision,
            "depth": self.depth,
            "seed": self.seed,
        }


@dataclass
class CheckResult:
    name: str
    status: str  # "pass" | "fail" | "unknown"
    witness: str = ""


@dataclass
class Report:
    scenario: str
    params: ScenarioParams
    checks: list = field(default_factory=list)
    runtime_ms: int = 0

    def add(self, name, ok, witness=""):
        if ok is True:
            status = "pass"
        elif ok is False:
            status = "fail"
        else:
            status = "unknown"
        self.checks.append(CheckResult(name, status, witness))

    @property
    def overall(self):
        if any(c.status == "fail" for c in self.checks):
            return "fail"
        if any(c.status == "unknown" for c in self.checks):
            return "unknown"
        return "pass"

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "params": self.params.to_dict(),
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness}
                for c in self.checks
            ],
            "runtime_ms": self.runtime_ms,
        }


# ---------------------------------------------------------------------------
# seeded generators
# ---------------------------------------------------------------------------

def random_field_elem(rng, p, nterms=4, nvars=8):
    """Sparse random element of k: <= nterms terms, exponents < p^2."""
    terms = {}
    for _ in range(rng.randrange(1, nterms + 1)):
        mono = tuple(
            sorted(
                (rng.randrange(nvars), rng.randrange(1, p * p))
                for _ in range(rng.randrange(0, 3))
            )
        )
        mono = tuple(dict(mono).items())
        terms[mono] = terms.get(mono, 0) + rng.randrange(1, p)
    return FieldElem(MultiPoly.from_terms(terms, p))


def random_series(rng, p, precision, nonzero=4):
    coeffs = [FieldElem.zero(p)] * precision
    for _ in range(nonzero):
        coeffs[rng.randrange(precision)] = FieldElem.variable(rng.randrange(6), p)
    return Series(coeffs, p=p, precision=precision)


def random_unit_series(rng, p, precision):
    """A sparse unit whose inverse stays cheap to compute."""
    coeffs = [FieldElem.zero(p)] * precision
    coeffs[0] = FieldElem.variable(rng.randrange(6), p)
    for _ in range(2):
        idx = rng.randrange(1, precision)
        coeffs[idx] = FieldElem.const(rng.randrange(1, p), p)
    return Series(coeffs, p=p, precision=precision)


def _chain_tower(ring: ModelRing, s: int, j: int, nu: int) -> Tower:
    """Stage-nu adjunction over R_mu along the witness chain.

    The adjoined root is w^{p^(mu-nu)} for w = w_{s+j}: its p^nu-th power
    w^{p^mu} is decided inside R_mu, and the root has height exactly nu.
    """
    w = witness_chain(ring, s, j)
    root = Frob(ring.mu - nu, w) if ring.mu > nu else w
    return adjoin(ring, Frob(ring.mu, w), nu, root=root)


# ---------------------------------------------------------------------------
# subalgebra membership
# ---------------------------------------------------------------------------

def subalgebra_membership(x: StreamElem, A: Tower, precision=None) -> str:
    """Is x in the subring R + R b + ... + R b^{q-1} of k[[T]]?

    Yes answers come from explicit coefficient witnesses (x decided inside R,
    or the chain recurrence x = P + T^d b).  No answers are certified: when
    b = P + T^d x, the unique Frac(R)-representation of x over the basis
    1, b, ..., b^{q-1} has the pole coefficient T^{-d}, and the basis really
    is independent over Frac(R) because b has full height (R is the
    intersection of k[[T]] with Frac(R), so height in R equals height in the
    fraction field).  Everything else is Unknown.
    """
    base = A.base
    if not isinstance(base, ModelRing) or len(A.stages) != 1:
        raise TypeError("membership needs a single-stage tower over a model ring")
    stage = A.stages[0]
    b = stage.root
    p = base.p
    N = precision if precision is not None else base.precision
    if x == b:
        return "yes"
    if in_model(x, base).status == "yes":
        return "yes"
    if isinstance(x, NagataStream) and isinstance(b, NagataStream):
        sx, sb = x.start, b.start
        if sx < sb:
            d = sb - sx
            head = [FieldElem.variable(sx + i, p) for i in range(d)]
            shifted = Series(
                [FieldElem.zero(p)] * d + list(b.eval(p, N).coeffs[: N - d]),
                p=p,
                precision=N,
            )
            witness = Series(head, p=p, precision=N) + shifted
            return "yes" if witness == x.eval(p, N) else "unknown"
        if sx > sb:
            d = sx - sb
            head = [FieldElem.variable(sb + i, p) for i in range(d)]
            shifted = Series(
                [FieldElem.zero(p)] * d + list(x.eval(p, N).coeffs[: N - d]),
                p=p,
                precision=N,
            )
            laurent_ok = Series(head, p=p, precision=N) + shifted == b.eval(p, N)
            h = height(b, base, bound=max(stage.nu, 1))
            independent = h.status == "finite" and h.nu == stage.nu
            if laurent_ok and independent:
                return "no"
            return "unknown"
    return "unknown"


# ---------------------------------------------------------------------------
# the scenarios
# ---------------------------------------------------------------------------

def _scenario_invariants(params, report):
    ring = ModelRing(params.p, params.mu, params.precision)
    expected = InvariantTriple(params.p ** params.nu, 1, params.p ** params.nu)
    for j in range(params.depth):
        A = _chain_tower(ring, 0, j, params.nu)
        triple = invariants(A)
        report.add(
            f"invariants_w{j}",
            triple == expected,
            f"(e,f,n)=({triple.e},{triple.f},{triple.n})",
        )
        hatA = completion(A)
        hat_triple = invariants(hatA)
        report.add(
            f"completion_invariance_w{j}",
            hat_triple == triple,
            f"completed (e,f,n)=({hat_triple.e},{hat_triple.f},{hat_triple.n})",
        )
    # a nested tower, for n = e*f beyond single adjunctions
    nested = adjoin(
        _chain_tower(ring, 0, 0, params.nu),
        Frob(params.nu, nagata_stream(60)),
        params.nu,
        root=nagata_stream(60),
    )
    triple = invariants(nested)
    q2 = params.p ** (2 * params.nu)
    report.add(
        "invariants_nested",
        triple == InvariantTriple(q2, 1, q2),
        f"(e,f,n)=({triple.e},{triple.f},{triple.n})",
    )


def _scenario_reduction(params, report):
    ring = ModelRing(params.p, params.mu, params.precision)
    for j in range(params.depth):
        A = _chain_tower(ring, 0, j, params.nu)
        result = reduction_of_completion(completion(A), seed=params.seed)
        for name, ok in result.checks:
            report.add(f"w{j}.{name}", ok)


def _random_insep_tower(rng, p, mu, max_total_nu=2):
    """A random purely inseparable tower over k^{p^mu} of rank <= p^max_total."""
    shapes = [[1], [2], [1, 1]]
    nus = shapes[rng.randrange(len(shapes))]
    if sum(nus) > max_total_nu:
        nus = [1]
    base = BaseField(p, mu)
    tower = Tower(base)
    for i, nu in enumerate(nus):
        alpha = FieldElem.variable(10 + i, p) + random_field_elem(rng, p, nterms=2)
        a = alpha.frobenius(mu)
        tower = adjoin(tower, a, nu, root=alpha.frobenius(0) if mu == 0 else None)
    return tower


def _scenario_tensor(params, report, count=5):
    rng = random.Random(params.seed)
    for i in range(count):
        C = _random_insep_tower(rng, params.p, params.mu)
        result = tensor_square_reduced_check(C, rng=rng)
        report.add(
            f"tensor_square_{i}",
            result.passed,
            f"n={result.n} dim={result.dim} nil={result.nil_dim}",
        )


def _scenario_chain(params, report):
    ring = ModelRing(params.p, params.mu, params.precision)
    p = params.p
    N = params.precision
    for j in range(params.depth):
        w_next = witness_chain(ring, 0, j + 1)
        # monic degree-p^mu integral equation for w_{j+1} over R
        a = Frob(params.mu, w_next)
        integral = a.eval(p, N) == w_next.eval(p, N).frobenius(params.mu)
        decided = in_model(a, ring).status == "yes"
        report.add(
            f"integral_equation_w{j + 1}",
            integral and decided,
            f"Z^{p ** params.mu} = w_{j + 1}^{p ** params.mu}, constant verdict yes",
        )
        A = _chain_tower(ring, 0, j, params.mu)
        report.add(
            f"chain_ascends_w{j + 1}_not_in_R[w{j}]",
            {"yes": False, "no": True, "unknown": None}[
                subalgebra_membership(w_next, A, N)
            ],
        )
        report.add(
            f"chain_contains_w{j}",
            subalgebra_membership(witness_chain(ring, 0, j), A, N) == "yes",
        )
        result = reduction_of_completion(completion(A), seed=params.seed)
        nil_nonzero = all(
            ok for name, ok in result.checks if name.startswith("nilpotency")
        )
        report.add(f"nonreduced_completion_w{j}", nil_nonzero)


def _scenario_closure(params, report):
    ring = ModelRing(params.p, params.mu, params.precision)
    z = nagata_stream(0)
    h = height(z, ring, bound=4)
    report.add(
        "height_of_z",
        h.status == "finite" and h.nu == params.mu,
        f"height={h}",
    )
    statuses = [filtration_member(z, n, ring) for n in range(params.mu + 2)]
    monotone = all(
        s == ("no" if n < params.mu else "yes") for n, s in enumerate(statuses)
    )
    report.add("filtration_threshold", monotone, f"B_n membership: {statuses}")
    if params.mu >= 2:
        h_frob = height(Frob(1, z), ring, bound=4)
        report.add(
            "frobenius_lowers_height",
            h_frob.status == "finite" and h_frob.nu == params.mu - 1,
            f"height(z^p)={h_frob}",
        )
    # the purely inseparable equation X^{p^nu} - z^{p^nu} and its closure element
    nu = min(params.nu, params.mu)
    q = params.p ** nu
    zero = Polynomial([])
    one = Polynomial([FieldElem.one(params.p)])
    minus_a = ScalarMul(FieldElem.const(-1, params.p), Frob(nu, z))
    f = RPolynomial([minus_a] + [zero] * (q - 1) + [one], params.p)
    det = detect_purely_inseparable(f)
    report.add(
        "equation_purely_inseparable",
        det.status == "purely_inseparable" and (det.nu, det.m) == (nu, 1),
        f"(nu,m)=({det.nu},{det.m})",
    )
    result = radical_from_equation(f, z, ring)
    report.add(
        "closure_element_confirmed",
        result.status == "confirmed" and result.nu == nu,
        f"status={result.status}",
    )


def _scenario_roundtrips(params, report, count=60):
    rng = random.Random(params.seed)
    p = params.p
    N = min(params.precision, 64)
    ok_field = ok_series = ok_invert = ok_parse = True
    for _ in range(count):
        x = random_field_elem(rng, p) / (
            FieldElem.one(p) + FieldElem.variable(rng.randrange(8), p)
        )
        nu = rng.randrange(1, 3)
        if x.frobenius(nu).pth_root(nu) != x:
            ok_field = False
        if parse_field_elem(str(x), p) != x:
            ok_parse = False
        s = random_series(rng, p, N)
        root = s.frobenius(nu).pth_root(nu)
        if root is None or root != s.truncate(root.precision):
            ok_series = False
        if parse_series(str(s), p) != s:
            ok_parse = False
        u = random_unit_series(rng, p, N)
        if u * u.invert() != Series.one(p, N):
            ok_invert = False
    report.add("field_root_roundtrips", ok_field, f"{count} seeded elements")
    report.add("series_root_roundtrips", ok_series, f"{count} seeded series")
    report.add("series_inversions", ok_invert, f"{count} seeded units")
    report.add("parse_print_roundtrips", ok_parse)


_SCENARIOS = {
    "invariants": _scenario_invariants,
    "reduction": _scenario_reduction,
    "tensor": _scenario_tensor,
    "chain": _scenario_chain,
    "closure": _scenario_closure,
    "roundtrips": _scenario_roundtrips,
}


def run_scenario(name: str, params: ScenarioParams) -> Report:
    if name not in _SCENARIOS:
        raise UnknownScenario(f"unknown scenario {name!r}; choose from {SCENARIO_NAMES}")
    params.validate()
    report = Report(scenario=name, params=params)
    start = time.monotonic()
    _SCENARIOS[name](params, report)
    report.runtime_ms = int((time.monotonic() - start) * 1000)
    return report
