"""Exact computer-algebra kernel for p-radical closures of characteristic-p
model rings: arithmetic in k = F_p(t_0, t_1, ...), truncated series over k,
Nagata model rings with a sound membership oracle, purely inseparable
adjunction towers, and a scenario-based verification harness.
"""

from ._kernels import BACKEND
from .field_tower import (
    FieldElem,
    MultiPoly,
    PrimeFieldElem,
    field_arith,
    p_span_rank,
    parse_field_elem,
    t,
)
from .series import NotAUnit, PRECISION_EXCEEDED, Series, parse_series, series_arith
from .model_ring import (
    Frob,
    MembershipVerdict,
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
from .insep_algebra import (
    ArtinianAlgebra,
    BaseField,
    InvariantTriple,
    SeriesRing,
    Tower,
    adjoin,
    completion,
    invariants,
    nilradical,
    reduction_of_completion,
    special_fiber,
    tensor_square_reduced_check,
)
from .pradical import (
    HeightResult,
    RPolynomial,
    detect_purely_inseparable,
    filtration_member,
    height,
    radical_from_equation,
)
from .scenarios import Report, ScenarioParams, run_scenario, subalgebra_membership

__version__ = "0.1.0"
