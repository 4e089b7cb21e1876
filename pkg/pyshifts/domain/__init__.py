"""Domain layer: immutable value objects for sequence spaces, trees and operators.

Nothing in this package performs I/O; the services build on these types.
"""

from .chain import (
    ChainValidation,
    DeltaChain,
    PerturbationSeq,
    SearchResult,
    chain_from_json,
)
from .errors import (
    EndpointMismatchError,
    InvalidNormSpecError,
    InvalidTreeError,
    LeakageOutOfWindowError,
    MissingWeightError,
    NonUniqueInfluenceError,
    NotApplicableError,
    ScalarModeError,
    ScenarioError,
    TruncationError,
    WeightConditionError,
    ZeroWeightError,
)
from .linear_op import LinearOp, OpFamily, OperatorDescriptor
from .norms import (
    FnormValue,
    Lp,
    NormSpec,
    ProductSeminorms,
    SeminormFamily,
    Sup,
    breadth_first_exhaustion,
    chunked_exhaustion,
    family_fnorm,
    fnorm,
    norm,
    norm_spec_from_json,
    norm_spec_to_json,
    seminorm_family,
)
from .recipe import ChainRecipe, Direction, RecipeKind
from .report import SCHEMA_VERSION, Report
from .scalars import GaussianRational, Real, Scalar, ScalarMode, to_scalar
from .seq_vector import SeqVector, axpy, linear_combination
from .tree import DirectedTree, TruncationParams, tree_from_json
from .verdict import (
    ChainRecurrent,
    Inconclusive,
    InfluencePath,
    NotChainRecurrent,
    Verdict,
    VerdictKind,
    ZeroWeightReport,
)
from .vertex import Branch, Line, VertexId, parse_vertex
from .weights import (
    ClassicalWeights,
    ClauseStatus,
    GridWeights,
    PeriodicTail,
    SeriesEvaluation,
    WeightAssignment,
)

__all__ = [
    "Branch",
    "ChainRecipe",
    "ChainRecurrent",
    "ChainValidation",
    "ClassicalWeights",
    "ClauseStatus",
    "DeltaChain",
    "Direction",
    "DirectedTree",
    "EndpointMismatchError",
    "FnormValue",
    "GaussianRational",
    "GridWeights",
    "Inconclusive",
    "InfluencePath",
    "InvalidNormSpecError",
    "InvalidTreeError",
    "LeakageOutOfWindowError",
    "Line",
    "LinearOp",
    "Lp",
    "MissingWeightError",
    "NonUniqueInfluenceError",
    "NormSpec",
    "NotApplicableError",
    "NotChainRecurrent",
    "OpFamily",
    "OperatorDescriptor",
    "PeriodicTail",
    "PerturbationSeq",
    "ProductSeminorms",
    "Real",
    "RecipeKind",
    "Report",
    "SCHEMA_VERSION",
    "Scalar",
    "ScalarMode",
    "ScalarModeError",
    "ScenarioError",
    "SearchResult",
    "SeminormFamily",
    "SeqVector",
    "SeriesEvaluation",
    "Sup",
    "TruncationError",
    "TruncationParams",
    "Verdict",
    "VerdictKind",
    "VertexId",
    "WeightAssignment",
    "WeightConditionError",
    "ZeroWeightError",
    "ZeroWeightReport",
    "axpy",
    "breadth_first_exhaustion",
    "chain_from_json",
    "chunked_exhaustion",
    "family_fnorm",
    "fnorm",
    "linear_combination",
    "norm",
    "norm_spec_from_json",
    "norm_spec_to_json",
    "parse_vertex",
    "seminorm_family",
    "to_scalar",
    "tree_from_json",
]
