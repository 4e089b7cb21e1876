"""pyshifts - chain recurrence of weighted backward shifts on trees.

Public API for use as a library:

    from pyshifts import (
        VerificationRunner,
        build_comb_scenario,
        OperatorService,
        ConstructionService,
        CertificateService,
        CriterionService,
        SeqVector,
        Line,
        Branch,
    )

The CSV plot generator requires the ``[output]`` extra (pandas).
"""

from pyshifts.config import (
    Scenario,
    ScenarioCatalog,
    VerificationConfig,
    build_classical_scenario,
    build_comb_scenario,
    build_default_catalog,
    build_default_config,
    build_grid_scenario,
)
from pyshifts.domain import (
    Branch,
    ChainRecurrent,
    ClassicalWeights,
    DeltaChain,
    DirectedTree,
    Inconclusive,
    Line,
    LinearOp,
    Lp,
    NotChainRecurrent,
    OpFamily,
    PeriodicTail,
    ProductSeminorms,
    Report,
    ScalarMode,
    SeqVector,
    Sup,
    TruncationParams,
    WeightAssignment,
)
from pyshifts.repositories import (
    InMemoryReportRepository,
    InMemoryScenarioRepository,
    IReportRepository,
    IScenarioRepository,
)
from pyshifts.services import (
    CertificateService,
    ChainSearchService,
    ChainService,
    ConstructionService,
    CriterionService,
    OperatorService,
    TreeBuilderService,
)
from pyshifts.verification_runner import VerificationRunner

__all__ = [
    # Config
    "Scenario",
    "ScenarioCatalog",
    "VerificationConfig",
    "build_classical_scenario",
    "build_comb_scenario",
    "build_default_catalog",
    "build_default_config",
    "build_grid_scenario",
    # Domain
    "Branch",
    "ChainRecurrent",
    "ClassicalWeights",
    "DeltaChain",
    "DirectedTree",
    "Inconclusive",
    "Line",
    "LinearOp",
    "Lp",
    "NotChainRecurrent",
    "OpFamily",
    "PeriodicTail",
    "ProductSeminorms",
    "Report",
    "ScalarMode",
    "SeqVector",
    "Sup",
    "TruncationParams",
    "WeightAssignment",
    # Services
    "CertificateService",
    "ChainSearchService",
    "ChainService",
    "ConstructionService",
    "CriterionService",
    "OperatorService",
    "TreeBuilderService",
    "VerificationRunner",
    # Repository interfaces
    "IReportRepository",
    "IScenarioRepository",
    # In-memory implementations
    "InMemoryReportRepository",
    "InMemoryScenarioRepository",
]
