"""Service layer containing the mathematics.

Each service owns one concern (trees, operators, chains, constructions,
certificates, the series criterion, randomized search) and receives its
collaborators and configuration through ``__init__``.
"""

from .certificate_service import CertificateService
from .chain_search_service import ChainSearchService
from .chain_service import ChainService
from .construction_service import ConstructionService
from .criterion_service import CriterionService
from .operator_service import OperatorService
from .tree_builder_service import TreeBuilderService

__all__ = [
    "CertificateService",
    "ChainSearchService",
    "ChainService",
    "ConstructionService",
    "CriterionService",
    "OperatorService",
    "TreeBuilderService",
]
