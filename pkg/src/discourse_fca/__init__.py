"""Structural discourse diagnostics with formal concept analysis and association rules."""

from .concepts import (
    FormalConcept,
    GridRow,
    IcebergParams,
    concept_count_grid,
    covering_edges,
    enumerate_concepts,
    iceberg_filter,
)
from .context import (
    AttributeId,
    FormalContext,
    ObjectId,
    closure_attrs,
    derive_attrs,
    derive_objects,
    is_concept,
)
from .rules import (
    AssociationRule,
    RuleThresholds,
    attribute_participation,
    mine_rules,
    robustness_grid,
    rule_metrics,
    rule_summary,
)

__version__ = "0.1.0"

__all__ = [
    "AssociationRule",
    "AttributeId",
    "FormalConcept",
    "FormalContext",
    "GridRow",
    "IcebergParams",
    "ObjectId",
    "RuleThresholds",
    "attribute_participation",
    "closure_attrs",
    "concept_count_grid",
    "covering_edges",
    "derive_attrs",
    "derive_objects",
    "enumerate_concepts",
    "iceberg_filter",
    "is_concept",
    "mine_rules",
    "robustness_grid",
    "rule_metrics",
    "rule_summary",
]
