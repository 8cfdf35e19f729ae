"""Microgrid threat/vulnerability risk scoring, registers, and mitigation what-ifs."""

from gridrisk.catalog import Catalog, load_catalog, validate_catalog
from gridrisk.errors import (
    CycleError,
    GridRiskError,
    ParseError,
    RangeError,
    UnknownMitigation,
    UnknownNode,
    ValidationError,
)
from gridrisk.mitigation import (
    MitigationPlan,
    applicable_mitigations,
    classify_5r,
    prioritize_mitigations,
    residual_register,
)
from gridrisk.register import RiskEntry, RiskRegister, assemble_register, diff_registers
from gridrisk.scoring import (
    RiskTriple,
    dread_overall,
    integerize_triple,
    map_dread_to_triple,
    physical_risk_score,
)

__version__ = "0.1.0"

__all__ = [
    "Catalog",
    "CycleError",
    "GridRiskError",
    "MitigationPlan",
    "ParseError",
    "RangeError",
    "RiskEntry",
    "RiskRegister",
    "RiskTriple",
    "UnknownMitigation",
    "UnknownNode",
    "ValidationError",
    "applicable_mitigations",
    "assemble_register",
    "classify_5r",
    "diff_registers",
    "dread_overall",
    "integerize_triple",
    "load_catalog",
    "map_dread_to_triple",
    "physical_risk_score",
    "prioritize_mitigations",
    "residual_register",
    "validate_catalog",
]
