"""Multi-attribute network cascade logic: programs over labeled graphs,
interval-annotated atoms, and fixed-point model computation."""

from __future__ import annotations

from .bounds import EMPTY, FULL, Bound, hull, intersect, is_empty, is_subset
from .diagnostics import Diagnostic, DiagnosticError, SourceSpan
from .dsl import (
    export_timeline,
    format_program,
    import_timeline,
    load_network,
    load_program_files,
    parse_fact,
    parse_program,
)
from .engine import (
    CONSISTENT,
    INCONSISTENT,
    EngineResult,
    EngineStats,
    InconsistentProgramError,
    canon_proc,
    canonical_run_bound,
    check_consistency,
    entails,
    fb,
    gamma,
    gamma_star,
    gamma_star_naive,
    ib,
    iteration_bound,
    minimal_model,
    rb,
)
from .influence import InfluenceSpec, builtin_influence, register_influence
from .model import (
    TRUE,
    And,
    Atom,
    Fact,
    IntegrityConstraint,
    LabelRegistry,
    NeighborCriterion,
    Network,
    Not,
    Or,
    Program,
    Rule,
    validate,
)
from .semantics import (
    Interpretation,
    bound_of,
    eligible,
    equivalent,
    is_canonical_model,
    is_model,
    leq,
    program_tts,
    qualifying,
    rule_tts,
    satisfies_fact,
    satisfies_ic,
    satisfies_rule,
    strictly_satisfies_fact,
    world_satisfies,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "Atom",
    "Bound",
    "bound_of",
    "builtin_influence",
    "canon_proc",
    "canonical_run_bound",
    "check_consistency",
    "CONSISTENT",
    "Diagnostic",
    "DiagnosticError",
    "eligible",
    "EMPTY",
    "EngineResult",
    "EngineStats",
    "entails",
    "equivalent",
    "export_timeline",
    "Fact",
    "fb",
    "format_program",
    "FULL",
    "gamma",
    "gamma_star",
    "gamma_star_naive",
    "hull",
    "ib",
    "import_timeline",
    "INCONSISTENT",
    "InconsistentProgramError",
    "InfluenceSpec",
    "IntegrityConstraint",
    "Interpretation",
    "intersect",
    "is_canonical_model",
    "is_empty",
    "is_model",
    "is_subset",
    "iteration_bound",
    "LabelRegistry",
    "leq",
    "load_network",
    "load_program_files",
    "minimal_model",
    "NeighborCriterion",
    "Network",
    "Not",
    "Or",
    "parse_fact",
    "parse_program",
    "Program",
    "program_tts",
    "qualifying",
    "rb",
    "register_influence",
    "Rule",
    "rule_tts",
    "satisfies_fact",
    "satisfies_ic",
    "satisfies_rule",
    "SourceSpan",
    "strictly_satisfies_fact",
    "TRUE",
    "validate",
    "world_satisfies",
]
