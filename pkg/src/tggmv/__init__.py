"""Multi-version forward transformation with triple graph grammars."""

from .errors import (
    ApplicationError,
    DanglingConditionError,
    DeterminismError,
    HistoryError,
    InputError,
    InvalidMatch,
    NonTerminationError,
    NotApplicable,
    TGGError,
    TypeGraphMismatch,
    VerificationError,
)
from .graph import Edge, GraphMorphism, TypedGraph, TypeGraph
from .matching import NAC, Match, find_monomorphisms
from .rules import Application, Rule, apply_rule
from .tgg import (
    ForwardRule,
    TGGRule,
    TripleTypeGraph,
    bookkeeping_set,
    derive_forward_rule,
    derive_forward_rules,
    init_forward,
)
from .versions import VersionGraph
from .mvm import (
    MultiVersionModel,
    MVTypeGraph,
    VersionHistory,
    adapt_type_graph,
    comb,
    init_mv_bookkeeping,
    presence_set,
    proj,
    proj_bookkeeping,
    untranslated_set,
)
from .mvrules import MVForwardRule, adapt, adapt_all, apply_mv_rule, compute_P, find_mv_matches, trans_prime, version_mask
from .iso import graph_isomorphic
from .engine import (
    ApplicationLog,
    EquivalenceReport,
    transform_forward,
    transform_forward_mv,
    verify_equivalence,
)
from .generate import BenchConfig, generate_history
from .bench import bench_history, run_bench

__all__ = [
    "adapt",
    "adapt_all",
    "adapt_type_graph",
    "Application",
    "ApplicationError",
    "ApplicationLog",
    "apply_mv_rule",
    "apply_rule",
    "bench_history",
    "BenchConfig",
    "bookkeeping_set",
    "comb",
    "compute_P",
    "DanglingConditionError",
    "derive_forward_rule",
    "derive_forward_rules",
    "DeterminismError",
    "Edge",
    "EquivalenceReport",
    "find_monomorphisms",
    "find_mv_matches",
    "ForwardRule",
    "generate_history",
    "graph_isomorphic",
    "GraphMorphism",
    "HistoryError",
    "init_forward",
    "init_mv_bookkeeping",
    "InputError",
    "InvalidMatch",
    "Match",
    "MultiVersionModel",
    "MVForwardRule",
    "MVTypeGraph",
    "NAC",
    "NonTerminationError",
    "NotApplicable",
    "presence_set",
    "proj",
    "proj_bookkeeping",
    "Rule",
    "run_bench",
    "TGGError",
    "TGGRule",
    "trans_prime",
    "transform_forward",
    "transform_forward_mv",
    "TripleTypeGraph",
    "TypedGraph",
    "TypeGraph",
    "TypeGraphMismatch",
    "untranslated_set",
    "VerificationError",
    "verify_equivalence",
    "version_mask",
    "VersionGraph",
    "VersionHistory",
]
