"""Web-usage mining toolkit: log cleaning, sessionization, pattern mining
with the MINT query language, success measures and evaluation heuristics."""

from .aggtree import TreeNode, build_aggregated_log
from .heuristics import (Finding, HeuristicConfig, eval_comparison,
                         eval_contact, eval_conversion)
from .logparse import (CleaningConfig, CleaningReport, LogRecord,
                       clean_records, parse_log_line, read_log)
from .measures import (contact_efficiency, conversion_efficiency,
                       efficiency_table, relative_contact_efficiency)
from .miner import (GSequence, NavigationPattern, build_pattern, confidence,
                    evaluate_query, hits, match_session)
from .mintlang import (MintQuery, MintSyntaxError, Wildcard, parse_query,
                       print_query, validate_query)
from .postmine import PostMinerConfig, prune_and_merge
from .sessions import (LogView, PageOccurrence, Session, SessionConfig,
                       SessionLog, classify_session, load_store,
                       partition_log, segment_sessions, write_store)
from .synth import ScenarioSpec, StrategySpec, generate, scenario_hierarchy
from .taxonomy import Concept, ConceptHierarchy, HierarchyError, load_hierarchy

__version__ = "1.0.0"

__all__ = [
    "TreeNode", "build_aggregated_log",
    "Finding", "HeuristicConfig", "eval_comparison", "eval_contact",
    "eval_conversion",
    "CleaningConfig", "CleaningReport", "LogRecord", "clean_records",
    "parse_log_line", "read_log",
    "contact_efficiency", "conversion_efficiency", "efficiency_table",
    "relative_contact_efficiency",
    "GSequence", "NavigationPattern", "build_pattern", "confidence",
    "evaluate_query", "hits", "match_session",
    "MintQuery", "MintSyntaxError", "Wildcard", "parse_query", "print_query",
    "validate_query",
    "PostMinerConfig", "prune_and_merge",
    "LogView", "PageOccurrence", "Session", "SessionConfig", "SessionLog",
    "classify_session", "load_store", "partition_log", "segment_sessions",
    "write_store",
    "ScenarioSpec", "StrategySpec", "generate", "scenario_hierarchy",
    "Concept", "ConceptHierarchy", "HierarchyError", "load_hierarchy",
]
