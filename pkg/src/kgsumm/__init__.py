"""Summarize knowledge-graph recommendation explanation paths into compact subgraphs."""

from .errors import KGSummError
from .graph import KnowledgeGraph, NodeKind, RatingRecord, WeightParams, build_graph, recency
from .io import load_graph
from .metrics import Explanation, MetricsReport, evaluate
from .paths import (
    ExplanationPath,
    ExplanationPathSet,
    ScenarioKind,
    ScenarioSpec,
    TerminalSet,
    derive_scenario,
    parse_paths,
    terminal_set,
)
from .pcst import PrizeMode, assign_prizes, brute_force_pcst, pcst_cost, pcst_summary
from .reweight import ReweightParams, WorkingWeights, adjust_weights
from .steiner import SteinerParams, brute_force_steiner, edge_cost, steiner_summary
from .summary import SummarySubgraph

__version__ = "0.1.0"

__all__ = [
    "KGSummError", "KnowledgeGraph", "NodeKind", "RatingRecord", "WeightParams", "build_graph",
    "recency", "load_graph", "Explanation", "MetricsReport", "evaluate", "ExplanationPath",
    "ExplanationPathSet", "ScenarioKind", "ScenarioSpec", "TerminalSet", "derive_scenario",
    "parse_paths", "terminal_set", "PrizeMode", "assign_prizes", "brute_force_pcst", "pcst_cost",
    "pcst_summary", "ReweightParams", "WorkingWeights", "adjust_weights", "SteinerParams",
    "brute_force_steiner", "edge_cost", "steiner_summary", "SummarySubgraph",
]
