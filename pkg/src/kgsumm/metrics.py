"""Explanation-quality metrics shared by summaries and baseline path sets."""

from __future__ import annotations

import statistics
import time
import tracemalloc
from collections import Counter
from dataclasses import dataclass, asdict
from typing import Callable, Iterable, Sequence

from .errors import EmptyExplanation, SeriesTooShort
from .graph import KnowledgeGraph, NodeKind
from .paths import ExplanationPath
from .summary import SummarySubgraph

REDUNDANCY_MODES = ("incidence", "multiplicity")


@dataclass(frozen=True)
class Explanation:
    """Common view of a path set or a summary subgraph.

    For path sets every node of every path counts as an occurrence and
    edges are the consecutive pairs (duplicates kept); for subgraphs the
    occurrences are the endpoint incidences of ``E_S``.
    """

    form: str
    node_occurrences: tuple[int, ...]
    unique_nodes: frozenset[int]
    edges: tuple[tuple[int, int], ...]
    edge_ids: tuple[int, ...] | None = None

    @classmethod
    def from_paths(cls, paths: Iterable[ExplanationPath]) -> "Explanation":
        occ: list[int] = []
        edges: list[tuple[int, int]] = []
        for p in paths:
            occ.extend(p.nodes)
            edges.extend(p.steps)
        return cls("paths", tuple(occ), frozenset(occ), tuple(edges))

    @classmethod
    def from_subgraph(cls, s: SummarySubgraph, g: KnowledgeGraph) -> "Explanation":
        edges = s.edge_pairs(g)
        occ = [v for e in edges for v in e] or sorted(s.nodes)
        return cls("subgraph", tuple(occ), frozenset(s.nodes), tuple(edges), s.edges)

    def __bool__(self) -> bool:
        return bool(self.unique_nodes)


def _need_edges(x: Explanation) -> None:
    if not x.edges:
        raise EmptyExplanation("explanation has no edges")


def _need_nodes(x: Explanation) -> None:
    if not x.unique_nodes:
        raise EmptyExplanation("explanation has no nodes")


def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    union = a | b
    return len(a & b) / len(union) if union else 1.0


def comprehensibility(x: Explanation) -> float:
    _need_edges(x)
    return 1.0 / len(x.edges)


def actionability(x: Explanation, kinds) -> float:
    _need_nodes(x)
    items = sum(1 for v in x.unique_nodes if kinds[v] == NodeKind.ITEM)
    return items / len(x.unique_nodes)


def privacy(x: Explanation, kinds) -> float:
    _need_nodes(x)
    users = sum(1 for v in x.unique_nodes if kinds[v] == NodeKind.USER)
    return 1.0 - users / len(x.unique_nodes)


def diversity(x: Explanation) -> float:
    """Mean of ``1 - Jaccard`` over all unordered pairs of edge endpoint sets.

    A single edge scores 1.0.
    """
    _need_edges(x)
    m = len(x.edges)
    if m == 1:
        return 1.0
    # Endpoint sets all have two nodes (no self-loops), so a pair of edges is
    # either identical (J = 1), shares one node (J = 1/3) or is disjoint.
    # Count those cases instead of visiting all O(m^2) pairs.
    same = Counter(frozenset(e) for e in x.edges)
    at_node = Counter(v for e in same.elements() for v in e)
    identical = sum(c * (c - 1) // 2 for c in same.values())
    touching = sum(c * (c - 1) // 2 for c in at_node.values()) - 2 * identical
    similarity = identical + touching / 3.0
    return 1.0 - similarity / (m * (m - 1) // 2)


def redundancy(x: Explanation, mode: str = "incidence") -> float:
    """Share of duplicate node occurrences.

    ``incidence``: (occurrences - unique) / occurrences.
    ``multiplicity``: nodes occurring more than once / unique nodes.
    """
    _need_nodes(x)
    if mode == "incidence":
        return (len(x.node_occurrences) - len(x.unique_nodes)) / len(x.node_occurrences)
    if mode == "multiplicity":
        counts = Counter(x.node_occurrences)
        return sum(1 for c in counts.values() if c > 1) / len(x.unique_nodes)
    raise ValueError(f"redundancy mode must be one of {REDUNDANCY_MODES}")


def consistency(series: Sequence[Explanation]) -> float:
    """Mean node-set Jaccard of consecutive explanations in a k-series."""
    if len(series) < 2:
        raise SeriesTooShort(f"need at least 2 explanations, got {len(series)}")
    sims = [jaccard(a.unique_nodes, b.unique_nodes) for a, b in zip(series[:-1], series[1:])]
    return sum(sims) / len(sims)


def relevance(x: Explanation, g: KnowledgeGraph) -> float:
    """Sum of base weights over the explanation's edges."""
    if x.edge_ids is not None:
        return float(sum(g.base_weight[e] for e in set(x.edge_ids)))
    total = 0.0
    for a, b in x.edges:
        total += float(g.base_weight[g.edge_for_step(a, b)])
    return total


@dataclass
class MetricsReport:
    comprehensibility: float | None
    actionability: float | None
    diversity: float | None
    redundancy: float | None
    relevance: float | None
    privacy: float | None
    consistency: float | None = None
    wall_time_ms: float | None = None
    peak_memory_bytes: int | None = None

    def as_dict(self) -> dict:
        return asdict(self)


POINT_METRICS = ("comprehensibility", "actionability", "diversity", "redundancy", "relevance", "privacy")


def evaluate(x: Explanation, g: KnowledgeGraph, redundancy_mode: str = "incidence") -> MetricsReport:
    """Point metrics for one explanation; undefined ones are None."""
    def safe(fn, *args):
        try:
            return fn(*args)
        except EmptyExplanation:
            return None

    return MetricsReport(
        comprehensibility=safe(comprehensibility, x),
        actionability=safe(actionability, x, g.kinds),
        diversity=safe(diversity, x),
        redundancy=safe(redundancy, x, redundancy_mode),
        relevance=safe(relevance, x, g) if x else None,
        privacy=safe(privacy, x, g.kinds),
    )


def measure(fn: Callable[[], object], repeats: int = 1, memory: bool = True) -> tuple[float, int, object]:
    """Median wall time (ms) over ``repeats`` runs and traced peak memory.

    Memory comes from a separate ``tracemalloc`` run so tracing overhead
    does not inflate the timings; it counts Python and NumPy allocations
    only and is approximate.
    """
    times = []
    result = None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    peak = 0
    if memory:
        tracemalloc.start()
        try:
            fn()
            peak = tracemalloc.get_traced_memory()[1]
        finally:
            tracemalloc.stop()
    return statistics.median(times), int(peak), result
