"""Summary subgraphs and their JSON serialisation."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import KnowledgeGraph


@dataclass(frozen=True)
class SummarySubgraph:
    """A summary ``S = (V_S, E_S)``.  ``edges`` holds directed edge ids of
    the underlying graph, sorted."""

    method: str
    nodes: frozenset[int]
    edges: tuple[int, ...]
    terminals: frozenset[int]
    dropped_terminals: frozenset[int] = frozenset()
    params: dict[str, Any] = field(default_factory=dict, compare=False)
    cost: float | None = field(default=None, compare=False)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def is_tree(self, g: KnowledgeGraph) -> bool:
        if not self.nodes:
            return not self.edges
        if len(self.edges) != len(self.nodes) - 1:
            return False
        return self.is_connected(g)

    def is_connected(self, g: KnowledgeGraph) -> bool:
        if not self.nodes:
            return True
        adj: dict[int, list[int]] = defaultdict(list)
        for e in self.edges:
            a, b = int(g.src[e]), int(g.dst[e])
            if a not in self.nodes or b not in self.nodes:
                return False
            adj[a].append(b)
            adj[b].append(a)
        start = min(self.nodes)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == len(self.nodes)

    def edge_pairs(self, g: KnowledgeGraph) -> list[tuple[int, int]]:
        return [(int(g.src[e]), int(g.dst[e])) for e in self.edges]


def make_summary(
    g: KnowledgeGraph,
    method: str,
    edges,
    terminals,
    extra_nodes=(),
    dropped=(),
    params: dict | None = None,
    cost: float | None = None,
) -> SummarySubgraph:
    edges = tuple(sorted(int(e) for e in edges))
    nodes = {int(v) for v in extra_nodes}
    for e in edges:
        nodes.add(int(g.src[e]))
        nodes.add(int(g.dst[e]))
    return SummarySubgraph(
        method, frozenset(nodes), edges, frozenset(int(t) for t in terminals),
        frozenset(int(t) for t in dropped), dict(params or {}), cost,
    )


def _num(x: float) -> float | int:
    x = float(x)
    return int(x) if x.is_integer() and abs(x) < 2**53 else x


def summary_to_dict(
    s: SummarySubgraph,
    g: KnowledgeGraph,
    weights: np.ndarray,
    *,
    k: int | None = None,
    lam: float | None = None,
    scenario: str | None = None,
    subjects=(),
) -> dict:
    """JSON-ready dict; nodes and edges are sorted by label for stable output."""
    lab = g.labels
    out: dict[str, Any] = {"method": s.method}
    if scenario is not None:
        out["scenario"] = scenario
        out["subjects"] = sorted(lab[v] for v in subjects)
    out["k"] = k
    out["lambda"] = lam
    out["terminals"] = sorted(lab[v] for v in s.terminals)
    out["dropped_terminals"] = sorted(lab[v] for v in s.dropped_terminals)
    out["nodes"] = sorted(lab[v] for v in s.nodes)
    out["edges"] = sorted(
        [lab[int(g.src[e])], lab[int(g.dst[e])], _num(weights[e])] for e in s.edges
    )
    if s.cost is not None:
        out["cost"] = _num(s.cost)
    out["params"] = {key: s.params[key] for key in sorted(s.params)}
    return out


def dumps_summary(d: dict) -> str:
    return json.dumps(d, ensure_ascii=False, indent=1) + "\n"


def summary_from_dict(d: dict, g: KnowledgeGraph) -> SummarySubgraph:
    """Rebuild a summary from its JSON form (edge ids re-resolved by label)."""
    edges = []
    for src, dst, _w in d["edges"]:
        a, b = g.node_id(src), g.node_id(dst)
        edges.append(g.edge_for_step(a, b))
    return make_summary(
        g,
        d["method"],
        edges,
        [g.node_id(t) for t in d["terminals"]],
        extra_nodes=[g.node_id(v) for v in d["nodes"]],
        dropped=[g.node_id(t) for t in d["dropped_terminals"]],
        params=d.get("params"),
        cost=d.get("cost"),
    )
