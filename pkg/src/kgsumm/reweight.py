"""Path-coverage reweighting of base edge weights.

``w(e) = (w_M(e) + floor) * (1 + lam * c(e) / |targets|)`` where ``c(e)``
counts the targets with at least one explanation path through ``e``
("per-target", the default) or the paths through ``e`` ("per-path").
Edge membership ignores direction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyScenario
from .graph import KnowledgeGraph
from .paths import ScenarioSpec

COUNT_MODES = ("per-target", "per-path")


@dataclass(frozen=True)
class ReweightParams:
    lam: float = 1.0
    floor: float = 1e-6
    count_mode: str = "per-target"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.floor < 0:
            raise ValueError("floor must be non-negative")
        if self.count_mode not in COUNT_MODES:
            raise ValueError(f"count_mode must be one of {COUNT_MODES}")


@dataclass(frozen=True, eq=False)
class WorkingWeights:
    weights: np.ndarray
    coverage: np.ndarray
    lam: float
    scenario: str

    def __getitem__(self, e):
        return self.weights[e]

    @property
    def wmax(self) -> float:
        return float(self.weights.max()) if len(self.weights) else 0.0


def path_edge_ids(g: KnowledgeGraph, nodes) -> set[int]:
    out: set[int] = set()
    for a, b in zip(nodes[:-1], nodes[1:]):
        out.update(g.edges_between(a, b))
    return out


def edge_coverage(g: KnowledgeGraph, spec: ScenarioSpec, count_mode: str = "per-target") -> np.ndarray:
    """``c(e)`` for every edge of ``g``."""
    counts = np.zeros(g.num_edges, dtype=np.float64)
    if count_mode == "per-path":
        for p in spec.path_subset:
            counts[list(path_edge_ids(g, p.nodes))] += 1
        return counts
    per_target: dict[int, set[int]] = {}
    for p in spec.path_subset:
        per_target.setdefault(spec.target_of(p), set()).update(path_edge_ids(g, p.nodes))
    for edges in per_target.values():
        if edges:
            counts[list(edges)] += 1
    return counts


def adjust_weights(
    g: KnowledgeGraph, spec: ScenarioSpec, params: ReweightParams = ReweightParams()
) -> WorkingWeights:
    if not spec.targets:
        raise EmptyScenario("scenario has no targets")
    coverage = edge_coverage(g, spec, params.count_mode) / len(spec.targets)
    w = (g.base_weight + params.floor) * (1.0 + params.lam * coverage)
    w.flags.writeable = False
    return WorkingWeights(w, coverage, params.lam, spec.kind.value)


def uniform_weights(g: KnowledgeGraph, floor: float = 1e-6) -> WorkingWeights:
    """Base weights plus floor, with no path influence."""
    w = g.base_weight + floor
    w.flags.writeable = False
    return WorkingWeights(w, np.zeros(g.num_edges), 0.0, "none")
