from __future__ import annotations

import random
from importlib import resources
from pathlib import Path

import numpy as np
import pytest

from kgsumm import io as kio
from kgsumm.graph import KnowledgeGraph, NodeKind, RatingRecord, WeightParams, build_graph
from kgsumm.paths import parse_paths
from kgsumm.reweight import WorkingWeights

TABLE1_SUMMARY_NODES = {
    "User 1", "Ulysses' Gaze", "Theo Angelopoulos", "The Beekeeper", "Drama",
    "Eternity and a Day", "The Suspended Step of the Stork",
}
TABLE1_TERMINALS = {"User 1", "Eternity and a Day", "The Beekeeper", "The Suspended Step of the Stork"}


def table1_dir() -> Path:
    return Path(str(resources.files("kgsumm") / "data" / "table1"))


def load_table1():
    d = table1_dir()
    g = kio.load_graph(d)
    with open(d / "paths.jsonl", encoding="utf-8") as fh:
        paths = parse_paths(fh, g)
    return g, paths


@pytest.fixture
def table1():
    return load_table1()


def random_graph(seed: int, n: int, p: float = 0.4, connected: bool = True) -> KnowledgeGraph:
    """Small random graph; node 0..n_users-1 users, then items, then externals.

    Edge weights come from ratings in 1..5 and attribute weights; a random
    spanning tree is laid first when ``connected``.
    """
    rng = random.Random(seed)
    kinds = [NodeKind.USER if v < max(1, n // 3) else NodeKind.ITEM if v < max(2, 2 * n // 3) else NodeKind.EXTERNAL
             for v in range(n)]
    labels = [f"n{v}" for v in range(n)]
    pairs = set()
    if connected:
        order = list(range(n))
        rng.shuffle(order)
        for i in range(1, n):
            a, b = order[i], order[rng.randrange(i)]
            pairs.add((min(a, b), max(a, b)))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                pairs.add((a, b))
    ratings, triples = [], []
    for a, b in sorted(pairs):
        ka, kb = kinds[a], kinds[b]
        if {ka, kb} == {NodeKind.USER, NodeKind.ITEM}:
            u, i = (a, b) if ka == NodeKind.USER else (b, a)
            ratings.append(RatingRecord(labels[u], labels[i], float(rng.randint(1, 5)), 0))
        else:
            rel = f"r{rng.randint(0, 2)}"
            triples.append((labels[a], rel, labels[b]) if rng.random() < 0.5 else (labels[b], rel, labels[a]))
    attr = {"r0": 0.0, "r1": 1.5, "r2": 3.0}
    return build_graph(ratings, triples, list(zip(labels, kinds)), WeightParams(), attr)


def weights_of(g: KnowledgeGraph, values) -> WorkingWeights:
    w = np.asarray(values, dtype=np.float64)
    return WorkingWeights(w, np.zeros(len(w)), 0.0, "test")


def plain_graph(n: int, edges, kinds=None, weights=None) -> tuple[KnowledgeGraph, WorkingWeights]:
    """Graph from ``(a, b)`` pairs over ``n`` external nodes with given working weights."""
    kinds = kinds or [NodeKind.EXTERNAL] * n
    labels = [f"v{v}" for v in range(n)]
    triples = [(labels[a], "link", labels[b]) for a, b in edges]
    g = build_graph([], triples, list(zip(labels, kinds)))
    w = weights if weights is not None else [1.0] * len(edges)
    return g, weights_of(g, w)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
