"""Knowledge-based graph: users, items and external entities.

Rating edges (user -> item) are weighted by a mix of the rating value and
an exponential recency factor; knowledge-triple edges carry a fixed
attribute weight (0 by default).  The graph is immutable once built.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateRating,
    FutureTimestamp,
    InvalidEdge,
    KindMismatch,
    UnknownEdge,
    UnknownNode,
)


class NodeKind(enum.IntEnum):
    USER = 0
    ITEM = 1
    EXTERNAL = 2

    @classmethod
    def parse(cls, text: str) -> "NodeKind":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown node kind {text!r}") from None


@dataclass(frozen=True)
class RatingRecord:
    user: str
    item: str
    rating: float
    timestamp: int


@dataclass(frozen=True)
class WeightParams:
    """Parameters of the rating-edge weight ``beta1 * r + beta2 * f(t)``.

    ``t0`` is the reference "now"; ``None`` means the latest rating
    timestamp seen by :func:`build_graph`.
    """

    beta1: float = 1.0
    beta2: float = 0.0
    gamma: float = 0.0
    t0: int | None = None

    def __post_init__(self):
        if self.beta1 < 0 or self.beta2 < 0 or self.gamma < 0:
            raise ValueError("beta1, beta2 and gamma must be non-negative")
        if self.beta1 + self.beta2 <= 0:
            raise ValueError("beta1 + beta2 must be positive")


def recency(t: int, params: WeightParams) -> float:
    """Exponential recency factor ``exp(-gamma * (t0 - t))`` in (0, 1]."""
    if params.t0 is None:
        raise ValueError("recency needs an explicit t0")
    if t > params.t0:
        raise FutureTimestamp(f"timestamp {t} is after t0={params.t0}", timestamp=t)
    if params.gamma == 0 or t == params.t0:
        return 1.0
    return math.exp(-params.gamma * (params.t0 - t))


def rating_weight(rating: float, t: int, params: WeightParams) -> float:
    return params.beta1 * rating + params.beta2 * recency(t, params)


class KnowledgeGraph:
    """Directed weighted graph with dense integer node ids.

    Edge ``e`` runs ``src[e] -> dst[e]`` with base weight ``base_weight[e]``
    (the rating weight for rating edges, the attribute weight otherwise).
    Arrays are read-only.
    """

    def __init__(
        self,
        labels: Sequence[str],
        kinds: np.ndarray,
        src: np.ndarray,
        dst: np.ndarray,
        base_weight: np.ndarray,
        relations: Sequence[str | None],
        params: WeightParams,
    ):
        self.labels: tuple[str, ...] = tuple(labels)
        self.kinds = _frozen(np.asarray(kinds, dtype=np.int8))
        self.src = _frozen(np.asarray(src, dtype=np.int64))
        self.dst = _frozen(np.asarray(dst, dtype=np.int64))
        self.base_weight = _frozen(np.asarray(base_weight, dtype=np.float64))
        self.relations: tuple[str | None, ...] = tuple(relations)
        self.params = params
        self.index: dict[str, int] = {lab: i for i, lab in enumerate(self.labels)}
        n = len(self.labels)
        self.out_ptr, self.out_edges = _csr(self.src, n)
        self.in_ptr, self.in_edges = _csr(self.dst, n)

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.src)

    def __repr__(self) -> str:
        return f"KnowledgeGraph(nodes={self.num_nodes}, edges={self.num_edges})"

    def node_id(self, label: str) -> int:
        try:
            return self.index[label]
        except KeyError:
            raise UnknownNode(f"unknown node {label!r}", node=label) from None

    def kind(self, node: int) -> NodeKind:
        return NodeKind(int(self.kinds[node]))

    def nodes_of_kind(self, kind: NodeKind) -> np.ndarray:
        return np.flatnonzero(self.kinds == kind)

    def out_edge_ids(self, node: int) -> np.ndarray:
        return self.out_edges[self.out_ptr[node] : self.out_ptr[node + 1]]

    def in_edge_ids(self, node: int) -> np.ndarray:
        return self.in_edges[self.in_ptr[node] : self.in_ptr[node + 1]]

    @cached_property
    def is_rating(self) -> np.ndarray:
        return _frozen(
            (self.kinds[self.src] == NodeKind.USER) & (self.kinds[self.dst] == NodeKind.ITEM)
        )

    def edges_between(self, a: int, b: int) -> list[int]:
        """Edge ids joining ``a`` and ``b`` in either direction."""
        p = self.undirected.pair_id(a, b)
        return [] if p < 0 else self.undirected.edges_of_pair(p)

    def has_link(self, a: int, b: int) -> bool:
        return bool(self.edges_between(a, b))

    def edge_for_step(self, a: int, b: int) -> int:
        """The edge a path step ``a -> b`` traverses (forward edge preferred)."""
        ids = self.edges_between(a, b)
        if not ids:
            raise UnknownEdge(
                f"no edge between {self.labels[a]!r} and {self.labels[b]!r}",
                src=self.labels[a],
                dst=self.labels[b],
            )
        for e in ids:
            if self.src[e] == a:
                return e
        return ids[0]

    @cached_property
    def undirected(self) -> "UndirectedView":
        return UndirectedView.from_graph(self)

    def kind_counts(self) -> dict[str, int]:
        counts = np.bincount(self.kinds, minlength=3)
        return {k.name.lower(): int(counts[k]) for k in NodeKind}


@dataclass(frozen=True)
class UndirectedView:
    """Simple undirected view: one entry per unordered adjacent pair.

    Pair ``p`` joins ``lo[p] < hi[p]``; ``edge_pair[e]`` maps each directed
    edge to its pair.  The symmetric CSR (``indptr``, ``nbr``, ``pair``) is
    sorted by neighbour id within each node.
    """

    lo: np.ndarray
    hi: np.ndarray
    edge_pair: np.ndarray
    pair_ptr: np.ndarray
    pair_eids: np.ndarray
    indptr: np.ndarray
    nbr: np.ndarray
    pair: np.ndarray

    @classmethod
    def from_graph(cls, g: KnowledgeGraph) -> "UndirectedView":
        m = g.num_edges
        lo = np.minimum(g.src, g.dst)
        hi = np.maximum(g.src, g.dst)
        order = np.lexsort((np.arange(m), hi, lo))
        lo_s, hi_s = lo[order], hi[order]
        new = np.ones(m, dtype=bool)
        if m:
            new[1:] = (lo_s[1:] != lo_s[:-1]) | (hi_s[1:] != hi_s[:-1])
        starts = np.flatnonzero(new)
        pid_sorted = np.cumsum(new) - 1
        edge_pair = np.empty(m, dtype=np.int64)
        edge_pair[order] = pid_sorted
        pair_ptr = np.append(starts, m).astype(np.int64)
        plo, phi = lo_s[starts], hi_s[starts]
        n = g.num_nodes
        ends = np.concatenate([plo, phi])
        nbrs = np.concatenate([phi, plo])
        pid = np.concatenate([np.arange(len(plo)), np.arange(len(plo))])
        o = np.lexsort((nbrs, ends))
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(ends, minlength=n), out=indptr[1:])
        return cls(
            _frozen(plo), _frozen(phi), _frozen(edge_pair), _frozen(pair_ptr),
            _frozen(order.astype(np.int64)), _frozen(indptr), _frozen(nbrs[o]),
            _frozen(pid[o]),
        )

    @property
    def num_pairs(self) -> int:
        return len(self.lo)

    def pair_id(self, a: int, b: int) -> int:
        lo, hi = self.indptr[a], self.indptr[a + 1]
        k = lo + int(np.searchsorted(self.nbr[lo:hi], b))
        if k < hi and self.nbr[k] == b:
            return int(self.pair[k])
        return -1

    def edges_of_pair(self, p: int) -> list[int]:
        return self.pair_eids[self.pair_ptr[p] : self.pair_ptr[p + 1]].tolist()

    def best_edges(self, cost: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Cheapest directed edge per pair (ties: smallest edge id) and its cost."""
        m = len(cost)
        order = np.lexsort((np.arange(m), cost, self.edge_pair))
        first = np.ones(m, dtype=bool)
        first[1:] = self.edge_pair[order][1:] != self.edge_pair[order][:-1]
        chosen = order[first]
        return chosen, cost[chosen]


def build_graph(
    ratings: Iterable[RatingRecord],
    triples: Iterable[tuple[str, str, str]],
    kinds: Mapping[str, NodeKind] | Iterable[tuple[str, NodeKind]],
    params: WeightParams = WeightParams(),
    attribute_weights: Mapping[str, float] | None = None,
    default_attribute_weight: float = 0.0,
) -> KnowledgeGraph:
    """Assemble a :class:`KnowledgeGraph`.

    Node ids follow the declaration order of ``kinds``; edges are the
    ratings (in input order) followed by the triples.  ``attribute_weights``
    optionally overrides the attribute weight per relation name.
    """
    items = kinds.items() if isinstance(kinds, Mapping) else kinds
    labels: list[str] = []
    kind_list: list[int] = []
    index: dict[str, int] = {}
    for label, kind in items:
        if label in index:
            raise ValueError(f"node {label!r} declared twice")
        index[label] = len(labels)
        labels.append(label)
        kind_list.append(int(NodeKind(kind)))

    ratings = list(ratings)
    if params.t0 is None:
        t0 = max((r.timestamp for r in ratings), default=0)
        params = WeightParams(params.beta1, params.beta2, params.gamma, t0)

    def lookup(label: str) -> int:
        try:
            return index[label]
        except KeyError:
            raise UnknownNode(f"unknown node {label!r}", node=label) from None

    src: list[int] = []
    dst: list[int] = []
    weight: list[float] = []
    rels: list[str | None] = []
    seen: set[tuple[int, int]] = set()
    for rec in ratings:
        u, i = lookup(rec.user), lookup(rec.item)
        if kind_list[u] != NodeKind.USER or kind_list[i] != NodeKind.ITEM:
            raise KindMismatch(f"rating ({rec.user!r}, {rec.item!r}) must link a user to an item")
        if not rec.rating > 0:
            raise ValueError(f"rating for ({rec.user!r}, {rec.item!r}) must be positive")
        if (u, i) in seen:
            raise DuplicateRating(f"duplicate rating ({rec.user!r}, {rec.item!r})")
        seen.add((u, i))
        src.append(u)
        dst.append(i)
        weight.append(rating_weight(rec.rating, rec.timestamp, params))
        rels.append(None)

    attribute_weights = attribute_weights or {}
    for head, rel, tail in triples:
        a, b = lookup(head), lookup(tail)
        if a == b:
            raise InvalidEdge(f"self-loop on {head!r}")
        src.append(a)
        dst.append(b)
        weight.append(float(attribute_weights.get(rel, default_attribute_weight)))
        rels.append(rel)

    return KnowledgeGraph(
        labels, np.array(kind_list, dtype=np.int8), np.array(src, dtype=np.int64),
        np.array(dst, dtype=np.int64), np.array(weight, dtype=np.float64), rels, params,
    )


def _frozen(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _csr(keys: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    order = np.argsort(keys, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=n), out=ptr[1:])
    return _frozen(ptr), _frozen(order.astype(np.int64))
