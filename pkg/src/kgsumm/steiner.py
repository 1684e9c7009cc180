"""Steiner-tree summaries via the metric-closure MST 2-approximation.

Working weights are turned into positive costs with
``cost(e) = (wmax + eps) - w(e)``: heavier edges are cheaper, and every
edge still costs at least ``eps``, so a tree's cost is
``|E_S| * (wmax + eps) - sum w(e)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DisconnectedTerminals, OracleTooLarge, UnknownNode
from .graph import KnowledgeGraph
from .paths import TerminalSet
from .reweight import WorkingWeights
from .summary import SummarySubgraph, make_summary

ORACLE_MAX_NODES = 16
_TIGHT_RTOL = 1e-10


@dataclass(frozen=True)
class SteinerParams:
    epsilon: float = 1e-3

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def edge_cost(w: float, wmax: float, params: SteinerParams = SteinerParams()) -> float:
    return (wmax + params.epsilon) - w


def edge_costs(weights: WorkingWeights, params: SteinerParams = SteinerParams()) -> np.ndarray:
    return edge_cost(weights.weights, weights.wmax, params)


def tree_cost(s: SummarySubgraph, weights: WorkingWeights, params: SteinerParams = SteinerParams()) -> float:
    wmax = weights.wmax
    return float(sum(edge_cost(weights.weights[e], wmax, params) for e in s.edges))


class _UnionFind:
    def __init__(self, items=()):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def _check_terminals(g: KnowledgeGraph, T: TerminalSet) -> np.ndarray:
    terms = np.array(sorted(T.terminals), dtype=np.int64)
    bad = [int(t) for t in terms if not 0 <= t < g.num_nodes]
    if bad:
        raise UnknownNode(f"terminal ids {bad} not in graph")
    return terms


def steiner_summary(
    g: KnowledgeGraph,
    weights: WorkingWeights,
    T: TerminalSet,
    params: SteinerParams = SteinerParams(),
) -> SummarySubgraph:
    """Approximate Steiner tree spanning ``T`` (cost at most twice optimal).

    Shortest paths are ties-broken towards the smallest predecessor id,
    metric-closure MST edges by ``(distance, id, id)``.
    """
    terms = _check_terminals(g, T)
    info = {"epsilon": params.epsilon}
    if len(terms) == 1:
        return make_summary(g, "st", (), terms, extra_nodes=terms, params=info)

    uv = g.undirected
    best_edge, pair_cost = uv.best_edges(edge_costs(weights, params))
    n = g.num_nodes
    mat = csr_matrix((pair_cost[uv.pair], uv.nbr, uv.indptr), shape=(n, n))
    dist = dijkstra(mat, directed=True, indices=terms)
    closure = dist[:, terms]

    reach = np.isfinite(closure)
    if not reach.all():
        groups = {tuple(np.flatnonzero(row)) for row in reach}
        main = max(groups, key=lambda grp: (len(grp), -grp[0]))
        lost = sorted(g.labels[terms[i]] for i in range(len(terms)) if i not in main)
        raise DisconnectedTerminals(f"unreachable terminals: {lost}", unreachable=lost)

    iu, ju = np.triu_indices(len(terms), 1)
    order = np.lexsort((terms[ju], terms[iu], closure[iu, ju]))
    uf = _UnionFind(range(len(terms)))
    used_pairs: set[int] = set()
    needed = len(terms) - 1
    for idx in order.tolist():
        i, j = int(iu[idx]), int(ju[idx])
        if uf.union(i, j):
            used_pairs.update(_trace(uv, pair_cost, dist[i], int(terms[i]), int(terms[j])))
            needed -= 1
            if needed == 0:
                break

    pairs = _mst_pairs(uv, pair_cost, used_pairs)
    pairs = _prune_leaves(uv, pairs, set(terms.tolist()))
    return make_summary(g, "st", (int(best_edge[p]) for p in pairs), terms, params=info)


def _trace(uv, pair_cost, drow: np.ndarray, a: int, b: int) -> list[int]:
    """Pairs on a shortest ``a``-``b`` path, walking back from ``b``."""
    out = []
    v = b
    while v != a:
        lo, hi = uv.indptr[v], uv.indptr[v + 1]
        nb = uv.nbr[lo:hi]
        pr = uv.pair[lo:hi]
        dv = drow[v]
        cand = drow[nb] + pair_cost[pr]
        tight = (np.abs(cand - dv) <= _TIGHT_RTOL * max(1.0, dv)) & (drow[nb] < dv)
        k = int(np.flatnonzero(tight)[0])  # nbr is sorted, so this is the smallest id
        out.append(int(pr[k]))
        v = int(nb[k])
    return out


def _mst_pairs(uv, pair_cost, pairs) -> list[int]:
    """Minimum spanning forest of the union of expanded paths."""
    ordered = sorted(pairs, key=lambda p: (pair_cost[p], int(uv.lo[p]), int(uv.hi[p])))
    uf = _UnionFind()
    return [p for p in ordered if uf.union(int(uv.lo[p]), int(uv.hi[p]))]


def _prune_leaves(uv, pairs, keep: set[int]) -> list[int]:
    """Repeatedly drop non-terminal leaves."""
    incident: dict[int, set[int]] = {}
    for p in pairs:
        incident.setdefault(int(uv.lo[p]), set()).add(p)
        incident.setdefault(int(uv.hi[p]), set()).add(p)
    alive = set(pairs)
    stack = [v for v, ps in incident.items() if len(ps) == 1 and v not in keep]
    while stack:
        v = stack.pop()
        if len(incident[v]) != 1 or v in keep:
            continue
        (p,) = incident[v]
        alive.discard(p)
        other = int(uv.hi[p]) if int(uv.lo[p]) == v else int(uv.lo[p])
        incident[v].clear()
        incident[other].discard(p)
        if len(incident[other]) == 1 and other not in keep:
            stack.append(other)
    return sorted(alive)


def brute_force_steiner(
    g: KnowledgeGraph,
    weights: WorkingWeights,
    T: TerminalSet,
    params: SteinerParams = SteinerParams(),
) -> SummarySubgraph:
    """Exact minimum-cost Steiner tree by enumerating Steiner-node subsets.

    Test oracle; only for graphs with at most 16 nodes.
    """
    n = g.num_nodes
    if n > ORACLE_MAX_NODES:
        raise OracleTooLarge(f"{n} nodes > {ORACLE_MAX_NODES}")
    wmax = weights.wmax
    link: dict[tuple[int, int], tuple[float, int]] = {}
    for e in range(g.num_edges):
        a, b = int(g.src[e]), int(g.dst[e])
        key = (min(a, b), max(a, b))
        cand = (edge_cost(float(weights.weights[e]), wmax, params), e)
        if key not in link or cand < link[key]:
            link[key] = cand

    terms = sorted(T.terminals)
    others = [v for v in range(n) if v not in T.terminals]
    best = None
    for r in range(len(others) + 1):
        for extra in itertools.combinations(others, r):
            nodes = terms + list(extra)
            tree = _prim(nodes, link)
            if tree is None:
                continue
            total, edges = tree
            key = (total, len(nodes), sorted(nodes))
            if best is None or key < best[0]:
                best = (key, edges)
    if best is None:
        raise DisconnectedTerminals("terminals are not connected")
    return make_summary(g, "st-exact", best[1], terms, extra_nodes=terms,
                        params={"epsilon": params.epsilon}, cost=best[0][0])


def _prim(nodes, link):
    """MST of the subgraph induced by ``nodes``; None if disconnected."""
    inside = {nodes[0]}
    rest = set(nodes[1:])
    total = 0.0
    edges = []
    while rest:
        pick = None
        for a in inside:
            for b in rest:
                key = (min(a, b), max(a, b))
                if key in link and (pick is None or link[key] < pick[0]):
                    pick = (link[key], b)
        if pick is None:
            return None
        (c, e), b = pick
        total += c
        edges.append(e)
        inside.add(b)
        rest.discard(b)
    return total, edges
