"""Prize-collecting Steiner tree summaries.

The default solver is the unrooted Goemans-Williamson moat-growing
2-approximation followed by strong pruning; the best pruned tree is
returned and terminals left out of it are reported as dropped.
``algo="paper-prim"`` runs the priority-queue/disjoint-set procedure
literally instead (kept for comparison only).
"""

from __future__ import annotations

import enum
import heapq
import itertools
from dataclasses import dataclass

import numpy as np

from .errors import NoEdges, OracleTooLarge
from .graph import KnowledgeGraph
from .paths import TerminalSet
from .reweight import WorkingWeights
from .steiner import SteinerParams, edge_costs
from .summary import SummarySubgraph, make_summary

ORACLE_MAX_NODES = 12
ALGOS = ("gw", "paper-prim")


class PrizeMode(str, enum.Enum):
    WEIGHTED = "weighted"
    UNIT = "unit"


@dataclass(frozen=True, eq=False)
class PrizeAssignment:
    prizes: np.ndarray
    edge_costs: np.ndarray
    mode: PrizeMode
    alpha: float
    beta: float
    rho: float
    terminals: frozenset[int]


def assign_prizes(
    g: KnowledgeGraph,
    weights: WorkingWeights | None,
    T: TerminalSet,
    mode: PrizeMode | str = PrizeMode.UNIT,
    rho: float = 1.0,
    steiner: SteinerParams = SteinerParams(),
) -> PrizeAssignment:
    """Node prizes and edge costs.

    Weighted: terminals get ``alpha = max w(e)``, other nodes
    ``beta = min w(e)``, and edge costs use the Steiner cost transform.
    Unit: terminals get ``rho``, other nodes 0, every edge costs 1.
    """
    mode = PrizeMode(mode)
    if not T.terminals:
        raise ValueError("terminal set is empty")
    if not rho > 0:
        raise ValueError("rho must be positive")
    terms = sorted(T.terminals)
    n = g.num_nodes
    if mode is PrizeMode.WEIGHTED:
        if g.num_edges == 0:
            raise NoEdges("weighted prizes need at least one edge")
        if weights is None:
            raise ValueError("weighted prizes need working weights")
        alpha, beta = float(weights.weights.max()), float(weights.weights.min())
        prizes = np.full(n, beta)
        prizes[terms] = alpha
        costs = edge_costs(weights, steiner)
    else:
        alpha, beta = float(rho), 0.0
        prizes = np.zeros(n)
        prizes[terms] = rho
        costs = np.ones(g.num_edges)
    prizes.flags.writeable = False
    costs.flags.writeable = False
    return PrizeAssignment(prizes, costs, mode, alpha, beta, float(rho), frozenset(terms))


def pcst_cost(s: SummarySubgraph, prizes: PrizeAssignment) -> float:
    """``sum of edge costs - sum of node prizes`` over the subgraph."""
    edge_part = float(sum(prizes.edge_costs[e] for e in s.edges))
    node_part = float(sum(prizes.prizes[v] for v in s.nodes))
    return edge_part - node_part


def penalty_cost(s: SummarySubgraph, prizes: PrizeAssignment) -> float:
    """Edge costs plus prizes of the nodes left out (GW objective form)."""
    return pcst_cost(s, prizes) + float(prizes.prizes.sum())


def pcst_summary(g: KnowledgeGraph, prizes: PrizeAssignment, algo: str = "gw") -> SummarySubgraph:
    if algo not in ALGOS:
        raise ValueError(f"algo must be one of {ALGOS}")
    uv = g.undirected
    best_edge, pair_cost = uv.best_edges(prizes.edge_costs)
    if algo == "gw":
        forest = _gw_forest(uv, pair_cost, np.asarray(prizes.prizes, dtype=np.float64))
        pairs, nodes = _strong_prune(uv, pair_cost, prizes.prizes, forest)
    else:
        pairs, nodes = _paper_prim(uv, pair_cost, prizes.prizes)
    info = {"algo": algo, "prize_mode": prizes.mode.value, "rho": prizes.rho,
            "alpha": prizes.alpha, "beta": prizes.beta}
    s = make_summary(
        g, "pcst", (int(best_edge[p]) for p in pairs), prizes.terminals, extra_nodes=nodes,
        dropped=prizes.terminals - set(nodes), params=info,
    )
    return SummarySubgraph(s.method, s.nodes, s.edges, s.terminals, s.dropped_terminals,
                           s.params, pcst_cost(s, prizes))


def _gw_forest(uv, pair_cost: np.ndarray, prize: np.ndarray) -> list[int]:
    """Growth phase of unrooted GW; returns the pairs that went tight.

    Every node starts as its own cluster; clusters with leftover prize grow
    their moat at unit rate.  An edge merges two clusters when the moats
    around its endpoints add up to its cost; a cluster stops growing once
    the moats inside it have used up its prize.  Events at equal times run
    deactivations first, then edges by (smaller id, larger id).
    """
    n = len(prize)
    scale = max(1.0, float(prize.max()) if n else 1.0,
                float(pair_cost.max()) if len(pair_cost) else 1.0)
    tol = 1e-12 * scale
    indptr, nbr, pair = uv.indptr, uv.nbr, uv.pair

    root = np.arange(n)
    off = np.zeros(n)
    members: list[list[int]] = [[v] for v in range(n)]
    active = prize > tol
    gbase = np.zeros(n)
    start = np.zeros(n)
    slack = np.where(active, prize, 0.0)
    cver = [0] * n
    heap: list = []
    seq = itertools.count()
    batches: dict[int, tuple] = {}
    single_ver: dict[tuple[int, int], int] = {}
    forest: list[int] = []

    def grown(c: int, t: float) -> float:
        return gbase[c] + (t - start[c]) if active[c] else gbase[c]

    def load(v: int, t: float) -> float:
        return off[v] + grown(root[v], t)

    def seed(u: int, t: float) -> None:
        c = root[u]
        lo, hi = indptr[u], indptr[u + 1]
        nb = nbr[lo:hi]
        rn = root[nb]
        keep = rn != c
        if not keep.any():
            return
        nb, pr, rn = nb[keep], pair[lo:hi][keep], rn[keep]
        other_on = active[rn]
        ln = off[nb] + gbase[rn] + np.where(other_on, t - start[rn], 0.0)
        rem = np.maximum(pair_cost[pr] - load(u, t) - ln, 0.0)
        times = t + np.where(other_on, rem / 2, rem)
        a = np.minimum(nb, u)
        b = np.maximum(nb, u)
        order = np.lexsort((b, a, times))
        bid = next(seq)
        batch = (times[order].tolist(), a[order].tolist(), b[order].tolist(),
                 pr[order].tolist(), nb[order].tolist(), u)
        batches[bid] = batch
        heapq.heappush(heap, (batch[0][0], 1, batch[1][0], batch[2][0], bid, (bid, 0)))

    def evaluate(u: int, v: int, p: int, t: float) -> None:
        cu, cv = root[u], root[v]
        if cu == cv or not active[cu]:
            return
        rem = pair_cost[p] - load(u, t) - load(v, t)
        if rem <= tol:
            merge(cu, cv, p, t)
            return
        key = (p, u)
        ver = single_ver.get(key, 0) + 1
        single_ver[key] = ver
        tn = t + (rem / 2 if active[cv] else rem)
        heapq.heappush(heap, (tn, 1, min(u, v), max(u, v), next(seq), (None, (u, v, p, ver))))

    def merge(cu: int, cv: int, p: int, t: float) -> None:
        forest.append(p)
        gu, gv = grown(cu, t), grown(cv, t)
        su = slack[cu] - (t - start[cu]) if active[cu] else slack[cu]
        sv = slack[cv] - (t - start[cv]) if active[cv] else slack[cv]
        asleep = [list(members[c]) for c in (cu, cv) if not active[c]]
        big, small = (cu, cv) if len(members[cu]) >= len(members[cv]) else (cv, cu)
        g_big, g_small = (gu, gv) if big == cu else (gv, gu)
        idx = np.array(members[small])
        off[idx] += g_small - g_big
        root[idx] = big
        members[big].extend(members[small])
        members[small] = []
        active[small] = False
        gbase[big] = g_big
        start[big] = t
        slack[big] = max(su, 0.0) + max(sv, 0.0)
        active[big] = slack[big] > tol
        cver[big] += 1
        if active[big]:
            heapq.heappush(heap, (t + slack[big], 0, big, 0, next(seq), cver[big]))
            for group in asleep:
                for w in group:
                    seed(w, t)

    for v in np.flatnonzero(active).tolist():
        heapq.heappush(heap, (float(slack[v]), 0, v, 0, next(seq), cver[v]))
        seed(v, 0.0)

    while heap:
        t, kind, _a, _b, _s, payload = heapq.heappop(heap)
        if kind == 0:
            c = _a
            if payload != cver[c] or not active[c] or root[c] != c:
                continue
            gbase[c] = grown(c, t)
            start[c] = t
            slack[c] = 0.0
            active[c] = False
            continue
        bid, rest = payload
        if bid is None:
            u, v, p, ver = rest
            if single_ver.get((p, u)) == ver:
                evaluate(u, v, p, t)
            continue
        times, al, bl, pl, nl, u = batches[bid]
        i = rest
        evaluate(u, nl[i], pl[i], t)
        if i + 1 < len(times) and active[root[u]]:
            heapq.heappush(heap, (max(times[i + 1], t), 1, al[i + 1], bl[i + 1], bid, (bid, i + 1)))
        else:
            del batches[bid]
    return forest


def _strong_prune(uv, pair_cost, prize, forest: list[int]) -> tuple[list[int], list[int]]:
    """Best subtree of the GW forest, rerooted at its most profitable node.

    A branch is kept only if its net value (prizes minus costs) strictly
    exceeds the cost of the edge that attaches it.
    """
    adj: dict[int, list[tuple[int, int]]] = {}
    for p in forest:
        a, b = int(uv.lo[p]), int(uv.hi[p])
        adj.setdefault(a, []).append((b, p))
        adj.setdefault(b, []).append((a, p))
    scale = max(1.0, float(np.max(prize)) if len(prize) else 1.0)
    tol = 1e-12 * scale

    best = (0.0, None)  # (value, root, down, up, parent)
    candidates = sorted(set(adj) | set(np.flatnonzero(prize > 0).tolist()))
    seen: set[int] = set()
    for r0 in candidates:
        if r0 in seen:
            continue
        order, parent = [r0], {r0: (-1, -1)}
        seen.add(r0)
        for v in order:
            for w, p in adj.get(v, ()):
                if w not in parent:
                    parent[w] = (v, p)
                    seen.add(w)
                    order.append(w)
        down = {}
        for v in reversed(order):
            val = float(prize[v])
            for w, p in adj.get(v, ()):
                if parent[w][0] == v:
                    val += max(0.0, down[w] - pair_cost[p])
            down[v] = val
        up = {r0: 0.0}
        full = {}
        for v in order:
            pv, pp = parent[v]
            full[v] = down[v] + (max(0.0, up[v] - pair_cost[pp]) if pv >= 0 else 0.0)
            for w, p in adj.get(v, ()):
                if parent[w][0] == v:
                    up[w] = full[v] - max(0.0, down[w] - pair_cost[p])
        root = min(order, key=lambda v: (-full[v], v))
        if full[root] > best[0] + tol:
            best = (full[root], (root, down, up, parent))
    if best[1] is None:
        return [], []

    root, down, up, parent = best[1]
    nodes, pairs = [root], []
    stack = [(root, -1)]
    while stack:
        v, came = stack.pop()
        for w, p in adj.get(v, ()):
            if w == came:
                continue
            gain = down[w] if parent[w][0] == v else up[v]
            if gain - pair_cost[p] > tol:
                nodes.append(w)
                pairs.append(p)
                stack.append((w, v))
    return pairs, nodes


def _paper_prim(uv, pair_cost, prize) -> tuple[list[int], list[int]]:
    """Literal priority-queue / disjoint-set procedure.

    Every node ends up in ``V_S``; the result is cut down to the connected
    piece with the lowest net cost among those holding a positive prize.
    """
    n = len(prize)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    key = (-np.asarray(prize, dtype=np.float64)).tolist()
    heap = [(key[v], v) for v in range(n)]
    heapq.heapify(heap)
    queued = [True] * n
    chosen: list[int] = []
    while heap:
        k, u = heapq.heappop(heap)
        if not queued[u] or k != key[u]:
            continue
        queued[u] = False
        for j in range(uv.indptr[u], uv.indptr[u + 1]):
            v, p = int(uv.nbr[j]), int(uv.pair[j])
            ru, rv = find(u), find(v)
            if ru != rv:
                cost = float(pair_cost[p])
                if queued[v] and cost < key[v]:
                    key[v] = cost
                    heapq.heappush(heap, (cost, v))
                    parent[rv] = ru
                    chosen.append(p)

    comp: dict[int, list[int]] = {}
    for v in range(n):
        comp.setdefault(find(v), []).append(v)
    comp_pairs: dict[int, list[int]] = {}
    for p in chosen:
        comp_pairs.setdefault(find(int(uv.lo[p])), []).append(p)
    best = None
    for r, nodes in comp.items():
        gain = float(sum(prize[v] for v in nodes))
        if gain <= 0:
            continue
        c = float(sum(pair_cost[p] for p in comp_pairs.get(r, ()))) - gain
        key_ = (c, min(nodes))
        if best is None or key_ < best[0]:
            best = (key_, comp_pairs.get(r, []), nodes)
    if best is None:
        return [], []
    return best[1], best[2]


def brute_force_pcst(g: KnowledgeGraph, prizes: PrizeAssignment) -> SummarySubgraph:
    """Exact PCST optimum over all connected node subsets (test oracle)."""
    n = g.num_nodes
    if n > ORACLE_MAX_NODES:
        raise OracleTooLarge(f"{n} nodes > {ORACLE_MAX_NODES}")
    link: dict[tuple[int, int], tuple[float, int]] = {}
    for e in range(g.num_edges):
        a, b = int(g.src[e]), int(g.dst[e])
        k = (min(a, b), max(a, b))
        cand = (float(prizes.edge_costs[e]), e)
        if k not in link or cand < link[k]:
            link[k] = cand

    best = ((0.0, 0, []), [])
    for r in range(1, n + 1):
        for nodes in itertools.combinations(range(n), r):
            tree = _mst(list(nodes), link)
            if tree is None:
                continue
            total, edges = tree
            c = total - float(sum(prizes.prizes[v] for v in nodes))
            key = (c, r, list(nodes))
            if key < best[0]:
                best = (key, edges)
    (c, _, nodes), edges = best
    s = make_summary(g, "pcst-exact", edges, prizes.terminals, extra_nodes=nodes,
                     dropped=prizes.terminals - set(nodes))
    return SummarySubgraph(s.method, s.nodes, s.edges, s.terminals, s.dropped_terminals,
                           s.params, c)


def _mst(nodes, link):
    inside = {nodes[0]}
    rest = set(nodes[1:])
    total, edges = 0.0, []
    while rest:
        pick = None
        for a in inside:
            for b in rest:
                k = (min(a, b), max(a, b))
                if k in link and (pick is None or link[k] < pick[0]):
                    pick = (link[k], b)
        if pick is None:
            return None
        (c, e), b = pick
        total += c
        edges.append(e)
        inside.add(b)
        rest.discard(b)
    return total, edges
