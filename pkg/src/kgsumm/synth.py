"""Synthetic knowledge graphs, random explanation paths and samplers.

Synthetic graphs copy the class proportions and mean degrees of the
MovieLens-1M knowledge graph: users rate items, items link to external
entities.  Five preset sizes (10k to 30k nominal nodes) are available via
:func:`table3_spec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InfeasibleSpec, InsufficientPopulation, IsolatedUser
from .graph import KnowledgeGraph, NodeKind, RatingRecord, WeightParams
from .paths import ExplanationPath, ExplanationPathSet

# Reference graph (MovieLens-1M + DBpedia) node and edge counts.
ML1M_USERS, ML1M_ITEMS, ML1M_EXTERNAL, ML1M_TOTAL = 6040, 3883, 10820, 19844
ML1M_USER_ITEM_EDGES, ML1M_ITEM_EXTERNAL_EDGES = 932_293, 178_461
EDGES_PER_NODE = 55.9734
TABLE3_TOTALS = (10_000, 15_000, 20_000, 25_000, 30_000)


@dataclass(frozen=True)
class SynthSpec:
    n_users: int
    n_items: int
    n_external: int
    target_total_edges: int
    user_item_share: float = ML1M_USER_ITEM_EDGES / (ML1M_USER_ITEM_EDGES + ML1M_ITEM_EXTERNAL_EDGES)
    degree_spread: float = 0.6
    popularity_skew: float = 0.8
    time_window: tuple[int, int] = (0, 1_000_000_000)
    seed: int = 0

    def __post_init__(self):
        if min(self.n_users, self.n_items, self.n_external) <= 0:
            raise InfeasibleSpec("all node-class counts must be positive")
        if not 0 < self.user_item_share < 1:
            raise InfeasibleSpec("user_item_share must lie in (0, 1)")

    @property
    def total_nodes(self) -> int:
        return self.n_users + self.n_items + self.n_external

    @property
    def user_item_edges(self) -> int:
        return int(round(self.target_total_edges * self.user_item_share))

    @property
    def item_external_edges(self) -> int:
        return self.target_total_edges - self.user_item_edges

    @classmethod
    def from_fractions(
        cls, total_nodes: int, fractions: Sequence[float], target_total_edges: int | None = None, **kw
    ) -> "SynthSpec":
        """Class counts ``round(total * fraction)``; fractions must sum to 1."""
        if len(fractions) != 3 or abs(sum(fractions) - 1.0) > 1e-9:
            raise InfeasibleSpec("user/item/external fractions must sum to 1")
        counts = [int(round(total_nodes * f)) for f in fractions]
        edges = target_total_edges if target_total_edges is not None else int(round(total_nodes * EDGES_PER_NODE))
        return cls(*counts, edges, **kw)


def table3_spec(total_nodes: int, seed: int = 0, scale: float = 1.0, **kw) -> SynthSpec:
    """Preset matching the reference synthetic-graph table.

    Class counts are the reference graph's class shares of its stated
    total, floored; edges grow at a fixed 55.9734 per nominal node.
    ``scale`` shrinks node counts and edges proportionally for quick runs.
    """
    nominal = total_nodes * scale
    counts = [max(1, math.floor(nominal * c / ML1M_TOTAL)) for c in (ML1M_USERS, ML1M_ITEMS, ML1M_EXTERNAL)]
    return SynthSpec(*counts, int(round(nominal * EDGES_PER_NODE)), seed=seed, **kw)


@dataclass(frozen=True, eq=False)
class SyntheticTables:
    """Raw generated data: node labels/kinds, ratings and item-entity links."""

    labels: list[str]
    kinds: np.ndarray
    rating_user: np.ndarray
    rating_item: np.ndarray
    rating_value: np.ndarray
    rating_time: np.ndarray
    link_item: np.ndarray
    link_entity: np.ndarray

    def ratings(self) -> Iterable[RatingRecord]:
        lab = self.labels
        for u, i, r, t in zip(self.rating_user.tolist(), self.rating_item.tolist(),
                              self.rating_value.tolist(), self.rating_time.tolist()):
            yield RatingRecord(lab[u], lab[i], float(r), int(t))

    def triples(self) -> Iterable[tuple[str, str, str]]:
        lab = self.labels
        for i, e in zip(self.link_item.tolist(), self.link_entity.tolist()):
            yield lab[i], "has_attribute", lab[e]

    def kind_rows(self) -> Iterable[tuple[str, NodeKind]]:
        return zip(self.labels, (NodeKind(int(k)) for k in self.kinds))


def _split_degrees(total: int, n: int, cap: int, spread: float, rng: np.random.Generator) -> np.ndarray:
    """Integer degrees summing to ``total``, lognormal around the mean, each in [1, cap]."""
    if total > n * cap or total < n:
        raise InfeasibleSpec(f"cannot place {total} edges on {n} nodes with degree cap {cap}")
    w = rng.lognormal(0.0, spread, n) if spread > 0 else np.ones(n)
    raw = w / w.sum() * total
    deg = np.clip(np.floor(raw).astype(np.int64), 1, cap)
    for _ in range(64):
        diff = total - int(deg.sum())
        if diff == 0:
            break
        if diff > 0:
            room = np.flatnonzero(deg < cap)
            frac = (raw - deg)[room]
            pick = room[np.argsort(-frac, kind="stable")[:diff]]
            deg[pick] += 1
        else:
            room = np.flatnonzero(deg > 1)
            frac = (raw - deg)[room]
            pick = room[np.argsort(frac, kind="stable")[: -diff]]
            deg[pick] -= 1
    if int(deg.sum()) != total:
        raise InfeasibleSpec("degree targets could not be balanced")
    return deg


def _wire(deg: np.ndarray, n_targets: int, skew: float, rng: np.random.Generator) -> np.ndarray:
    """For each source, ``deg[s]`` distinct targets drawn by a Zipf-like popularity."""
    pop = (1.0 + np.arange(n_targets)) ** -skew
    pop = pop[rng.permutation(n_targets)]
    pop /= pop.sum()
    out = np.empty(int(deg.sum()), dtype=np.int64)
    pos = 0
    for d in deg.tolist():
        if d >= n_targets:
            out[pos : pos + d] = np.arange(n_targets)
        else:
            out[pos : pos + d] = np.sort(rng.choice(n_targets, size=d, replace=False, p=pop))
        pos += d
    return out


def synthetic_tables(spec: SynthSpec) -> SyntheticTables:
    rng = np.random.default_rng(spec.seed)
    nu, ni, ne = spec.n_users, spec.n_items, spec.n_external
    udeg = _split_degrees(spec.user_item_edges, nu, ni, spec.degree_spread, rng)
    items = _wire(udeg, ni, spec.popularity_skew, rng)
    users = np.repeat(np.arange(nu), udeg)
    ideg = _split_degrees(spec.item_external_edges, ni, ne, spec.degree_spread, rng)
    ents = _wire(ideg, ne, spec.popularity_skew, rng)
    link_items = np.repeat(np.arange(ni), ideg)

    values = rng.integers(1, 6, len(users)).astype(np.float64)
    lo, hi = spec.time_window
    times = rng.integers(lo, hi + 1, len(users))

    labels = [f"u{k}" for k in range(nu)] + [f"i{k}" for k in range(ni)] + [f"e{k}" for k in range(ne)]
    kinds = np.concatenate([
        np.full(nu, NodeKind.USER), np.full(ni, NodeKind.ITEM), np.full(ne, NodeKind.EXTERNAL)
    ]).astype(np.int8)
    return SyntheticTables(labels, kinds, users, items + nu, values, times,
                           link_items + nu, ents + nu + ni)


def graph_from_tables(tables: SyntheticTables, params: WeightParams = WeightParams()) -> KnowledgeGraph:
    """Vectorised equivalent of :func:`kgsumm.graph.build_graph` for generated data."""
    t0 = params.t0 if params.t0 is not None else int(tables.rating_time.max(initial=0))
    params = WeightParams(params.beta1, params.beta2, params.gamma, t0)
    rec = np.exp(-params.gamma * (t0 - tables.rating_time)) if params.gamma else np.ones(len(tables.rating_time))
    w_rating = params.beta1 * tables.rating_value + params.beta2 * rec
    src = np.concatenate([tables.rating_user, tables.link_item])
    dst = np.concatenate([tables.rating_item, tables.link_entity])
    weight = np.concatenate([w_rating, np.zeros(len(tables.link_item))])
    rels = [None] * len(tables.rating_user) + ["has_attribute"] * len(tables.link_item)
    return KnowledgeGraph(tables.labels, tables.kinds, src, dst, weight, rels, params)


def generate_synthetic(spec: SynthSpec, params: WeightParams = WeightParams()) -> KnowledgeGraph:
    return graph_from_tables(synthetic_tables(spec), params)


def generate_random_paths(
    g: KnowledgeGraph,
    users: Iterable[int],
    k: int,
    length: int = 3,
    seed: int = 0,
    max_tries: int = 200,
) -> ExplanationPathSet:
    """Random simple walks of exactly ``length`` edges from each user to distinct items.

    Walks ignore edge direction and restart on dead ends; a user gets fewer
    than ``k`` paths only if ``max_tries * k`` walks could not find more.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    uv = g.undirected
    indptr, nbr = uv.indptr, uv.nbr
    kinds = g.kinds
    out: list[ExplanationPath] = []
    for u in users:
        u = int(u)
        if indptr[u] == indptr[u + 1]:
            raise IsolatedUser(f"user {g.labels[u]!r} has no edges", user=g.labels[u])
        rng = np.random.default_rng([seed, u])
        found: list[tuple[int, ...]] = []
        ends: set[int] = set()
        for _ in range(max_tries * k):
            if len(found) == k:
                break
            walk = [u]
            for _step in range(length):
                v = walk[-1]
                lo, hi = indptr[v], indptr[v + 1]
                if hi == lo:
                    break
                # a few draws usually find an unvisited neighbour
                for _draw in range(8):
                    w = int(nbr[lo + rng.integers(hi - lo)])
                    if w not in walk:
                        walk.append(w)
                        break
                else:
                    break
            if len(walk) != length + 1:
                continue
            end = walk[-1]
            if kinds[end] != NodeKind.ITEM or end in ends:
                continue
            ends.add(end)
            found.append(tuple(walk))
        for rank, nodes in enumerate(found, start=1):
            out.append(ExplanationPath(u, nodes[-1], nodes, rank))
    return ExplanationPathSet(tuple(out))


def user_degrees(g: KnowledgeGraph) -> np.ndarray:
    """Number of ratings per node (zero for non-users)."""
    return np.bincount(g.src[g.is_rating], minlength=g.num_nodes)


def item_popularity(g: KnowledgeGraph) -> np.ndarray:
    """Number of users who rated each node (zero for non-items)."""
    return np.bincount(g.dst[g.is_rating], minlength=g.num_nodes)


def sample_users(
    g: KnowledgeGraph,
    attributes: Mapping[int, str],
    n_per_stratum: int,
    strata: Sequence[str] | None = None,
    seed: int = 0,
) -> list[int]:
    """Stratified user sample that keeps each stratum's rating-count profile.

    Within a stratum users are sorted by rating count and picked at
    jittered evenly spaced quantiles, so the sample's degree distribution
    follows the stratum's.
    """
    if strata is None:
        strata = sorted(set(attributes.values()))
    deg = user_degrees(g)
    chosen: list[int] = []
    for si, stratum in enumerate(strata):
        pop = sorted((v for v, s in attributes.items() if s == stratum), key=lambda v: (deg[v], v))
        n = len(pop)
        if n_per_stratum > n:
            raise InsufficientPopulation(
                f"stratum {stratum!r} has {n} users, {n_per_stratum} requested", stratum=stratum
            )
        if n_per_stratum == n:
            chosen.extend(pop)
            continue
        rng = np.random.default_rng([seed, si])
        taken: set[int] = set()
        for j in range(n_per_stratum):
            q = (j + rng.random()) / n_per_stratum
            idx = min(n - 1, int(q * n))
            step = 0
            while True:
                free = [c for c in (idx - step, idx + step) if 0 <= c < n and c not in taken]
                if free:
                    idx = free[0]
                    break
                step += 1
            taken.add(idx)
        chosen.extend(pop[i] for i in sorted(taken))
    return chosen


def sample_items_by_popularity(
    g: KnowledgeGraph, n_top: int, n_bottom: int, seed: int = 0
) -> list[tuple[int, str]]:
    """Most and least rated items, labelled ``popular`` / ``unpopular``.

    Ranking is deterministic (ties by node id); ``seed`` is accepted for
    interface symmetry with the user sampler.
    """
    items = g.nodes_of_kind(NodeKind.ITEM)
    if n_top < 0 or n_bottom < 0 or n_top + n_bottom > len(items):
        raise InsufficientPopulation(f"{n_top}+{n_bottom} items requested, {len(items)} available")
    pop = item_popularity(g)[items]
    ranked = items[np.lexsort((items, -pop))].tolist()
    top = ranked[:n_top]
    rest = items[np.lexsort((items, pop))].tolist()
    top_set = set(top)
    bottom = [v for v in rest if v not in top_set][:n_bottom]
    return [(v, "popular") for v in top] + [(v, "unpopular") for v in bottom]
