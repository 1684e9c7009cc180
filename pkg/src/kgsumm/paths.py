"""Explanation paths and the four summarization scenarios."""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import IO, Iterable

from .errors import DegenerateTerminals, EmptyScenario, InvalidPath, InvalidScenario, ParseError
from .graph import KnowledgeGraph, NodeKind

log = logging.getLogger(__name__)


class ScenarioKind(str, enum.Enum):
    USER = "user"
    ITEM = "item"
    USER_GROUP = "user-group"
    ITEM_GROUP = "item-group"

    @property
    def user_side(self) -> bool:
        """True when subjects are users and targets are recommended items."""
        return self in (ScenarioKind.USER, ScenarioKind.USER_GROUP)

    @property
    def is_group(self) -> bool:
        return self in (ScenarioKind.USER_GROUP, ScenarioKind.ITEM_GROUP)


@dataclass(frozen=True)
class ExplanationPath:
    user: int
    item: int
    nodes: tuple[int, ...]
    rank: int

    @property
    def steps(self) -> list[tuple[int, int]]:
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    def __len__(self) -> int:
        return len(self.nodes) - 1


@dataclass(frozen=True)
class ExplanationPathSet:
    paths: tuple[ExplanationPath, ...] = ()
    rejected: tuple[tuple[int, str], ...] = field(default=(), compare=False)

    @property
    def K(self) -> int:
        return max((p.rank for p in self.paths), default=0)

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


def make_path(g: KnowledgeGraph, nodes: Iterable[int], rank: int) -> ExplanationPath:
    """Validate a node sequence against ``g`` and wrap it."""
    nodes = tuple(int(v) for v in nodes)
    if len(nodes) < 2:
        raise InvalidPath("a path needs at least one edge")
    if rank < 1:
        raise InvalidPath(f"rank must be positive, got {rank}")
    if g.kinds[nodes[0]] != NodeKind.USER or g.kinds[nodes[-1]] != NodeKind.ITEM:
        raise InvalidPath("paths must start at a user and end at an item")
    return ExplanationPath(nodes[0], nodes[-1], nodes, rank)


def parse_paths(stream: IO[str], g: KnowledgeGraph) -> ExplanationPathSet:
    """Read JSONL explanation paths.

    Each line is ``{"user": .., "item": .., "nodes": [..], "rank": ..}`` with
    node ids as declared in the graph.  Lines whose steps are not graph
    edges, or which mention unknown nodes, are skipped and recorded in
    ``rejected``; malformed lines and endpoint mismatches raise.
    """
    paths: list[ExplanationPath] = []
    rejected: list[tuple[int, str]] = []
    rank_item: dict[tuple[int, int], int] = {}
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            labels = [str(v) for v in obj["nodes"]]
            user, item, rank = str(obj["user"]), str(obj["item"]), int(obj["rank"])
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"line {lineno}: {exc}", line=lineno) from None
        if not labels or labels[0] != user or labels[-1] != item:
            raise InvalidPath(f"line {lineno}: nodes must run from user to item", line=lineno)
        missing = [lab for lab in labels if lab not in g.index]
        if missing:
            rejected.append((lineno, f"unknown node {missing[0]!r}"))
            continue
        ids = [g.index[lab] for lab in labels]
        try:
            path = make_path(g, ids, rank)
        except InvalidPath as exc:
            raise InvalidPath(f"line {lineno}: {exc}", line=lineno) from None
        bad = next(((a, b) for a, b in path.steps if not g.has_link(a, b)), None)
        if bad is not None:
            rejected.append((lineno, f"no edge {g.labels[bad[0]]!r} - {g.labels[bad[1]]!r}"))
            continue
        prev = rank_item.setdefault((path.user, rank), path.item)
        if prev != path.item:
            raise InvalidPath(f"line {lineno}: rank {rank} already used for another item", line=lineno)
        paths.append(path)
    for lineno, reason in rejected:
        log.warning("path on line %d rejected: %s", lineno, reason)
    return ExplanationPathSet(tuple(paths), tuple(rejected))


def dump_paths(paths: ExplanationPathSet, g: KnowledgeGraph, stream: IO[str]) -> None:
    for p in paths:
        rec = {
            "user": g.labels[p.user],
            "item": g.labels[p.item],
            "nodes": [g.labels[v] for v in p.nodes],
            "rank": p.rank,
        }
        stream.write(json.dumps(rec, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class ScenarioSpec:
    """A summarization scenario.

    ``targets`` is the set the edge-coverage normaliser runs over: the
    recommended items for user scenarios, the users an item is
    recommended to for item scenarios.
    """

    kind: ScenarioKind
    subjects: frozenset[int]
    targets: frozenset[int]
    k: int
    path_subset: ExplanationPathSet

    def target_of(self, path: ExplanationPath) -> int:
        return path.item if self.kind.user_side else path.user


@dataclass(frozen=True)
class TerminalSet:
    terminals: frozenset[int]

    def __len__(self) -> int:
        return len(self.terminals)

    def __iter__(self):
        return iter(sorted(self.terminals))

    def __contains__(self, v) -> bool:
        return v in self.terminals


def derive_scenario(
    paths: ExplanationPathSet,
    kind: ScenarioKind | str,
    subjects: Iterable[int],
    k: int,
) -> ScenarioSpec:
    kind = ScenarioKind(kind)
    subjects = frozenset(int(s) for s in subjects)
    if not subjects:
        raise InvalidScenario("subjects must be non-empty")
    if not kind.is_group and len(subjects) != 1:
        raise InvalidScenario(f"{kind.value} scenario takes exactly one subject")
    if k < 1:
        raise InvalidScenario(f"k must be >= 1, got {k}")
    if kind.user_side:
        subset = [p for p in paths if p.rank <= k and p.user in subjects]
        targets = frozenset(p.item for p in subset)
    else:
        subset = [p for p in paths if p.rank <= k and p.item in subjects]
        targets = frozenset(p.user for p in subset)
    if not subset:
        raise EmptyScenario(f"no paths with rank <= {k} for the given {kind.value} subjects")
    return ScenarioSpec(kind, subjects, targets, k, ExplanationPathSet(tuple(subset)))


def terminal_set(spec: ScenarioSpec) -> TerminalSet:
    terminals = spec.subjects | spec.targets
    if len(terminals) < 2:
        raise DegenerateTerminals("a summary needs at least two terminals")
    return TerminalSet(frozenset(terminals))
