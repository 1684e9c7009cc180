import io
import json

import pytest
from hypothesis import given, settings, strategies as st

from conftest import TABLE1_TERMINALS
from kgsumm.errors import DegenerateTerminals, EmptyScenario, InvalidPath, InvalidScenario, ParseError
from kgsumm.graph import NodeKind, RatingRecord, build_graph
from kgsumm.paths import (
    ExplanationPathSet,
    ScenarioKind,
    ScenarioSpec,
    derive_scenario,
    dump_paths,
    make_path,
    parse_paths,
    terminal_set,
)


@pytest.fixture(scope="module")
def g():
    kinds = [("u1", NodeKind.USER), ("u2", NodeKind.USER), ("u3", NodeKind.USER),
             ("i1", NodeKind.ITEM), ("i2", NodeKind.ITEM), ("i9", NodeKind.ITEM), ("x", NodeKind.EXTERNAL)]
    ratings = [RatingRecord(u, i, 3, 0) for u, i in
               [("u1", "i1"), ("u1", "i2"), ("u1", "i9"), ("u2", "i9"), ("u3", "i2")]]
    return build_graph(ratings, [("i1", "genre", "x"), ("i2", "genre", "x")], kinds)


def _line(user, item, nodes, rank):
    return json.dumps({"user": user, "item": item, "nodes": nodes, "rank": rank}) + "\n"


def _parse(g, *lines):
    return parse_paths(io.StringIO("".join(lines)), g)


def test_parse_single(g):
    ps = _parse(g, _line("u1", "i1", ["u1", "i1"], 4))
    assert len(ps) == 1 and ps.K == 4
    assert ps.paths[0].nodes == (g.node_id("u1"), g.node_id("i1"))


def test_parse_empty(g):
    ps = _parse(g)
    assert len(ps) == 0 and ps.K == 0


def test_parse_ten_ranks(g):
    lines = [_line("u1", "i1" if r % 2 else "i2", ["u1", "i1" if r % 2 else "i2"], r) for r in range(1, 11)]
    # odd ranks reuse i1: one item per (user, rank) is all that is required
    assert _parse(g, *lines).K == 10


def test_parse_traverses_edges_backwards(g):
    # u1 -> i1 -> x <- i2 : the last step runs against edge direction
    ps = _parse(g, _line("u1", "i2", ["u1", "i1", "x", "i2"], 1))
    assert len(ps) == 1 and not ps.rejected


def test_parse_rejects_non_edges_per_line(g, caplog):
    ps = _parse(
        g,
        _line("u1", "i1", ["u1", "i1"], 1),
        _line("u1", "i2", ["u1", "x", "i2"], 2),
        _line("u1", "i9", ["u1", "ghost", "i9"], 3),
    )
    assert len(ps) == 1
    assert [ln for ln, _ in ps.rejected] == [2, 3]
    assert "line 2" in caplog.text


def test_parse_errors(g):
    with pytest.raises(ParseError) as err:
        _parse(g, _line("u1", "i1", ["u1", "i1"], 1), "{not json\n")
    assert err.value.details["line"] == 2
    with pytest.raises(InvalidPath):
        _parse(g, _line("i1", "u1", ["i1", "u1"], 1))
    with pytest.raises(InvalidPath):
        _parse(g, _line("u1", "i1", ["u1", "i2"], 1))
    with pytest.raises(InvalidPath):
        _parse(g, _line("u1", "i1", ["u1", "i1"], 1), _line("u1", "i2", ["u1", "i2"], 1))


def test_dump_roundtrip(g):
    text = _line("u1", "i2", ["u1", "i1", "x", "i2"], 1) + _line("u2", "i9", ["u2", "i9"], 2)
    ps = _parse(g, text)
    buf = io.StringIO()
    dump_paths(ps, g, buf)
    assert _parse(g, buf.getvalue()).paths == ps.paths


def _paths(g, *specs):
    return ExplanationPathSet(tuple(make_path(g, [g.node_id(v) for v in nodes], r) for nodes, r in specs))


def test_user_centric_targets(g):
    ps = _paths(g, (["u1", "i1"], 1), (["u1", "i2"], 2))
    u1, i1, i2 = g.node_id("u1"), g.node_id("i1"), g.node_id("i2")
    assert derive_scenario(ps, "user", [u1], 2).targets == {i1, i2}
    assert derive_scenario(ps, "user", [u1], 1).targets == {i1}
    assert terminal_set(derive_scenario(ps, "user", [u1], 2)).terminals == {u1, i1, i2}


def test_item_centric_targets(g):
    ps = _paths(g, (["u1", "i9"], 3), (["u2", "i9"], 1), (["u1", "i1"], 1))
    spec = derive_scenario(ps, ScenarioKind.ITEM, [g.node_id("i9")], 10)
    assert spec.targets == {g.node_id("u1"), g.node_id("u2")}
    assert len(spec.path_subset) == 2


def test_item_group_terminals(g):
    ps = _paths(g, (["u1", "i1"], 1), (["u3", "i2"], 1), (["u1", "i2"], 2), (["u2", "i9"], 1))
    # u2 -> i9 is outside F; u1, u3 reach F
    spec = derive_scenario(ps, "item-group", [g.node_id("i1"), g.node_id("i2")], 2)
    assert spec.targets == {g.node_id("u1"), g.node_id("u3")}
    assert len(terminal_set(spec)) == 4
    ps2 = _paths(g, (["u1", "i1"], 1), (["u3", "i2"], 1), (["u2", "i9"], 1), (["u2", "x", "i2"], 2))
    spec2 = derive_scenario(ps2, "item-group", [g.node_id("i1"), g.node_id("i2")], 2)
    assert len(terminal_set(spec2)) == 5


def test_user_group_union(g):
    ps = _paths(g, (["u1", "i1"], 1), (["u2", "i9"], 1), (["u3", "i2"], 1))
    spec = derive_scenario(ps, "user-group", [g.node_id("u1"), g.node_id("u2")], 1)
    assert spec.targets == {g.node_id("i1"), g.node_id("i9")}


def test_duplicate_target_paths_kept(g):
    ps = _paths(g, (["u1", "i2"], 1), (["u1", "i1", "x", "i2"], 1))
    spec = derive_scenario(ps, "user", [g.node_id("u1")], 1)
    assert spec.targets == {g.node_id("i2")}
    assert len(spec.path_subset) == 2


def test_scenario_errors(g):
    ps = _paths(g, (["u1", "i1"], 1))
    with pytest.raises(EmptyScenario):
        derive_scenario(ps, "user", [g.node_id("u2")], 5)
    with pytest.raises(InvalidScenario):
        derive_scenario(ps, "user", [g.node_id("u1"), g.node_id("u2")], 1)
    with pytest.raises(InvalidScenario):
        derive_scenario(ps, "user", [], 1)
    with pytest.raises(InvalidScenario):
        derive_scenario(ps, "user", [g.node_id("u1")], 0)


def test_degenerate_terminals(g):
    u1 = g.node_id("u1")
    spec = ScenarioSpec(ScenarioKind.USER, frozenset({u1}), frozenset({u1}), 1, ExplanationPathSet(()))
    with pytest.raises(DegenerateTerminals):
        terminal_set(spec)


def test_table1_terminals(table1):
    g, ps = table1
    spec = derive_scenario(ps, "user", [g.node_id("User 1")], 3)
    assert {g.labels[v] for v in terminal_set(spec)} == TABLE1_TERMINALS


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["u1", "u2", "u3"]), st.sampled_from(["i1", "i2", "i9"]),
                          st.integers(1, 6)), min_size=1, max_size=12),
       st.integers(1, 5))
def test_targets_monotone_in_k(g, triples, k):
    seen, specs = set(), []
    for u, i, r in triples:
        if (u, r) in seen or not g.has_link(g.node_id(u), g.node_id(i)):
            continue
        seen.add((u, r))
        specs.append(([u, i], r))
    if not specs:
        return
    ps = _paths(g, *specs)
    user = specs[0][0][0]
    uid = g.node_id(user)

    def targets(kk):
        try:
            return derive_scenario(ps, "user", [uid], kk).targets
        except EmptyScenario:
            return frozenset()

    assert targets(k) <= targets(k + 1)
