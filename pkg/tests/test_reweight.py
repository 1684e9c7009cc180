import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kgsumm.errors import EmptyScenario
from kgsumm.graph import NodeKind, RatingRecord, build_graph
from kgsumm.paths import ExplanationPathSet, ScenarioKind, ScenarioSpec, derive_scenario, make_path
from kgsumm.reweight import ReweightParams, adjust_weights, edge_coverage

KINDS = [("u1", NodeKind.USER), ("u2", NodeKind.USER), ("i1", NodeKind.ITEM), ("i2", NodeKind.ITEM),
         ("i3", NodeKind.ITEM), ("g", NodeKind.EXTERNAL)]


@pytest.fixture(scope="module")
def g():
    ratings = [RatingRecord("u1", "i1", 2, 0), RatingRecord("u1", "i2", 1, 0), RatingRecord("u2", "i2", 4, 0),
               RatingRecord("u2", "i3", 5, 0)]
    return build_graph(ratings, [("i1", "genre", "g"), ("i3", "genre", "g")], KINDS)


def _scenario(g, kind, subject, specs, k=10):
    ps = ExplanationPathSet(tuple(make_path(g, [g.node_id(v) for v in nodes], r) for nodes, r in specs))
    return derive_scenario(ps, kind, [g.node_id(subject)], k)


def _eid(g, a, b):
    return g.edge_for_step(g.node_id(a), g.node_id(b))


def test_lambda_zero_keeps_base(g):
    spec = _scenario(g, "user", "u1", [(["u1", "i1"], 1), (["u1", "i2"], 2)])
    w = adjust_weights(g, spec, ReweightParams(lam=0.0, floor=0.0))
    assert np.array_equal(w.weights, g.base_weight)
    w = adjust_weights(g, spec, ReweightParams(lam=0.0))
    assert np.array_equal(w.weights, g.base_weight + 1e-6)


def test_half_coverage(g):
    # u1 -> i1 lies on the path to i1 only: c = 1 of 2 targets
    spec = _scenario(g, "user", "u1", [(["u1", "i1"], 1), (["u1", "i2"], 2)])
    w = adjust_weights(g, spec, ReweightParams(lam=1.0, floor=0.0))
    e = _eid(g, "u1", "i1")
    assert g.base_weight[e] == 2.0
    assert w.weights[e] == pytest.approx(3.0, abs=1e-12)


def test_full_coverage_lambda_100(g):
    # the edge i2 - u2 lies on both paths of item i2's scenario
    spec = _scenario(g, "item", "i2", [(["u1", "i2"], 1), (["u2", "i2"], 1), (["u1", "i1", "g", "i3", "u2", "i2"], 2)])
    assert len(spec.targets) == 2
    cov = edge_coverage(g, spec)
    e_u2i2 = _eid(g, "u2", "i2")
    assert cov[e_u2i2] == 2
    gg = build_graph([RatingRecord("u1", "i1", 1, 0), RatingRecord("u2", "i1", 1, 0)], [], KINDS)
    spec2 = _scenario(gg, "item", "i1", [(["u1", "i1"], 1), (["u2", "i1"], 1), (["u2", "i1"], 2)])
    w = adjust_weights(gg, spec2, ReweightParams(lam=100.0, floor=0.0))
    assert w.weights.tolist() == [51.0, 51.0]
    spec3 = _scenario(gg, "item", "i1", [(["u1", "i1"], 1)])
    assert adjust_weights(gg, spec3, ReweightParams(lam=100.0, floor=0.0)).weights[0] == pytest.approx(101.0, abs=1e-12)


def test_direction_insensitive_and_per_target(g):
    spec = _scenario(g, "user", "u1", [(["u1", "i1", "g", "i3"], 1), (["u1", "i2", "u2", "i3"], 2),
                                       (["u1", "i2"], 3)])
    cov = edge_coverage(g, spec)
    assert cov[_eid(g, "i3", "g")] == 1            # traversed g -> i3 against direction
    assert cov[_eid(g, "u1", "i2")] == 2           # two targets (i3 and i2) use it
    per_path = edge_coverage(g, spec, "per-path")
    assert per_path[_eid(g, "u1", "i2")] == 2
    spec_dup = _scenario(g, "user", "u1", [(["u1", "i2", "u2", "i3"], 1), (["u1", "i1", "g", "i3"], 1)])
    assert edge_coverage(g, spec_dup)[_eid(g, "u1", "i2")] == 1
    assert edge_coverage(g, spec_dup, "per-path").max() == 1
    spec_rep = _scenario(g, "user", "u1", [(["u1", "i2"], 1), (["u1", "i1", "g", "i3", "u2", "i2"], 1)])
    assert edge_coverage(g, spec_rep)[_eid(g, "u1", "i2")] == 1


def test_floor_lifts_covered_attribute_edges(g):
    spec = _scenario(g, "user", "u1", [(["u1", "i1", "g", "i3"], 1)])
    w = adjust_weights(g, spec, ReweightParams(lam=1.0))
    covered = _eid(g, "i1", "g")
    assert w.weights[covered] > 1e-6
    assert g.base_weight[covered] == 0.0
    assert w.weights[covered] == pytest.approx(2e-6)


def test_empty_targets(g):
    spec = ScenarioSpec(ScenarioKind.USER, frozenset({0}), frozenset(), 1, ExplanationPathSet(()))
    with pytest.raises(EmptyScenario):
        adjust_weights(g, spec)


def test_params_validation():
    with pytest.raises(ValueError):
        ReweightParams(lam=-1)
    with pytest.raises(ValueError):
        ReweightParams(count_mode="sometimes")


ALL_PATHS = [["u1", "i1"], ["u1", "i2"], ["u1", "i1", "g", "i3"], ["u1", "i2", "u2", "i3"], ["u1", "i2", "u2", "i2"]]


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=4, unique=True),
       st.floats(0, 50), st.floats(0, 50))
def test_lambda_monotone_and_bounded(g, chosen, lam1, lam2):
    specs = [(ALL_PATHS[i], r) for r, i in enumerate(chosen, start=1)]
    spec = _scenario(g, "user", "u1", specs)
    lo, hi = sorted((lam1, lam2))
    w_lo = adjust_weights(g, spec, ReweightParams(lo, floor=0.0)).weights
    w_hi = adjust_weights(g, spec, ReweightParams(hi, floor=0.0)).weights
    frac = edge_coverage(g, spec) / len(spec.targets)
    assert np.all((0 <= frac) & (frac <= 1))
    assert np.all(w_lo <= w_hi)
    assert np.all(w_hi >= g.base_weight)
    assert np.all(w_hi <= g.base_weight * (1 + hi) + 1e-9)
    if hi - lo > 1e-6:
        strict = (w_lo < w_hi)
        assert np.array_equal(strict, (frac > 0) & (g.base_weight > 0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=3, unique=True), st.integers(0, 3))
def test_adding_path_never_decreases_coverage(g, chosen, extra):
    base = [(ALL_PATHS[i], r) for r, i in enumerate(chosen, start=1)]
    spec_a = _scenario(g, "user", "u1", base)
    spec_b = _scenario(g, "user", "u1", base + [(ALL_PATHS[extra], len(base) + 1)])
    if spec_a.targets == spec_b.targets:
        assert np.all(edge_coverage(g, spec_a) <= edge_coverage(g, spec_b))
