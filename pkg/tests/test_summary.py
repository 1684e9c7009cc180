import json

from conftest import plain_graph
from kgsumm.paths import derive_scenario, terminal_set
from kgsumm.reweight import adjust_weights
from kgsumm.steiner import steiner_summary
from kgsumm.summary import dumps_summary, make_summary, summary_from_dict, summary_to_dict


def test_json_roundtrip(table1):
    g, ps = table1
    spec = derive_scenario(ps, "user", [g.node_id("User 1")], 3)
    w = adjust_weights(g, spec)
    s = steiner_summary(g, w, terminal_set(spec))
    d = summary_to_dict(s, g, w.weights, k=3, lam=1.0, scenario="user", subjects=spec.subjects)
    assert list(d)[:4] == ["method", "scenario", "subjects", "k"]
    assert d["method"] == "st" and d["dropped_terminals"] == [] and d["lambda"] == 1.0
    assert d["nodes"] == sorted(d["nodes"]) and len(d["edges"]) == 6
    text = dumps_summary(d)
    back = summary_from_dict(json.loads(text), g)
    assert back == s
    assert dumps_summary(summary_to_dict(back, g, w.weights, k=3, lam=1.0, scenario="user",
                                         subjects=spec.subjects)) == text


def test_tree_checks():
    g, _ = plain_graph(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    assert make_summary(g, "x", [0, 1, 3], ()).is_tree(g)
    assert not make_summary(g, "x", [0, 1, 2], ()).is_tree(g)            # cycle
    assert not make_summary(g, "x", [0], (), extra_nodes=[3]).is_connected(g)
    assert make_summary(g, "x", [], ()).is_tree(g)
