import csv
import json

import pytest

from conftest import TABLE1_SUMMARY_NODES, table1_dir
from kgsumm.cli import RunConfig, main, parse_k_range, run_benchmark


@pytest.fixture(scope="module")
def synth_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    assert main(["synth", "--nodes", "10000", "--scale", "0.1", "--seed", "3", "--path-users", "6",
                 "--k", "1..10", "--out", str(d)]) == 0
    return d


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_k_range():
    assert parse_k_range("1..10") == tuple(range(1, 11))
    assert parse_k_range("3") == (3,)
    assert parse_k_range("5,1,3") == (1, 3, 5)
    with pytest.raises(ValueError):
        parse_k_range("0..3")


def test_build(capsys):
    assert main(["build", "--graph", str(table1_dir())]) == 0
    stats = json.loads(capsys.readouterr().out)
    assert stats["nodes"] == 12 and stats["edges"] == 14


def test_table1_invocation(tmp_path):
    d = table1_dir()
    assert main(["summarize", "--graph", str(d), "--paths", str(d / "paths.jsonl"), "--subject", "User 1",
                 "--k", "3", "--method", "st", "--lambda", "1", "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "user" / "st" / "User_1" / "k03.json").read_text())
    assert set(out["nodes"]) == TABLE1_SUMMARY_NODES and len(out["edges"]) == 6


def test_unknown_subject(tmp_path, capsys):
    d = table1_dir()
    code = main(["summarize", "--graph", str(d), "--paths", str(d / "paths.jsonl"), "--subject", "u94",
                 "--out", str(tmp_path)])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "EmptyScenario"


def test_io_error(tmp_path, capsys):
    assert main(["build", "--graph", str(tmp_path / "missing")]) == 1
    assert json.loads(capsys.readouterr().err)["error"] == "IOError"


def test_k_beyond_paths(tmp_path, capsys):
    d = table1_dir()
    code = main(["summarize", "--graph", str(d), "--paths", str(d / "paths.jsonl"), "--subject", "User 1",
                 "--k", "1..5", "--out", str(tmp_path)])
    assert code == 2
    assert json.loads(capsys.readouterr().err)["error"] == "InvalidScenario"


def test_env_output_dir(tmp_path, monkeypatch):
    d = table1_dir()
    monkeypatch.setenv("KGSUMM_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["summarize", "--graph", str(d), "--paths", str(d / "paths.jsonl"), "--subject", "User 1"]) == 0
    assert len(list((tmp_path / "env").rglob("*.json"))) == 3


def test_summarize_and_evaluate_series(synth_dir, tmp_path):
    user = (synth_dir / "users.txt").read_text().split()[0]
    out = tmp_path / "s"
    assert main(["summarize", "--graph", str(synth_dir), "--paths", str(synth_dir / "paths.jsonl"),
                 "--subject", user, "--k", "1..10", "--method", "both", "--lambda", "1", "--out", str(out)]) == 0
    st_files = sorted((out / "user" / "st").rglob("*.json"))
    assert len(st_files) == 10
    assert len(list((out / "user" / "pcst").rglob("*.json"))) == 10
    ev = tmp_path / "ev"
    assert main(["evaluate", "--graph", str(synth_dir), "--summaries", str(out / "user" / "st"),
                 "--out", str(ev)]) == 0
    rows = _rows(ev / "metrics.csv")
    assert list(rows[0]) == ["scenario", "method", "k", "lambda", "group", "metric", "value"]
    per_metric = {}
    for r in rows:
        per_metric[r["metric"]] = per_metric.get(r["metric"], 0) + 1
    assert per_metric == {"comprehensibility": 10, "actionability": 10, "diversity": 10, "redundancy": 10,
                          "relevance": 10, "privacy": 10, "consistency": 1}
    cons = [r for r in rows if r["metric"] == "consistency"][0]
    assert cons["k"] == "" and 0 <= float(cons["value"]) <= 1
    payload = json.loads((ev / "metrics.json").read_text())
    assert len(payload["aggregate"]) == len(rows)


def test_evaluate_missing_member(synth_dir, tmp_path, capsys):
    user = (synth_dir / "users.txt").read_text().split()[0]
    out = tmp_path / "s"
    assert main(["summarize", "--graph", str(synth_dir), "--paths", str(synth_dir / "paths.jsonl"),
                 "--subject", user, "--k", "1,2,4", "--out", str(out)]) == 0
    assert main(["evaluate", "--graph", str(synth_dir), "--summaries", str(out), "--out", str(tmp_path)]) == 2
    assert json.loads(capsys.readouterr().err)["error"] == "SeriesTooShort"


def test_baseline_and_groups(synth_dir, tmp_path):
    users = (synth_dir / "users.txt").read_text().split()
    groups = tmp_path / "groups.tsv"
    groups.write_text("".join(f"{u}\t{'a' if n % 2 else 'b'}\n" for n, u in enumerate(users)))
    subjects = tmp_path / "subjects.txt"
    subjects.write_text("\n".join(users) + "\n")
    assert main(["baseline-evaluate", "--graph", str(synth_dir), "--paths", str(synth_dir / "paths.jsonl"),
                 "--subjects-file", str(subjects), "--groups", str(groups), "--name", "random",
                 "--k", "1..10", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "metrics.csv")
    assert {r["method"] for r in rows} == {"baseline:random"}
    assert {r["group"] for r in rows} == {"a", "b"}
    comp = {(r["group"], r["k"]): float(r["value"]) for r in rows if r["metric"] == "comprehensibility"}
    # every baseline path has 3 edges, so k paths have 3k edges
    assert comp[("a", "4")] == pytest.approx(1 / 12)
    assert sum(r["metric"] == "consistency" for r in rows) == 2


def test_sample_items_groups(synth_dir, tmp_path):
    assert main(["sample", "--graph", str(synth_dir), "--top", "3", "--bottom", "2", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "groups.tsv").read_text().splitlines()
    assert [ln.split("\t")[1] for ln in lines] == ["popular"] * 3 + ["unpopular"] * 2
    assert len((tmp_path / "subjects.txt").read_text().split("\n")) == 6


def test_sample_users(synth_dir, tmp_path):
    attrs = tmp_path / "attrs.tsv"
    users = [ln.split("\t")[0] for ln in (synth_dir / "kinds.tsv").read_text().splitlines() if ln.endswith("user")]
    attrs.write_text("".join(f"{u}\t{'m' if n % 2 else 'f'}\n" for n, u in enumerate(users)))
    assert main(["sample", "--graph", str(synth_dir), "--per-stratum", "5", "--attributes", str(attrs),
                 "--out", str(tmp_path)]) == 0
    labels = [ln.split("\t")[1] for ln in (tmp_path / "groups.tsv").read_text().splitlines()]
    assert labels.count("m") == 5 and labels.count("f") == 5


def test_benchmark_group_sizes(tmp_path):
    cfg = RunConfig("benchmark", graph_sizes=(10_000,), scale=0.1, group_sizes=(2, 3, 4, 5), k=(3,),
                    method="both", repeats=1, out=tmp_path)
    rows = run_benchmark(cfg)
    assert len(rows) == 4 * 2
    assert all(r["median_ms"] >= 0 and r["peak_memory_bytes"] > 0 for r in rows)


def test_benchmark_cli_graph_sweep(tmp_path):
    assert main(["benchmark", "--graph-sizes", "10000,15000,20000,25000,30000", "--scale", "0.1",
                 "--group-sizes", "2", "--k", "2", "--method", "both", "--repeats", "1", "--no-memory",
                 "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "benchmark.csv")
    assert len(rows) == 5 * 2
    assert [int(r["graph_nodes"]) for r in rows[::2]] == sorted(int(r["graph_nodes"]) for r in rows[::2])


def test_outputs_reproducible(synth_dir, tmp_path):
    users = (synth_dir / "users.txt").read_text().split()[:3]
    outs = []
    for rep in range(2):
        out = tmp_path / f"r{rep}"
        args = ["summarize", "--graph", str(synth_dir), "--paths", str(synth_dir / "paths.jsonl"),
                "--scenario", "user-group", "--k", "1..4", "--method", "both", "--out", str(out)]
        for u in users:
            args += ["--subject", u]
        assert main(args) == 0
        assert main(["evaluate", "--graph", str(synth_dir), "--summaries", str(out / "user-group"),
                     "--out", str(out / "ev")]) == 0
        outs.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    assert outs[0] == outs[1] and len(outs[0]) == 10
