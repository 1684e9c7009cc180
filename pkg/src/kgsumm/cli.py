"""Command-line interface and benchmark harness.

Exit codes: 0 on success, 1 on I/O errors, 2 on domain or usage errors.
Failures print one JSON object (``{"error": ..., "message": ...}``) on
stderr.  The output directory is ``--out`` if given, else the
``KGSUMM_OUTPUT_DIR`` environment variable, else the current directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import re
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import io as kio
from .errors import EmptyScenario, InvalidScenario, KGSummError, SeriesTooShort
from .graph import KnowledgeGraph, NodeKind, WeightParams
from .metrics import POINT_METRICS, REDUNDANCY_MODES, Explanation, consistency, evaluate, measure
from .paths import ExplanationPathSet, ScenarioKind, ScenarioSpec, derive_scenario, dump_paths, parse_paths, terminal_set
from .pcst import ALGOS, PrizeMode, assign_prizes, pcst_summary
from .reweight import COUNT_MODES, ReweightParams, adjust_weights
from .steiner import SteinerParams, steiner_summary
from .summary import SummarySubgraph, dumps_summary, summary_from_dict, summary_to_dict
from .synth import (
    TABLE3_TOTALS,
    generate_random_paths,
    generate_synthetic,
    graph_from_tables,
    sample_items_by_popularity,
    sample_users,
    synthetic_tables,
    table3_spec,
)

log = logging.getLogger("kgsumm")

OUTPUT_ENV = "KGSUMM_OUTPUT_DIR"
COMMANDS = ("build", "summarize", "evaluate", "baseline-evaluate", "benchmark", "synth", "sample")
METHODS = ("st", "pcst")
METRICS_HEADER = ("scenario", "method", "k", "lambda", "group", "metric", "value")
BENCH_HEADER = (
    "graph_nodes", "graph_edges", "scenario", "group_size", "k", "terminals", "method",
    "prize_mode", "rho", "repeats", "median_ms", "peak_memory_bytes",
    "summary_nodes", "summary_edges", "dropped_terminals",
)


@dataclass
class RunConfig:
    command: str
    graph: Path | None = None
    paths: Path | None = None
    scenario: str = "user"
    subjects: tuple[str, ...] = ()
    k: tuple[int, ...] | None = None
    method: str = "st"
    lam: float = 1.0
    beta1: float = 1.0
    beta2: float = 0.0
    gamma: float = 0.0
    t0: int | None = None
    attribute_weights: dict[str, float] = field(default_factory=dict)
    prize_mode: str = "unit"
    rho: float = 1.0
    epsilon: float = 1e-3
    eq1_count: str = "per-target"
    pcst_algo: str = "gw"
    redundancy_mode: str = "incidence"
    seed: int = 0
    out: Path | None = None
    # evaluate / baseline-evaluate
    summaries: Path | None = None
    groups: Path | None = None
    baseline_name: str = "baseline"
    # benchmark
    graph_sizes: tuple[int, ...] = (TABLE3_TOTALS[0],)
    scale: float = 1.0
    group_sizes: tuple[int, ...] = (10, 25, 50, 100)
    bench_rho: tuple[float | str, ...] = (1.0,)
    repeats: int = 5
    memory: bool = True
    # synth / sample
    nodes: int = TABLE3_TOTALS[0]
    path_users: int = 0
    path_length: int = 3
    attributes: Path | None = None
    per_stratum: int | None = None
    strata: tuple[str, ...] | None = None
    top: int | None = None
    bottom: int | None = None

    @property
    def methods(self) -> tuple[str, ...]:
        return METHODS if self.method == "both" else (self.method,)

    def weight_params(self) -> WeightParams:
        return WeightParams(self.beta1, self.beta2, self.gamma, self.t0)


def output_dir(cfg: RunConfig) -> Path:
    out = cfg.out if cfg.out is not None else Path(os.environ.get(OUTPUT_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def parse_k_range(text: str) -> tuple[int, ...]:
    """``"3"``, ``"1..10"`` or ``"1,2,5"``."""
    text = text.strip()
    if ".." in text:
        lo, hi = (int(x) for x in text.split("..", 1))
        values = range(lo, hi + 1)
    else:
        values = [int(x) for x in text.split(",") if x.strip()]
    out = tuple(sorted(set(values)))
    if not out or out[0] < 1:
        raise ValueError(f"invalid k range {text!r}")
    return out


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _rho_list(text: str) -> tuple[float | str, ...]:
    return tuple("k" if x.strip() == "k" else float(x) for x in text.split(",") if x.strip())


def _slug(label: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label).strip("_") or "node"


def _load_inputs(cfg: RunConfig) -> tuple[KnowledgeGraph, ExplanationPathSet]:
    g = kio.load_graph(cfg.graph, cfg.weight_params(), cfg.attribute_weights)
    with open(cfg.paths, encoding="utf-8") as fh:
        paths = parse_paths(fh, g)
    return g, paths


def _subject_ids(g: KnowledgeGraph, labels: Sequence[str]) -> list[int]:
    if not labels:
        raise InvalidScenario("no subjects given (use --subject or --subjects-file)")
    ids = []
    for label in labels:
        if label not in g.index:
            raise EmptyScenario(f"unknown subject {label!r}: no explanation paths", subject=label)
        ids.append(g.node_id(label))
    return ids


def _k_values(cfg: RunConfig, paths: ExplanationPathSet) -> tuple[int, ...]:
    if paths.K == 0:
        raise EmptyScenario("path file has no paths")
    ks = cfg.k or tuple(range(1, paths.K + 1))
    if ks[-1] > paths.K:
        raise InvalidScenario(f"k = {ks[-1]} exceeds the largest rank {paths.K} in the path file")
    return ks


def _units(kind: ScenarioKind, ids: list[int]) -> list[tuple[int, ...]]:
    """One scenario per subject, or a single one for group scenarios."""
    return [tuple(ids)] if kind.is_group else [(i,) for i in ids]


def summarize_spec(
    g: KnowledgeGraph, spec: ScenarioSpec, method: str, cfg: RunConfig, rho: float | None = None
) -> tuple[SummarySubgraph, np.ndarray, float | None]:
    """Summarize one scenario; returns the summary, the edge weights it used and its lambda."""
    T = terminal_set(spec)
    steiner = SteinerParams(cfg.epsilon)
    if method == "st":
        w = adjust_weights(g, spec, ReweightParams(cfg.lam, count_mode=cfg.eq1_count))
        return steiner_summary(g, w, T, steiner), w.weights, cfg.lam
    if method != "pcst":
        raise ValueError(f"method must be one of {METHODS} or 'both'")
    rho = cfg.rho if rho is None else rho
    if PrizeMode(cfg.prize_mode) is PrizeMode.WEIGHTED:
        w = adjust_weights(g, spec, ReweightParams(cfg.lam, count_mode=cfg.eq1_count))
        prizes = assign_prizes(g, w, T, PrizeMode.WEIGHTED, rho, steiner)
        return pcst_summary(g, prizes, cfg.pcst_algo), w.weights, cfg.lam
    prizes = assign_prizes(g, None, T, PrizeMode.UNIT, rho, steiner)
    return pcst_summary(g, prizes, cfg.pcst_algo), g.base_weight, None


def run_build(cfg: RunConfig) -> dict:
    g = kio.load_graph(cfg.graph, cfg.weight_params(), cfg.attribute_weights)
    stats = {
        "nodes": g.num_nodes,
        "edges": g.num_edges,
        "rating_edges": int(g.is_rating.sum()),
        "attribute_edges": int((~g.is_rating).sum()),
        "kinds": g.kind_counts(),
    }
    print(json.dumps(stats, sort_keys=True))
    return stats


def run_summarize(cfg: RunConfig) -> list[Path]:
    """Write one summary JSON per (method, subject unit, k)."""
    g, paths = _load_inputs(cfg)
    kind = ScenarioKind(cfg.scenario)
    ids = _subject_ids(g, cfg.subjects)
    ks = _k_values(cfg, paths)
    out = output_dir(cfg)
    written = []
    for unit in _units(kind, ids):
        unit_dir = "group" if kind.is_group else _slug(g.labels[unit[0]])
        for method in cfg.methods:
            d = out / kind.value / method / unit_dir
            d.mkdir(parents=True, exist_ok=True)
            for k in ks:
                spec = derive_scenario(paths, kind, unit, k)
                s, weights, lam = summarize_spec(g, spec, method, cfg)
                payload = summary_to_dict(s, g, weights, k=k, lam=lam, scenario=kind.value, subjects=unit)
                target = d / f"k{k:02d}.json"
                target.write_text(dumps_summary(payload), encoding="utf-8")
                written.append(target)
    for p in written:
        print(p)
    return written


def _group_of(subjects: Sequence[str], groups: dict[str, str] | None) -> str:
    if not groups:
        return "all"
    labels = sorted({groups.get(s, "unlabelled") for s in subjects})
    return "+".join(labels)


def _series_records(
    series: dict[tuple, dict[int, Explanation]],
    reports: dict[tuple, dict[int, Any]],
    groups: dict[str, str] | None,
) -> list[dict]:
    """Per-subject metric records: point metrics per k plus one consistency value per series."""
    records = []
    for key in sorted(series, key=repr):
        scenario, method, lam, subjects, _params = key
        group = _group_of(subjects, groups)
        base = {"scenario": scenario, "method": method, "lambda": lam, "group": group,
                "subjects": list(subjects)}
        by_k = series[key]
        for k in sorted(by_k):
            report = reports[key][k]
            for metric in POINT_METRICS:
                value = getattr(report, metric)
                if value is not None:
                    records.append({**base, "k": k, "metric": metric, "value": float(value)})
        ks = sorted(by_k)
        if len(ks) >= 2:
            if ks != list(range(ks[0], ks[-1] + 1)):
                missing = sorted(set(range(ks[0], ks[-1] + 1)) - set(ks))
                raise SeriesTooShort(f"series {subjects} for {method} is missing k = {missing}")
            value = consistency([by_k[k] for k in ks])
            records.append({**base, "k": None, "metric": "consistency", "value": value})
    return records


def aggregate_records(records: list[dict]) -> list[dict]:
    """Mean over subjects per (scenario, method, k, lambda, group, metric)."""
    buckets: dict[tuple, list[float]] = defaultdict(list)
    for r in records:
        buckets[(r["scenario"], r["method"], r["k"], r["lambda"], r["group"], r["metric"])].append(r["value"])
    rows = []
    order = {m: i for i, m in enumerate(POINT_METRICS + ("consistency",))}
    for key in sorted(buckets, key=lambda t: (t[0], t[1], t[3] is None, t[3] or 0.0, t[4],
                                              t[2] is None, t[2] or 0, order[t[5]])):
        values = buckets[key]
        rows.append(dict(zip(METRICS_HEADER, key + (sum(values) / len(values),))) | {"n": len(values)})
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_metrics(out: Path, records: list[dict]) -> tuple[Path, Path]:
    rows = aggregate_records(records)
    csv_path, json_path = out / "metrics.csv", out / "metrics.json"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRICS_HEADER)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in METRICS_HEADER])
    payload = {"aggregate": rows, "per_subject": records}
    json_path.write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return csv_path, json_path


def run_evaluate(cfg: RunConfig) -> list[dict]:
    """Metrics for every summary JSON under ``cfg.summaries``."""
    g = kio.load_graph(cfg.graph, cfg.weight_params(), cfg.attribute_weights)
    root = Path(cfg.summaries)
    files = sorted(root.rglob("*.json"))
    if not files:
        raise FileNotFoundError(f"no summary JSON files under {root}")
    series: dict[tuple, dict[int, Explanation]] = defaultdict(dict)
    reports: dict[tuple, dict[int, Any]] = defaultdict(dict)
    for path in files:
        d = json.loads(path.read_text(encoding="utf-8"))
        s = summary_from_dict(d, g)
        x = Explanation.from_subgraph(s, g)
        key = (d.get("scenario", "unknown"), d["method"], d.get("lambda"), tuple(d.get("subjects", ())),
               json.dumps(d.get("params", {}), sort_keys=True))
        series[key][d["k"]] = x
        reports[key][d["k"]] = evaluate(x, g, cfg.redundancy_mode)
    groups = kio.read_labels(cfg.groups) if cfg.groups else None
    records = _series_records(series, reports, groups)
    write_metrics(output_dir(cfg), records)
    return records


def run_baseline_evaluate(cfg: RunConfig) -> list[dict]:
    """Metrics for the unsummarized path sets of each scenario and k."""
    g, paths = _load_inputs(cfg)
    kind = ScenarioKind(cfg.scenario)
    ids = _subject_ids(g, cfg.subjects)
    ks = _k_values(cfg, paths)
    method = f"baseline:{cfg.baseline_name}"
    series: dict[tuple, dict[int, Explanation]] = defaultdict(dict)
    reports: dict[tuple, dict[int, Any]] = defaultdict(dict)
    for unit in _units(kind, ids):
        key = (kind.value, method, None, tuple(sorted(g.labels[v] for v in unit)), "{}")
        for k in ks:
            spec = derive_scenario(paths, kind, unit, k)
            x = Explanation.from_paths(spec.path_subset)
            series[key][k] = x
            reports[key][k] = evaluate(x, g, cfg.redundancy_mode)
    groups = kio.read_labels(cfg.groups) if cfg.groups else None
    records = _series_records(series, reports, groups)
    write_metrics(output_dir(cfg), records)
    return records


def _benchmark_graphs(cfg: RunConfig):
    if cfg.graph is not None:
        yield kio.load_graph(cfg.graph, cfg.weight_params(), cfg.attribute_weights)
        return
    for total in cfg.graph_sizes:
        yield generate_synthetic(table3_spec(total, seed=cfg.seed, scale=cfg.scale), cfg.weight_params())


def run_benchmark(cfg: RunConfig) -> list[dict]:
    """Median wall time and traced peak memory per (graph, group size, k, method).

    Each user group is a prefix of one seeded user sample, with random
    length-3 paths standing in for recommender output.  Every measured
    configuration gets one untimed warm-up run first.
    """
    ks = cfg.k or (10,)
    rows = []
    for g in _benchmark_graphs(cfg):
        uv = g.undirected
        users = g.nodes_of_kind(NodeKind.USER)
        users = users[np.diff(uv.indptr)[users] > 0]
        need = max(cfg.group_sizes)
        if need > len(users):
            raise InvalidScenario(f"group size {need} exceeds the {len(users)} connected users")
        pool = np.random.default_rng(cfg.seed).permutation(users)[:need].tolist()
        paths = generate_random_paths(g, pool, max(ks), cfg.path_length, seed=cfg.seed)
        for size in cfg.group_sizes:
            for k in ks:
                spec = derive_scenario(paths, ScenarioKind.USER_GROUP, pool[:size], k)
                n_terms = len(terminal_set(spec))
                variants = [("st", None)]
                if "pcst" in cfg.methods:
                    variants += [("pcst", float(k) if r == "k" else float(r)) for r in cfg.bench_rho]
                variants = [v for v in variants if v[0] in cfg.methods]
                for method, rho in variants:
                    def run(method=method, rho=rho):
                        return summarize_spec(g, spec, method, cfg, rho)
                    run()  # warm-up
                    ms, peak, (s, _w, _lam) = measure(run, cfg.repeats, cfg.memory)
                    rows.append({
                        "graph_nodes": g.num_nodes, "graph_edges": g.num_edges,
                        "scenario": ScenarioKind.USER_GROUP.value, "group_size": size, "k": k,
                        "terminals": n_terms, "method": method,
                        "prize_mode": cfg.prize_mode if method == "pcst" else None,
                        "rho": rho, "repeats": cfg.repeats, "median_ms": ms,
                        "peak_memory_bytes": peak if cfg.memory else None,
                        "summary_nodes": len(s.nodes), "summary_edges": len(s.edges),
                        "dropped_terminals": len(s.dropped_terminals),
                    })
                    log.info("graph=%d size=%d k=%d %s rho=%s: %.1f ms",
                             g.num_nodes, size, k, method, rho, ms)
    return rows


def write_benchmark(out: Path, rows: list[dict]) -> Path:
    path = out / "benchmark.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BENCH_HEADER)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in BENCH_HEADER])
    return path


def run_synth(cfg: RunConfig) -> Path:
    """Write a synthetic graph (and optionally random paths) in the standard file formats."""
    out = output_dir(cfg)
    tables = synthetic_tables(table3_spec(cfg.nodes, seed=cfg.seed, scale=cfg.scale))
    kio.write_ratings(out / kio.RATINGS_FILE, tables.ratings())
    kio.write_triples(out / kio.TRIPLES_FILE, tables.triples())
    kio.write_kinds(out / kio.KINDS_FILE, tables.kind_rows())
    if cfg.path_users > 0:
        g = graph_from_tables(tables, cfg.weight_params())
        users = g.nodes_of_kind(NodeKind.USER)
        users = users[np.diff(g.undirected.indptr)[users] > 0]
        if cfg.path_users > len(users):
            raise InvalidScenario(f"{cfg.path_users} path users requested, {len(users)} available")
        chosen = sorted(np.random.default_rng(cfg.seed).choice(users, cfg.path_users, replace=False).tolist())
        k = cfg.k[-1] if cfg.k else 10
        paths = generate_random_paths(g, chosen, k, cfg.path_length, seed=cfg.seed)
        with open(out / "paths.jsonl", "w", encoding="utf-8", newline="\n") as fh:
            dump_paths(paths, g, fh)
        kio.write_lines(out / "users.txt", (g.labels[u] for u in chosen))
    print(out)
    return out


def run_sample(cfg: RunConfig) -> Path:
    """Write a subject list (``subjects.txt``) and its group labels (``groups.tsv``)."""
    g = kio.load_graph(cfg.graph, cfg.weight_params(), cfg.attribute_weights)
    out = output_dir(cfg)
    if cfg.per_stratum is not None:
        if cfg.attributes:
            attrs = {g.node_id(u): s for u, s in kio.read_labels(cfg.attributes).items()}
        else:
            attrs = {int(u): "all" for u in g.nodes_of_kind(NodeKind.USER)}
        picked = [(v, attrs[v]) for v in sample_users(g, attrs, cfg.per_stratum, cfg.strata, cfg.seed)]
    elif cfg.top is not None or cfg.bottom is not None:
        picked = sample_items_by_popularity(g, cfg.top or 0, cfg.bottom or 0, cfg.seed)
    else:
        raise ValueError("sample needs --per-stratum (users) or --top/--bottom (items)")
    kio.write_lines(out / "subjects.txt", (g.labels[v] for v, _ in picked))
    with open(out / "groups.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for v, group in picked:
            fh.write(f"{g.labels[v]}\t{group}\n")
    print(out / "subjects.txt")
    return out


def _attr_weight(text: str) -> tuple[str, float]:
    rel, _, value = text.partition("=")
    if not rel or not value:
        raise argparse.ArgumentTypeError(f"expected RELATION=WEIGHT, got {text!r}")
    return rel, float(value)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kgsumm", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    graph = argparse.ArgumentParser(add_help=False)
    graph.add_argument("--graph", type=Path, help="directory with ratings.csv, triples.tsv, kinds.tsv")
    graph.add_argument("--beta1", type=float, default=1.0)
    graph.add_argument("--beta2", type=float, default=0.0)
    graph.add_argument("--gamma", type=float, default=0.0)
    graph.add_argument("--t0", type=int, default=None, help="reference time (default: latest rating)")
    graph.add_argument("--attr-weight", type=_attr_weight, action="append", default=[],
                       metavar="RELATION=W", help="base weight for attribute edges of a relation")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--seed", type=int, default=0)

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--paths", type=Path, required=True, help="explanation paths (JSONL)")
    scen.add_argument("--scenario", choices=[k.value for k in ScenarioKind], default="user")
    scen.add_argument("--subject", action="append", default=[], help="subject node id (repeatable)")
    scen.add_argument("--subjects-file", type=Path, help="newline-separated subject ids")
    scen.add_argument("--k", type=parse_k_range, default=None, help='e.g. "1..10" (default: 1..K)')
    scen.add_argument("--groups", type=Path, help="TSV of subject id to group label")
    scen.add_argument("--redundancy-mode", choices=REDUNDANCY_MODES, default="incidence")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--method", choices=METHODS + ("both",), default="st")
    algo.add_argument("--lambda", dest="lam", type=float, default=1.0)
    algo.add_argument("--prize-mode", choices=[m.value for m in PrizeMode], default="unit")
    algo.add_argument("--rho", type=float, default=1.0)
    algo.add_argument("--epsilon", type=float, default=1e-3)
    algo.add_argument("--eq1-count", choices=COUNT_MODES, default="per-target")
    algo.add_argument("--pcst-algo", choices=ALGOS, default="gw")

    sub.add_parser("build", parents=[graph], help="load and validate a graph, print its statistics")
    sub.add_parser("summarize", parents=[graph, common, scen, algo], help="write summary JSON per k")

    ev = sub.add_parser("evaluate", parents=[graph, common], help="metrics for summary JSON files")
    ev.add_argument("--summaries", type=Path, required=True, help="directory searched for *.json")
    ev.add_argument("--groups", type=Path)
    ev.add_argument("--redundancy-mode", choices=REDUNDANCY_MODES, default="incidence")

    be = sub.add_parser("baseline-evaluate", parents=[graph, common, scen],
                        help="metrics for unsummarized path sets")
    be.add_argument("--name", dest="baseline_name", default="baseline")

    bm = sub.add_parser("benchmark", parents=[graph, common, algo], help="timing/memory CSV")
    bm.add_argument("--graph-sizes", type=_int_list, default=(TABLE3_TOTALS[0],),
                    help="synthetic graph totals (ignored with --graph)")
    bm.add_argument("--scale", type=float, default=1.0)
    bm.add_argument("--group-sizes", type=_int_list, default=(10, 25, 50, 100))
    bm.add_argument("--k", type=parse_k_range, default=None, help="default 10")
    bm.add_argument("--bench-rho", type=_rho_list, default=None,
                    help='PCST prize multipliers, "k" for rho = k (default: --rho)')
    bm.add_argument("--repeats", type=int, default=5)
    bm.add_argument("--no-memory", dest="memory", action="store_false")
    bm.add_argument("--path-length", type=int, default=3)

    sy = sub.add_parser("synth", parents=[common], help="write a synthetic graph")
    sy.add_argument("--nodes", type=int, default=TABLE3_TOTALS[0])
    sy.add_argument("--scale", type=float, default=1.0)
    sy.add_argument("--path-users", type=int, default=0, help="also write random paths for N users")
    sy.add_argument("--k", type=parse_k_range, default=None, help="paths per user (default 10)")
    sy.add_argument("--path-length", type=int, default=3)

    sa = sub.add_parser("sample", parents=[graph, common], help="sample users or items")
    sa.add_argument("--per-stratum", type=int, help="users per stratum")
    sa.add_argument("--attributes", type=Path, help="TSV of user id to stratum")
    sa.add_argument("--strata", type=lambda s: tuple(s.split(",")))
    sa.add_argument("--top", type=int, help="most popular items")
    sa.add_argument("--bottom", type=int, help="least popular items")
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=ns.command)
    values = vars(ns)
    for name in RunConfig.__dataclass_fields__:
        if name in values and values[name] is not None and name != "command":
            setattr(cfg, name, values[name])
    if "attr_weight" in values:
        cfg.attribute_weights = dict(values["attr_weight"])
    subjects = list(values.get("subject") or [])
    if values.get("subjects_file"):
        subjects += kio.read_lines(values["subjects_file"])
    cfg.subjects = tuple(dict.fromkeys(subjects))
    if ns.command == "benchmark" and values.get("bench_rho") is None:
        cfg.bench_rho = (cfg.rho,)
    if ns.command in ("build", "summarize", "evaluate", "baseline-evaluate", "sample") and cfg.graph is None:
        raise ValueError(f"{ns.command} needs --graph")
    return cfg


def run(cfg: RunConfig):
    if cfg.command == "build":
        return run_build(cfg)
    if cfg.command == "summarize":
        return run_summarize(cfg)
    if cfg.command == "evaluate":
        return run_evaluate(cfg)
    if cfg.command == "baseline-evaluate":
        return run_baseline_evaluate(cfg)
    if cfg.command == "benchmark":
        rows = run_benchmark(cfg)
        path = write_benchmark(output_dir(cfg), rows)
        print(path)
        return rows
    if cfg.command == "synth":
        return run_synth(cfg)
    if cfg.command == "sample":
        return run_sample(cfg)
    raise ValueError(f"unknown command {cfg.command!r}")


def _fail(code: str, message: str, status: int) -> int:
    print(json.dumps({"error": code, "message": message}), file=sys.stderr)
    return status


def main(argv: Sequence[str] | None = None) -> int:
    ns = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(config_from_args(ns))
    except KGSummError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 2
    except OSError as exc:
        return _fail("IOError", str(exc), 1)
    except ValueError as exc:
        return _fail("InvalidArgument", str(exc), 2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
