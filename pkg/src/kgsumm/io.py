"""Readers and writers for the on-disk graph formats.

* ratings CSV: ``user_id,item_id,rating,timestamp``
* triples TSV: ``head<TAB>relation<TAB>tail``
* node kinds TSV: ``node_id<TAB>kind`` with kind in {user, item, external}

All files are UTF-8 with LF line endings.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import ParseError
from .graph import KnowledgeGraph, NodeKind, RatingRecord, WeightParams, build_graph

RATINGS_FILE = "ratings.csv"
TRIPLES_FILE = "triples.tsv"
KINDS_FILE = "kinds.tsv"
RATINGS_HEADER = ["user_id", "item_id", "rating", "timestamp"]


def read_ratings(path: str | Path) -> list[RatingRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != RATINGS_HEADER:
            raise ParseError(f"{path}: expected header {','.join(RATINGS_HEADER)}", line=1)
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                user, item, rating, ts = row
                out.append(RatingRecord(user, item, float(rating), int(ts)))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}", line=lineno) from None
    return out


def _tsv_rows(path: str | Path, width: int) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != width:
                raise ParseError(f"{path}:{lineno}: expected {width} tab-separated fields", line=lineno)
            yield lineno, parts


def read_triples(path: str | Path) -> list[tuple[str, str, str]]:
    return [(h, r, t) for _, (h, r, t) in _tsv_rows(path, 3)]


def read_kinds(path: str | Path) -> list[tuple[str, NodeKind]]:
    out = []
    for lineno, (node, kind) in _tsv_rows(path, 2):
        try:
            out.append((node, NodeKind.parse(kind)))
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}", line=lineno) from None
    return out


def read_lines(path: str | Path) -> list[str]:
    """Newline-separated id list (blank lines ignored)."""
    with open(path, encoding="utf-8") as fh:
        return [ln.rstrip("\n") for ln in fh if ln.strip()]


def read_labels(path: str | Path) -> dict[str, str]:
    """Two-column ``node_id<TAB>label`` table (strata, popularity groups)."""
    return {node: label for _, (node, label) in _tsv_rows(path, 2)}


def load_graph(
    directory: str | Path,
    params: WeightParams = WeightParams(),
    attribute_weights: Mapping[str, float] | None = None,
) -> KnowledgeGraph:
    d = Path(directory)
    return build_graph(
        read_ratings(d / RATINGS_FILE),
        read_triples(d / TRIPLES_FILE),
        read_kinds(d / KINDS_FILE),
        params,
        attribute_weights,
    )


def write_ratings(path: str | Path, ratings: Iterable[RatingRecord]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATINGS_HEADER)
        for r in ratings:
            rating = int(r.rating) if float(r.rating).is_integer() else r.rating
            w.writerow([r.user, r.item, rating, r.timestamp])


def write_triples(path: str | Path, triples: Iterable[tuple[str, str, str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{h}\t{r}\t{t}\n" for h, r, t in triples)


def write_kinds(path: str | Path, kinds: Iterable[tuple[str, NodeKind]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{n}\t{NodeKind(k).name.lower()}\n" for n, k in kinds)


def write_lines(path: str | Path, values: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.writelines(f"{v}\n" for v in values)
