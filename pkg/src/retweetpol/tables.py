"""On-disk formats for every pipeline table.

All writers are deterministic: fixed column orders, '\n' line endings,
%.12g float formatting and sorted JSON keys, so identical runs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .centrality import BetweennessResult
from .graph import MetricsRow, MonthlyGraph, read_graph_csv, write_graph_csv
from .ingest import UserMeta
from .labels import Label, parse_label
from .leaning import CommunityLabeling, LeaningScores
from .multiplexity import CoreComponent
from .partition import PartitionAssignment
from .polarization import PolarizationReport
from .timeseries import CCFResult


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(float(x))  # shortest round-trip form, deterministic
    return str(x)


def month_dir(out: Path, month: int) -> Path:
    return out / "graphs" / f"month_{month:03d}"


def write_month_graph(out: Path, g: MonthlyGraph) -> None:
    d = month_dir(out, g.month_index)
    d.mkdir(parents=True, exist_ok=True)
    write_graph_csv(g, d / "nodes.csv", d / "edges.csv")


def read_month_graph(out: Path, month: int) -> MonthlyGraph:
    d = month_dir(out, month)
    return read_graph_csv(d / "nodes.csv", d / "edges.csv", month)


def list_month_graphs(out: Path) -> list[int]:
    root = out / "graphs"
    if not root.is_dir():
        return []
    months = []
    for p in root.iterdir():
        if p.is_dir() and p.name.startswith("month_"):
            months.append(int(p.name.split("_")[1]))
    return sorted(months)


def _writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = open(path, "w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


def write_user_meta(path: Path, meta: Mapping[str, UserMeta]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["user_id", "verified", "followers", "handle"])
        for uid in sorted(meta):
            m = meta[uid]
            w.writerow([uid, "true" if m.verified else "false", m.followers, m.handle or ""])


def read_user_meta(path: Path) -> dict[str, UserMeta]:
    out: dict[str, UserMeta] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["user_id"]] = UserMeta(
                user_id=row["user_id"],
                verified=row["verified"] == "true",
                followers=int(row["followers"]),
                handle=row["handle"] or None,
            )
    return out


def write_tweet_counts(path: Path, counts_by_month: Mapping[int, Mapping[str, int]]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "tweets"])
        for month in sorted(counts_by_month):
            per_user = counts_by_month[month]
            for uid in sorted(per_user):
                w.writerow([month, uid, per_user[uid]])


def read_tweet_counts(path: Path) -> dict[int, dict[str, int]]:
    out: dict[int, dict[str, int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["month"]), {})[row["user_id"]] = int(row["tweets"])
    return out


METRICS_COLUMNS = [
    "month", "n", "m", "gc_fraction", "density", "avg_clustering",
    "avg_degree", "s_metric", "alpha",
]


def write_metrics(path: Path, rows: Sequence[MetricsRow]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(METRICS_COLUMNS)
        for r in rows:
            w.writerow([
                r.month_index, r.n, r.m, fmt(r.gc_fraction), fmt(r.density),
                fmt(r.avg_clustering), fmt(r.avg_degree), fmt(r.s_metric), fmt(r.alpha),
            ])


def read_metrics(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def write_partitions(path: Path, rows: Iterable[tuple[PartitionAssignment, Sequence[str]]]) -> None:
    """Assignment export: one CSV row per (month, user)."""
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "side", "seed", "beta", "edge_cut"])
        for assignment, node_ids in rows:
            for uid, s in zip(node_ids, assignment.side.tolist()):
                w.writerow([
                    assignment.month_index, uid, s, assignment.seed,
                    fmt(assignment.balance_target), assignment.edge_cut,
                ])


def write_scores(path: Path, monthly: Sequence[LeaningScores]) -> None:
    """Score table with the raw aligned counts so reloads are exact."""
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "score", "count", "runs"])
        for sc in monthly:
            vals = sc.scores
            for v, uid in enumerate(sc.node_ids):
                w.writerow([
                    sc.month_index, uid, fmt(float(vals[v])),
                    int(sc.counts[v]), sc.runs,
                ])


def read_scores(path: Path) -> dict[int, dict[str, float]]:
    out: dict[int, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["month"]), {})[row["user_id"]] = float(row["score"])
    return out


def read_scores_full(path: Path) -> list[LeaningScores]:
    """Reload the per-month score objects (node order as written)."""
    per_month: dict[int, tuple[list[str], list[int], int]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            month = int(row["month"])
            ids, counts, _ = per_month.setdefault(month, ([], [], 0))
            ids.append(row["user_id"])
            counts.append(int(row["count"]))
            per_month[month] = (ids, counts, int(row["runs"]))
    out = []
    for month in sorted(per_month):
        ids, counts, runs = per_month[month]
        out.append(
            LeaningScores(
                month_index=month,
                node_ids=tuple(ids),
                counts=np.array(counts, np.int64),
                runs=runs,
                reference_seed=0,
                beta_used=float("nan"),
            )
        )
    return out


def write_extremes(path: Path, rows: Sequence[tuple[int, str, int, float]]) -> None:
    """Users selected for manual labeling: month,user_id,tail,score."""
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "tail", "score"])
        for month, uid, tail, score in rows:
            w.writerow([month, uid, tail, fmt(score)])


def write_balance(path: Path, rows: Sequence[tuple[int, float, int]]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "beta", "confident_users"])
        for month, beta, confident in rows:
            w.writerow([month, fmt(beta), confident])


def write_heatmap(path: Path, rows_by_month: Mapping[int, Sequence[tuple[str, float]]]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "score_bin", "user_fraction"])
        for month in sorted(rows_by_month):
            for bin_label, fraction in rows_by_month[month]:
                w.writerow([month, bin_label, fmt(fraction)])


def write_labels(
    path: Path,
    rows: Sequence[tuple[LeaningScores, CommunityLabeling]],
) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "score", "label", "provenance"])
        for scores, labeling in rows:
            vals = scores.scores
            for v, uid in enumerate(labeling.node_ids):
                w.writerow([
                    labeling.month_index, uid, fmt(float(vals[v])),
                    labeling.labels[v].value, labeling.provenance[v],
                ])


def read_labels(path: Path) -> dict[int, dict[str, Label]]:
    out: dict[int, dict[str, Label]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["month"]), {})[row["user_id"]] = parse_label(row["label"])
    return out


def read_seed_labels(path: Path) -> dict[int, dict[str, Label]]:
    """Seed-label file: CSV month,user_id,label with label in {novax, provax}."""
    out: dict[int, dict[str, Label]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(int(row["month"]), {})[row["user_id"]] = parse_label(row["label"])
    return out


def write_seed_labels(path: Path, rows: Sequence[tuple[int, str, Label]]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "user_id", "label"])
        for month, uid, lab in rows:
            w.writerow([month, uid, lab.value])


def write_polarization(path: Path, rows: Sequence[PolarizationReport | None], months: Sequence[int]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "V_n", "V_p", "E_n", "E_p", "E_o", "S_t", "tweets_n", "tweets_p"])
        for month, r in zip(months, rows):
            if r is None:
                w.writerow([month, "", "", "", "", "", "", "", ""])
            else:
                w.writerow([
                    r.month_index, r.v_n, r.v_p, fmt(r.e_n), fmt(r.e_p), fmt(r.e_o),
                    fmt(r.score), fmt(r.tweets_n), fmt(r.tweets_p),
                ])


def write_core_report(path: Path, reports: Mapping[int, dict]) -> None:
    """JSON report: per threshold k, the component list plus side stats."""
    doc = {}
    for k in sorted(reports):
        rep = reports[k]
        doc[str(k)] = {
            "components": [_component_doc(c) for c in rep["components"]],
            "sides": {
                name: {
                    "users": s.users,
                    "avg_followers": s.avg_followers,
                    "verified_fraction": s.verified_fraction,
                    "top_followed": s.top_followed,
                }
                for name, s in rep["sides"].items()
            },
        }
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _component_doc(c: CoreComponent) -> dict:
    return {
        "size": c.size,
        "threshold": c.threshold,
        "fraction_novax": c.fraction_novax,
        "fraction_provax": c.fraction_provax,
        "avg_followers": c.avg_followers,
        "verified_fraction": c.verified_fraction,
        "top_followed": c.top_followed,
        "members": c.members,
    }


def write_core_graph(out_dir: Path, k: int, matrix, components: Sequence[CoreComponent]) -> None:
    """Threshold-k core graph in the nodes/edges CSV schema."""
    members = sorted({u for c in components for u in c.members})
    index = {u: i for i, u in enumerate(members)}
    d = out_dir / "cores" / f"k_{k}"
    d.mkdir(parents=True, exist_ok=True)
    fh, w = _writer(d / "nodes.csv")
    with fh:
        w.writerow(["node_index", "user_id"])
        for i, uid in enumerate(members):
            w.writerow([i, uid])
    fh, w = _writer(d / "edges.csv")
    with fh:
        w.writerow(["u_index", "v_index", "weight"])
        edges = []
        for (i, j), c in matrix.pair_counts.items():
            if c >= k:
                a = index.get(matrix.user_ids[i])
                b = index.get(matrix.user_ids[j])
                if a is None or b is None:
                    continue
                u, v = (a, b) if a < b else (b, a)
                edges.append((u, v, c))
        for u, v, c in sorted(edges):
            w.writerow([u, v, c])


def write_betweenness(
    path: Path,
    results: Sequence[BetweennessResult],
    nodes_path: Path | None = None,
) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "n_sub", "pooled_p95", "fraction_high"])
        for r in results:
            w.writerow([
                r.month_index, len(r.node_ids), fmt(r.pooled_p95), fmt(r.fraction_high),
            ])
    if nodes_path is not None:
        fh, w = _writer(nodes_path)
        with fh:
            w.writerow(["month", "user_id", "betweenness"])
            for r in results:
                for uid, val in zip(r.node_ids, r.values.tolist()):
                    w.writerow([r.month_index, uid, fmt(val)])


def write_ccf(path: Path, result: CCFResult) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["lag", "ccf", "is_peak"])
        for lag, value in zip(result.lags, result.values):
            w.writerow([lag, fmt(value), 1 if lag == result.peak_lag else 0])


def read_series_csv(path: Path) -> list[tuple[int, float]]:
    """External 2-column series: month,value with a header row."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        rdr = csv.reader(fh)
        next(rdr)
        for month, value in rdr:
            rows.append((int(month), float(value)))
    return rows


def write_series_csv(path: Path, rows: Sequence[tuple[int, float]]) -> None:
    fh, w = _writer(path)
    with fh:
        w.writerow(["month", "value"])
        for month, value in rows:
            w.writerow([month, fmt(value)])
