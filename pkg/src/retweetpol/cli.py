"""Command-line pipeline: tweet archives in, analysis tables out.

Each subcommand reads its inputs from the shared output directory, so the
stages can run independently or as a chain:

    ingest -> metrics / partition / leaning -> label -> polarize /
    multiplex / centrality -> ccf -> report

All stages are deterministic for a fixed (--seed, --config), which is what
makes two identical runs produce byte-identical bundles.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import centrality as centrality_mod
from . import graph as graph_mod
from . import leaning as leaning_mod
from . import multiplexity as multiplexity_mod
from . import polarization as polarization_mod
from . import report as report_mod
from . import synth as synth_mod
from . import tables
from .config import Config, load_config
from .ingest import (
    bucket_by_month,
    build_retweet_graph,
    collect_user_meta,
    filter_records,
    parse_archive,
    tweet_counts,
)
from .labels import Label
from .partition import bipartition
from .rng import hash64
from .timeseries import cross_correlation, series_from_rows

logger = logging.getLogger("retweetpol")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    cfg = load_config(args.config)
    out = Path(args.out)
    try:
        return args.func(args, cfg, out)
    except (ValueError, OSError) as exc:
        logger.error("%s", exc)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="retweetpol",
        description="Monthly retweet-network polarization pipeline",
    )
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int, default=0, help="64-bit master seed")
    p.add_argument("--threads", type=int, default=1, help="worker threads for ensembles")
    p.add_argument("--out", default="out", help="output directory (the report bundle)")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="parse, filter and bucket a tweet archive")
    s.add_argument("--input", required=True, help="archive path")
    s.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("metrics", help="structural metrics per month")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("partition", help="one bipartition per month (export)")
    s.add_argument("--beta", type=float, help="balance target override")
    s.set_defaults(func=cmd_partition)

    s = sub.add_parser("leaning", help="ensemble leaning scores per month")
    s.add_argument("--beta", type=float, help="skip tuning and use this balance target")
    s.add_argument("--runs", type=int, help="ensemble size override")
    s.set_defaults(func=cmd_leaning)

    s = sub.add_parser("label", help="propagate seed labels over leaning scores")
    s.add_argument("--seeds", required=True, help="CSV month,user_id,label")
    s.set_defaults(func=cmd_label)

    s = sub.add_parser("polarize", help="community densities and score per month")
    s.set_defaults(func=cmd_polarize)

    s = sub.add_parser("multiplex", help="co-membership cores across months")
    s.set_defaults(func=cmd_multiplex)

    s = sub.add_parser("centrality", help="betweenness series on a community subgraph")
    s.add_argument("--side", choices=["novax", "provax"], default="novax")
    s.add_argument("--dump-nodes", action="store_true", help="also write per-node values")
    s.set_defaults(func=cmd_centrality)

    s = sub.add_parser("ccf", help="cross-correlate node counts with an external series")
    s.add_argument("--series", required=True, help="CSV month,value")
    s.add_argument("--column", default="n", help="metrics column to correlate")
    s.set_defaults(func=cmd_ccf)

    s = sub.add_parser("report", help="write the bundle manifest")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("synth", help="emit synthetic fixtures")
    s.add_argument("--mode", choices=["planted", "tweets", "labelings"], default="tweets")
    s.add_argument("--n1", type=int, default=200)
    s.add_argument("--n2", type=int, default=200)
    s.add_argument("--p-in", type=float, default=0.05)
    s.add_argument("--p-out", type=float, default=0.002)
    s.add_argument("--months", type=int, default=41)
    s.add_argument("--users-per-side", type=int, default=60)
    s.add_argument("--churn", type=float, default=0.15)
    s.add_argument("--sizes", default="60,60", help="community sizes for labelings mode")
    s.set_defaults(func=cmd_synth)
    return p


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def cmd_ingest(args, cfg: Config, out: Path) -> int:
    report = parse_archive(args.input, args.format)
    kept = filter_records(report.records, cfg.keywords, cfg.lang)
    buckets, dropped = bucket_by_month(kept, cfg.date_start, cfg.date_end)
    out.mkdir(parents=True, exist_ok=True)
    counts_by_month = {}
    month_sizes = {}
    for bucket in buckets:
        g = build_retweet_graph(bucket)
        tables.write_month_graph(out, g)
        counts_by_month[bucket.month_index] = tweet_counts(bucket)
        month_sizes[str(bucket.month_index)] = {
            "records": len(bucket.records), "nodes": g.n, "edges": g.m,
        }
    tables.write_user_meta(out / "user_meta.csv", collect_user_meta(kept))
    tables.write_tweet_counts(out / "tweets_per_user.csv", counts_by_month)
    summary = {
        "total_lines": report.total_lines,
        "parsed": len(report.records),
        "malformed": len(report.malformed),
        "duplicates": report.duplicates,
        "kept_after_filter": len(kept),
        "dropped_out_of_range": dropped,
        "months": month_sizes,
    }
    (out / "ingest_summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.info(
        "ingested %d records -> %d kept across %d months",
        len(report.records), len(kept), len(buckets),
    )
    return 0


def _months_or_fail(out: Path) -> list[int]:
    months = tables.list_month_graphs(out)
    if not months:
        raise ValueError(f"no monthly graphs under {out}/graphs; run ingest first")
    return months


def cmd_metrics(args, cfg: Config, out: Path) -> int:
    rows = []
    for month in _months_or_fail(out):
        g = tables.read_month_graph(out, month)
        rows.append(graph_mod.metrics_row(g))
    tables.write_metrics(out / "metrics.csv", rows)
    logger.info("metrics written for %d months", len(rows))
    return 0


def _month_gc(out: Path, month: int) -> graph_mod.MonthlyGraph:
    g = tables.read_month_graph(out, month)
    gc, _ = graph_mod.giant_component(g)
    return gc


def cmd_partition(args, cfg: Config, out: Path) -> int:
    beta = args.beta if args.beta is not None else (cfg.beta or 0.5)
    rows = []
    for month in _months_or_fail(out):
        gc = _month_gc(out, month)
        if gc.n < 2:
            logger.warning("month %d giant component too small; skipped", month)
            continue
        assignment = bipartition(gc, beta, cfg.balance_eps, hash64(args.seed, month, 0))
        rows.append((assignment, gc.node_ids))
    tables.write_partitions(out / "partitions.csv", rows)
    return 0


def cmd_leaning(args, cfg: Config, out: Path) -> int:
    runs = args.runs if args.runs is not None else cfg.runs
    fixed_beta = args.beta if args.beta is not None else cfg.beta
    monthly_scores = []
    balance_rows = []
    heatmaps = {}
    extreme_rows = []
    for month in _months_or_fail(out):
        gc = _month_gc(out, month)
        if gc.n < 2:
            logger.warning("month %d giant component too small; skipped", month)
            continue
        if fixed_beta is not None:
            beta = fixed_beta
        else:
            beta, _diag = leaning_mod.tune_balance(
                gc, cfg.beta_grid, runs, args.seed, cfg.balance_eps, args.threads
            )
        scores = leaning_mod.ensemble_leaning(
            gc, beta, runs, args.seed, cfg.balance_eps, args.threads
        )
        monthly_scores.append(scores)
        balance_rows.append((month, beta, leaning_mod.confident_count(scores)))
        heatmaps[month] = leaning_mod.heatmap_rows(scores)
        try:
            picked = leaning_mod.select_extremes(scores, cfg.extreme_fraction)
        except ValueError as exc:
            logger.warning("month %d: extremes skipped (%s)", month, exc)
            picked = set()
        svals = dict(zip(scores.node_ids, scores.scores.tolist()))
        for uid, tail in sorted(picked, key=lambda p: (p[1], p[0])):
            extreme_rows.append((month, uid, tail, svals[uid]))
        logger.info("month %d: beta=%.2f over %d runs on %d nodes", month, beta, runs, gc.n)
    tables.write_scores(out / "leaning_scores.csv", monthly_scores)
    tables.write_balance(out / "balance.csv", balance_rows)
    tables.write_heatmap(out / "heatmap.csv", heatmaps)
    tables.write_extremes(out / "extremes.csv", extreme_rows)
    return 0


def _load_scores(out: Path) -> list[leaning_mod.LeaningScores]:
    path = out / "leaning_scores.csv"
    if not path.is_file():
        raise ValueError(f"{path} missing; run leaning first")
    return tables.read_scores_full(path)


def cmd_label(args, cfg: Config, out: Path) -> int:
    seed_labels = tables.read_seed_labels(Path(args.seeds))
    rows = []
    for scores in _load_scores(out):
        month = scores.month_index
        seeds = seed_labels.get(month)
        if not seeds:
            logger.warning("month %d has no seed labels; skipped", month)
            continue
        try:
            labeling = leaning_mod.propagate_labels(scores, seeds)
        except leaning_mod.ConfigurationError as exc:
            logger.warning("month %d: %s; skipped", month, exc)
            continue
        rows.append((scores, labeling))
    tables.write_labels(out / "labels.csv", rows)
    logger.info("labels written for %d months", len(rows))
    return 0


def _month_labeling(
    gc: graph_mod.MonthlyGraph, labels_by_month, month: int
) -> leaning_mod.CommunityLabeling | None:
    per_user = labels_by_month.get(month)
    if per_user is None:
        return None
    missing = [uid for uid in gc.node_ids if uid not in per_user]
    if missing:
        logger.warning(
            "month %d: %d graph nodes missing labels; skipped", month, len(missing)
        )
        return None
    labs = [per_user[uid] for uid in gc.node_ids]
    return leaning_mod.CommunityLabeling(month, gc.node_ids, labs, ["propagated"] * gc.n)


def cmd_polarize(args, cfg: Config, out: Path) -> int:
    labels_by_month = tables.read_labels(out / "labels.csv")
    counts = tables.read_tweet_counts(out / "tweets_per_user.csv")
    months = _months_or_fail(out)
    rows = []
    for month in months:
        gc = _month_gc(out, month)
        labeling = _month_labeling(gc, labels_by_month, month)
        if labeling is None:
            logger.warning("month %d missing labeling; emitting nulls", month)
            rows.append(None)
            continue
        try:
            report = polarization_mod.month_report(gc, labeling)
        except (polarization_mod.DegenerateLabelingError,
                polarization_mod.UndefinedScoreError) as exc:
            logger.warning("month %d: %s; emitting nulls", month, exc)
            rows.append(None)
            continue
        tweets_n = tweets_p = 0
        for uid, c in counts.get(month, {}).items():
            lab = labeling.as_mapping().get(uid)
            if lab is Label.NOVAX:
                tweets_n += c
            elif lab is Label.PROVAX:
                tweets_p += c
        report.tweets_n = tweets_n
        report.tweets_p = tweets_p
        rows.append(report)
    tables.write_polarization(out / "polarization.csv", rows, months)
    return 0


def cmd_multiplex(args, cfg: Config, out: Path) -> int:
    labels_by_month = tables.read_labels(out / "labels.csv")
    months_total = cfg.months_total()
    labelings = [labels_by_month.get(m, {}) for m in range(1, months_total + 1)]
    thresholds = cfg.thresholds()
    meta_path = out / "user_meta.csv"
    user_meta = tables.read_user_meta(meta_path) if meta_path.is_file() else {}
    matrix = multiplexity_mod.build_restricted_multiplexity(labelings, min(thresholds))
    reports = {}
    for k in sorted(thresholds):
        comps = multiplexity_mod.threshold_components(matrix, k, user_meta)
        reports[k] = multiplexity_mod.core_stats(comps, user_meta)
        tables.write_core_graph(out, k, matrix, comps)
        logger.info(
            "k=%d: %d components, sizes %s", k, len(comps), [c.size for c in comps[:8]]
        )
    tables.write_core_report(out / "core_report.json", reports)
    return 0


def cmd_centrality(args, cfg: Config, out: Path) -> int:
    side = Label.NOVAX if args.side == "novax" else Label.PROVAX
    labels_by_month = tables.read_labels(out / "labels.csv")
    results = []
    for month in _months_or_fail(out):
        gc = _month_gc(out, month)
        labeling = _month_labeling(gc, labels_by_month, month)
        if labeling is None:
            continue
        results.append(centrality_mod.month_betweenness(gc, labeling, side))
    if not results:
        raise ValueError("no month produced a labeled subgraph")
    pooled, fractions = centrality_mod.high_betweenness_series(
        {r.month_index: r.values for r in results}, cfg.percentile
    )
    for r in results:
        r.pooled_p95 = pooled
        r.fraction_high = fractions[r.month_index]
    tables.write_betweenness(
        out / "betweenness.csv",
        results,
        (out / "betweenness_nodes.csv") if args.dump_nodes else None,
    )
    return 0


def cmd_ccf(args, cfg: Config, out: Path) -> int:
    metrics = tables.read_metrics(out / "metrics.csv")
    if not metrics:
        raise ValueError("metrics.csv is empty; run metrics first")
    a_rows = [
        (int(r["month"]), float(r[args.column]) if r[args.column] != "" else None)
        for r in metrics
    ]
    b_rows = tables.read_series_csv(Path(args.series))
    months = max(max(m for m, _ in a_rows), max(m for m, _ in b_rows))
    a = series_from_rows(a_rows, months)
    b = series_from_rows(b_rows, months)
    result = cross_correlation(a, b, cfg.max_lag)
    tables.write_ccf(out / "ccf.csv", result)
    logger.info("ccf peak at lag %d", result.peak_lag)
    return 0


def cmd_report(args, cfg: Config, out: Path) -> int:
    manifest = report_mod.assemble_report(out, cfg, args.seed)
    logger.info(
        "manifest: %d tables present, %d absent", manifest["present"], manifest["absent"]
    )
    return 0


def cmd_synth(args, cfg: Config, out: Path) -> int:
    out.mkdir(parents=True, exist_ok=True)
    if args.mode == "planted":
        spec = synth_mod.PlantedSpec(args.n1, args.n2, args.p_in, args.p_out, args.seed)
        g, truth = synth_mod.planted_partition(spec)
        tables.write_month_graph(out, g)
        with open(out / "truth_labels.csv", "w", newline="", encoding="utf-8") as fh:
            fh.write("user_id,side\n")
            for uid, s in zip(g.node_ids, truth.tolist()):
                fh.write(f"{uid},{s}\n")
        logger.info("planted graph: n=%d m=%d", g.n, g.m)
    elif args.mode == "tweets":
        lines, seed_rows, series = synth_mod.synthetic_tweet_archive(
            months=args.months,
            users_per_side=args.users_per_side,
            churn=args.churn,
            start=cfg.date_start,
            seed=args.seed,
        )
        (out / "tweets.jsonl").write_text("\n".join(lines) + "\n", encoding="utf-8")
        tables.write_seed_labels(out / "seed_labels.csv", seed_rows)
        tables.write_series_csv(out / "external_series.csv", series)
        logger.info("synthetic archive: %d lines over %d months", len(lines), args.months)
    else:
        sizes = tuple(int(x) for x in args.sizes.split(","))
        labelings = synth_mod.synthetic_labelings(args.months, sizes, args.churn, args.seed)
        rows = []
        for m, monthly in enumerate(labelings, start=1):
            for uid in sorted(monthly):
                rows.append((m, uid, monthly[uid]))
        tables.write_seed_labels(out / "synthetic_labelings.csv", rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
