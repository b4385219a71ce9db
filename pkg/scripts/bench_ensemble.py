#!/usr/bin/env python3
"""Ensemble throughput benchmark: R bipartitions of a large sparse graph.

    python scripts/bench_ensemble.py --nodes 50000 --edges 200000 --runs 100
"""

import argparse
import os
import time

import numpy as np

from retweetpol import _kernels
from retweetpol.graph import MonthlyGraph, giant_component
from retweetpol.leaning import ensemble_leaning


def build_graph(n: int, m_target: int, seed: int) -> MonthlyGraph:
    rng = np.random.default_rng(seed)
    half = n // 2
    us = rng.integers(0, n, int(m_target * 1.3))
    offs = rng.integers(1, half, int(m_target * 1.3))
    vs = (us + offs) % half + (us >= half) * half
    cross = rng.random(len(us)) < 0.04
    vs = np.where(cross, (us + offs) % n, vs)
    good = us != vs
    us, vs = us[good], vs[good]
    lo, hi = np.minimum(us, vs), np.maximum(us, vs)
    keys = np.unique(lo.astype(np.int64) * n + hi)[:m_target]
    edges = [(int(k // n), int(k % n), 1) for k in keys]
    return MonthlyGraph.from_edges(1, [f"u{i:06d}" for i in range(n)], edges)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=50_000)
    ap.add_argument("--edges", type=int, default=200_000)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    print("compiling kernels...")
    _kernels.warmup()
    print(f"building graph n={args.nodes} m~{args.edges}...")
    g = build_graph(args.nodes, args.edges, args.seed)
    gc, frac = giant_component(g)
    print(f"giant component: n={gc.n} m={gc.m} ({frac:.1%})")

    t0 = time.perf_counter()
    scores = ensemble_leaning(gc, beta=0.5, runs=args.runs,
                              master_seed=args.seed, threads=args.threads)
    elapsed = time.perf_counter() - t0
    confident = np.count_nonzero((scores.scores <= 0.025) | (scores.scores >= 0.975))
    print(f"{args.runs} runs with {args.threads} threads: {elapsed:.1f}s "
          f"({elapsed / args.runs * 1000:.0f} ms/run), "
          f"{confident / gc.n:.1%} confident users")


if __name__ == "__main__":
    main()
