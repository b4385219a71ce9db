"""Ensemble leaning scores and community labeling.

Each month's graph is bipartitioned R times with independent seeds; because
per-run side labels are arbitrary, every run is aligned to run 0 by majority
agreement before the 0/1 assignments are averaged into a per-user score.
The most extreme users are seeded with labels (from a file, or a keyword
heuristic as a documented approximation of manual reading) and every other
user inherits the label of the seeded user with the closest score.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graph import MonthlyGraph, is_connected
from .labels import Label
from .partition import DEFAULT_EPS, bipartition
from .rng import hash64

logger = logging.getLogger(__name__)

DEFAULT_RUNS = 100
DEFAULT_BETA_GRID = tuple(round(0.05 * k, 2) for k in range(1, 11))
CONFIDENT_LOW = 0.025   # central 95% band bounds
CONFIDENT_HIGH = 0.975
DEFAULT_EXTREME_FRACTION = 0.10
MIXED_SEED_LIMIT = 0.40


class ConfigurationError(ValueError):
    """Missing or inconsistent labeling inputs."""


@dataclass
class LeaningScores:
    month_index: int
    node_ids: tuple[str, ...]
    counts: np.ndarray          # aligned side-1 assignments per node
    runs: int
    reference_seed: int         # seed of the alignment-reference run
    beta_used: float

    @property
    def scores(self) -> np.ndarray:
        return self.counts / self.runs

    def confident_mask(self) -> np.ndarray:
        s = self.scores
        return (s <= CONFIDENT_LOW) | (s >= CONFIDENT_HIGH)


@dataclass
class CommunityLabeling:
    month_index: int
    node_ids: tuple[str, ...]
    labels: list[Label]
    provenance: list[str]       # "seed-manual" | "propagated"

    def as_mapping(self) -> dict[str, Label]:
        return dict(zip(self.node_ids, self.labels))


def align_runs(sides: Sequence[np.ndarray]) -> np.ndarray:
    """Align runs 1..R-1 to run 0 (flip when agreement < 50%, no flip at
    exactly 50%) and accumulate integer side-1 counts."""
    ref = sides[0]
    n = ref.shape[0]
    counts = np.zeros(n, np.int64)
    for s in sides:
        agree = int(np.count_nonzero(s == ref))
        aligned = s if 2 * agree >= n else 1 - s
        counts += aligned
    return counts


def ensemble_leaning(
    g: MonthlyGraph,
    beta: float,
    runs: int = DEFAULT_RUNS,
    master_seed: int = 0,
    eps: float = DEFAULT_EPS,
    threads: int = 1,
) -> LeaningScores:
    """Score every node by its aligned side-1 frequency over ``runs``
    bipartitions seeded from (master_seed, month, run)."""
    if runs < 1:
        raise ValueError("need at least one run")
    if not is_connected(g):
        raise ValueError("ensemble needs a connected graph; pass the giant component")
    seeds = [hash64(master_seed, g.month_index, r) for r in range(runs)]

    def one(seed: int) -> np.ndarray:
        return bipartition(g, beta, eps, seed, check_connected=False).side

    if threads > 1 and runs > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            sides = list(pool.map(one, seeds))
    else:
        sides = [one(s) for s in seeds]
    counts = align_runs(sides)
    return LeaningScores(
        month_index=g.month_index,
        node_ids=g.node_ids,
        counts=counts,
        runs=runs,
        reference_seed=seeds[0],
        beta_used=beta,
    )


def confident_count(scores: LeaningScores) -> int:
    """Users outside the central 95% score band."""
    return int(np.count_nonzero(scores.confident_mask()))


def tune_balance(
    g: MonthlyGraph,
    grid: Sequence[float] = DEFAULT_BETA_GRID,
    runs: int = DEFAULT_RUNS,
    master_seed: int = 0,
    eps: float = DEFAULT_EPS,
    threads: int = 1,
) -> tuple[float, dict[float, int]]:
    """Pick the balance target maximizing the number of confident users;
    ties go to the larger (more balanced) value."""
    if not grid:
        raise ValueError("balance grid must be non-empty")
    diagnostics: dict[float, int] = {}
    best_beta = None
    best_count = -1
    for beta in grid:
        scores = ensemble_leaning(g, beta, runs, master_seed, eps, threads)
        c = confident_count(scores)
        diagnostics[beta] = c
        if c > best_count or (c == best_count and beta > best_beta):
            best_count = c
            best_beta = beta
    return best_beta, diagnostics


def select_extremes(
    scores: LeaningScores, fraction: float = DEFAULT_EXTREME_FRACTION
) -> set[tuple[str, int]]:
    """The fraction/2 lowest-scoring users (tail 0) and fraction/2 highest
    (tail 1), per-tail counts rounded up, rank ties broken by user_id."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    n = len(scores.node_ids)
    k = math.ceil(n * fraction / 2.0)
    if 2 * k > n:
        raise ValueError(f"two tails of {k} users exceed population {n}")
    order = sorted(range(n), key=lambda v: (scores.scores[v], scores.node_ids[v]))
    picked = {(scores.node_ids[v], 0) for v in order[:k]}
    picked |= {(scores.node_ids[v], 1) for v in order[n - k:]}
    return picked


def propagate_labels(
    scores: LeaningScores, seed_labels: Mapping[str, Label]
) -> CommunityLabeling:
    """Seeded users keep their label; everyone else takes the label of the
    seeded user with the closest score (ties: smallest seed user_id).

    Seeds absent from the month's graph are skipped with a warning; an empty
    effective seed set is a configuration error.  Each score side's seeds
    must agree on a majority label within the mixing limit.
    """
    if not seed_labels:
        raise ConfigurationError("seed label set is empty")
    index = {uid: i for i, uid in enumerate(scores.node_ids)}
    seeds: list[tuple[float, str, Label]] = []
    for uid, lab in seed_labels.items():
        v = index.get(uid)
        if v is None:
            logger.warning(
                "seed user %s absent from month %d graph; skipped",
                uid, scores.month_index,
            )
            continue
        seeds.append((float(scores.scores[v]), uid, lab))
    if not seeds:
        raise ConfigurationError("no seed user present in the month's graph")
    _check_seed_mixing(seeds)
    seeds.sort(key=lambda t: (t[0], t[1]))
    seed_scores = [s for s, _, _ in seeds]
    by_user = {uid: lab for _, uid, lab in seeds}

    labels: list[Label] = []
    provenance: list[str] = []
    svals = scores.scores
    for v, uid in enumerate(scores.node_ids):
        if uid in by_user:
            labels.append(by_user[uid])
            provenance.append("seed-manual")
            continue
        labels.append(_nearest_seed_label(svals[v], seeds, seed_scores))
        provenance.append("propagated")
    return CommunityLabeling(scores.month_index, scores.node_ids, labels, provenance)


def _nearest_seed_label(score: float, seeds, seed_scores) -> Label:
    """Label of the seed at minimal |score difference|, ties resolved to the
    smallest seed user_id.  Equal-distance seeds are contiguous runs of
    equal scores on either side of the insertion point."""
    import bisect

    i = bisect.bisect_left(seed_scores, score)
    d_left = score - seed_scores[i - 1] if i > 0 else math.inf
    d_right = seed_scores[i] - score if i < len(seeds) else math.inf
    d = min(d_left, d_right)
    best: tuple[str, Label] | None = None
    j = i - 1
    while j >= 0 and score - seed_scores[j] == d:
        cand = (seeds[j][1], seeds[j][2])
        best = cand if best is None or cand[0] < best[0] else best
        j -= 1
    j = i
    while j < len(seeds) and seed_scores[j] - score == d:
        cand = (seeds[j][1], seeds[j][2])
        best = cand if best is None or cand[0] < best[0] else best
        j += 1
    return best[1]


def _check_seed_mixing(seeds: list[tuple[float, str, Label]]) -> None:
    for side in (0, 1):
        group = [lab for s, _, lab in seeds if (s >= 0.5) == bool(side)]
        if not group:
            continue
        novax = sum(1 for lab in group if lab is Label.NOVAX)
        minority = min(novax, len(group) - novax)
        if minority / len(group) > MIXED_SEED_LIMIT:
            raise ConfigurationError(
                f"score side {side} seeds are label-mixed above "
                f"{MIXED_SEED_LIMIT:.0%} ({minority}/{len(group)})"
            )


def majority_side_labels(
    scores: LeaningScores, labeling: CommunityLabeling
) -> dict[int, Label]:
    """Majority label among each score side's users (reporting aid)."""
    out: dict[int, Label] = {}
    svals = scores.scores
    for side in (0, 1):
        labs = [
            labeling.labels[v]
            for v in range(len(labeling.node_ids))
            if (svals[v] >= 0.5) == bool(side)
        ]
        if labs:
            novax = sum(1 for lab in labs if lab is Label.NOVAX)
            out[side] = Label.NOVAX if novax * 2 >= len(labs) else Label.PROVAX
    return out


def heuristic_seed_labels(
    records: Iterable,
    extreme_users: set[tuple[str, int]],
    novax_terms: Sequence[str],
    provax_terms: Sequence[str],
) -> dict[str, Label]:
    """Approximate manual seed labeling by keyword counting.

    For each selected extreme user, count occurrences of the configured
    NoVax / ProVax term lists over their tweets (case-insensitive substring)
    and label by the larger count.  Users with a tie or no matches are left
    unseeded.  This is an approximation of reading the tweets and should be
    reviewed before real analyses.
    """
    wanted = {uid for uid, _ in extreme_users}
    tallies: dict[str, list[int]] = {uid: [0, 0] for uid in wanted}
    nov = [t.lower() for t in novax_terms]
    pro = [t.lower() for t in provax_terms]
    for rec in records:
        if rec.author_id not in wanted:
            continue
        text = rec.text.lower()
        tallies[rec.author_id][0] += sum(text.count(t) for t in nov)
        tallies[rec.author_id][1] += sum(text.count(t) for t in pro)
    out: dict[str, Label] = {}
    for uid, (n_cnt, p_cnt) in sorted(tallies.items()):
        if n_cnt > p_cnt:
            out[uid] = Label.NOVAX
        elif p_cnt > n_cnt:
            out[uid] = Label.PROVAX
    return out


def heatmap_rows(scores: LeaningScores) -> list[tuple[str, float]]:
    """Fraction of users per 0.01-wide score bin, bins labeled 0.00..1.00."""
    n = len(scores.node_ids)
    bins = np.zeros(101, np.int64)
    if n:
        idx = np.rint(scores.scores * 100).astype(np.int64)
        for i in idx:
            bins[i] += 1
    return [(f"{b / 100:.2f}", (bins[b] / n if n else 0.0)) for b in range(101)]
