"""Synthetic graph and labeling generators plus brute-force partition oracle.

Everything here is seed-deterministic (numpy PCG64 streams) and exists to
give the analytic modules a ground truth: planted two-block graphs for
community recovery, exhaustive balanced min-cut for partition quality, and
stable-membership labelings with churn for the co-membership analysis.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone

import numpy as np

from .graph import MonthlyGraph
from .labels import Label
from .partition import balance_floor

logger = logging.getLogger(__name__)

BRUTE_FORCE_MAX_NODES = 16


@dataclass(frozen=True)
class PlantedSpec:
    n1: int
    n2: int
    p_in: float
    p_out: float
    seed: int

    def __post_init__(self):
        if self.n1 < 1 or self.n2 < 1:
            raise ValueError("block sizes must be >= 1")
        for p in (self.p_in, self.p_out):
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"edge probability {p} outside [0, 1]")


def planted_partition(spec: PlantedSpec) -> tuple[MonthlyGraph, np.ndarray]:
    """Two-block random graph with ground-truth sides.

    Within-block pairs get an edge with probability p_in, cross pairs with
    p_out, unit weights.  Isolated nodes are dropped from both the graph and
    the truth array (block 0 -> side 0, block 1 -> side 1).
    """
    if spec.p_out * spec.n1 * spec.n2 < 3:
        logger.warning(
            "expected cross-block edges %.2f < 3: graph likely disconnected",
            spec.p_out * spec.n1 * spec.n2,
        )
    rng = np.random.default_rng(spec.seed)
    n = spec.n1 + spec.n2
    block = np.zeros(n, np.uint8)
    block[spec.n1:] = 1
    iu, ju = np.triu_indices(n, k=1)
    same = block[iu] == block[ju]
    p = np.where(same, spec.p_in, spec.p_out)
    mask = rng.random(len(iu)) < p
    eu, ev = iu[mask], ju[mask]
    keep = np.zeros(n, bool)
    keep[eu] = True
    keep[ev] = True
    kept = np.flatnonzero(keep)
    remap = np.full(n, -1, np.int64)
    remap[kept] = np.arange(len(kept))
    ids = [f"u{v:06d}" for v in kept.tolist()]
    edges = [(int(remap[u]), int(remap[v]), 1) for u, v in zip(eu.tolist(), ev.tolist())]
    g = MonthlyGraph.from_edges(1, ids, edges)
    return g, block[kept].copy()


def brute_force_min_balanced_cut(
    g: MonthlyGraph, beta: float, eps: float
) -> tuple[int, np.ndarray]:
    """Exhaustive minimum cut over all assignments meeting the balance floor.

    Refuses graphs above BRUTE_FORCE_MAX_NODES nodes.  Node 0 is pinned to
    side 0 (the cut is symmetric under complement); the first minimal mask in
    ascending order wins ties.
    """
    n = g.n
    if n > BRUTE_FORCE_MAX_NODES:
        raise ValueError(f"exhaustive search refused for n={n} > {BRUTE_FORCE_MAX_NODES}")
    if n < 2:
        raise ValueError("need at least 2 nodes")
    floor_w = balance_floor(n, beta, eps)
    masks = np.arange(1 << (n - 1), dtype=np.int64)  # bit v = side of node v+1
    ones = np.zeros(len(masks), np.int64)
    for v in range(n - 1):
        ones += (masks >> v) & 1
    minside = np.minimum(ones, n - ones)
    feasible = minside >= floor_w
    if not feasible.any():
        raise ValueError(f"no assignment satisfies the balance floor {floor_w}")
    cuts = np.zeros(len(masks), np.int64)
    for u, v, w in g.edge_list():
        bu = ((masks >> (u - 1)) & 1) if u > 0 else np.zeros(len(masks), np.int64)
        bv = (masks >> (v - 1)) & 1
        cuts += w * (bu != bv)
    cuts = np.where(feasible, cuts, np.iinfo(np.int64).max)
    best = int(np.argmin(cuts))  # argmin returns the first (smallest mask)
    side = np.zeros(n, np.uint8)
    for v in range(1, n):
        side[v] = (best >> (v - 1)) & 1
    return int(cuts[best]), side


def synthetic_labelings(
    months: int,
    sizes: tuple[int, ...] | list[int],
    churn: float,
    seed: int = 0,
) -> list[dict[str, Label]]:
    """Stable community membership with per-month inactivity.

    ``sizes`` gives the member count of the NoVax and (optionally) ProVax
    community.  Each month every user is independently inactive with
    probability ``churn``; active users always carry their community label.
    """
    if not 0.0 <= churn <= 1.0:
        raise ValueError("churn must lie in [0, 1]")
    if not 1 <= len(sizes) <= 2:
        raise ValueError("need one or two community sizes")
    rng = np.random.default_rng(seed)
    users: list[tuple[str, Label]] = []
    palette = [Label.NOVAX, Label.PROVAX]
    for b, size in enumerate(sizes):
        for i in range(size):
            users.append((f"c{b}u{i:05d}", palette[b]))
    labelings = []
    for _ in range(months):
        active = rng.random(len(users)) >= churn
        labelings.append(
            {uid: lab for (uid, lab), a in zip(users, active) if a}
        )
    return labelings


def random_connected_graph(
    n: int, extra_edges: int, seed: int, max_weight: int = 3
) -> MonthlyGraph:
    """Random connected weighted graph: a random spanning tree plus
    ``extra_edges`` distinct extra edges."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    edges: set[tuple[int, int]] = set()
    order = rng.permutation(n)
    for k in range(1, n):
        v = int(order[k])
        u = int(order[rng.integers(0, k)])
        edges.add((min(u, v), max(u, v)))
    possible = n * (n - 1) // 2
    budget = min(extra_edges, possible - len(edges))
    while budget > 0:
        u = int(rng.integers(0, n))
        v = int(rng.integers(0, n))
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        if key in edges:
            continue
        edges.add(key)
        budget -= 1
    ids = [f"u{v:06d}" for v in range(n)]
    triples = [
        (u, v, int(rng.integers(1, max_weight + 1))) for u, v in sorted(edges)
    ]
    return MonthlyGraph.from_edges(1, ids, triples)


# ---------------------------------------------------------------------------
# Synthetic tweet fixture (end-to-end pipeline input)
# ---------------------------------------------------------------------------

_SAMPLE_TEXTS = [
    "il vaccino funziona davvero",
    "basta vaccini obbligatori",
    "oggi vaccinazione in famiglia",
    "vaccinatevi tutti quanti",
    "dubbi sul vaccino e sugli effetti",
    "la vaccinazione procede bene",
]


def synthetic_tweet_archive(
    months: int = 41,
    users_per_side: int = 60,
    cores_per_side: int = 3,
    churn: float = 0.15,
    cross_rate: float = 0.03,
    start: date = date(2019, 1, 1),
    seed: int = 0,
) -> tuple[list[str], list[tuple[int, str, Label]], list[tuple[int, float]]]:
    """Generate a month-spanning JSONL tweet fixture with two communities.

    Returns (jsonl lines, seed-label rows (month, user, label), external
    interest series rows).  The first ``cores_per_side`` users of each side
    are always active, so seed labels always land inside the month's graph.
    """
    rng = np.random.default_rng(seed)
    sides = {}
    followers = {}
    verified = {}
    users = []
    for s, prefix in ((0, "nov"), (1, "pro")):
        for i in range(users_per_side):
            uid = f"{prefix}{i:04d}"
            users.append(uid)
            sides[uid] = s
            followers[uid] = int(rng.integers(10, 5000))
            verified[uid] = bool(s == 1 and rng.random() < 0.15)
    lines: list[str] = []
    seed_rows: list[tuple[int, str, Label]] = []
    series: list[tuple[int, float]] = []
    tid = 0
    month_start = datetime(start.year, start.month, 1, tzinfo=timezone.utc)
    for m in range(1, months + 1):
        active = [
            u
            for i, u in enumerate(users)
            if (i % users_per_side) < cores_per_side or rng.random() >= churn
        ]
        by_side = {0: [u for u in active if sides[u] == 0],
                   1: [u for u in active if sides[u] == 1]}
        n_tweets = 0
        # one bridge retweet each way keeps the monthly graph connected
        for u, v in (("nov0000", "pro0000"), ("pro0001", "nov0001")):
            tid += 1
            n_tweets += 1
            lines.append(_tweet_line(tid, u, month_start, v, followers, verified, rng))
        for u in active:
            stamp = month_start + timedelta(
                seconds=int(rng.integers(0, 27 * 24 * 3600))
            )
            for _ in range(int(rng.integers(1, 3))):
                tid += 1
                n_tweets += 1
                lines.append(_tweet_line(tid, u, stamp, None, followers, verified, rng))
            pool_side = sides[u]
            if rng.random() < cross_rate:
                pool_side = 1 - pool_side
            pool = [p for p in by_side[pool_side] if p != u]
            for _ in range(int(rng.integers(1, 4))):
                if not pool:
                    break
                tid += 1
                n_tweets += 1
                target = pool[int(rng.integers(0, len(pool)))]
                lines.append(_tweet_line(tid, u, stamp, target, followers, verified, rng))
        # a few records the keyword/language filter must drop
        tid += 1
        lines.append(_tweet_line(tid, active[0], month_start, None, followers, verified, rng,
                                 text="nothing to see here", lang="en"))
        for s in (0, 1):
            for u in by_side[s][:cores_per_side]:
                seed_rows.append((m, u, Label.NOVAX if s == 0 else Label.PROVAX))
        series.append((m, float(n_tweets + rng.integers(0, 10))))
        month_start = _next_month(month_start)
    return lines, seed_rows, series


def _tweet_line(tid, user, stamp, retweet_of, followers, verified, rng, text=None, lang="it"):
    if text is None:
        text = _SAMPLE_TEXTS[int(rng.integers(0, len(_SAMPLE_TEXTS)))]
    rec = {
        "id": f"t{tid:08d}",
        "author_id": user,
        "created_at": stamp.strftime("%Y-%m-%dT%H:%M:%S+00:00"),
        "text": text,
        "lang": lang,
        "retweet_of_author_id": retweet_of,
        "author_verified": verified[user],
        "author_followers": followers[user],
    }
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def _next_month(dt: datetime) -> datetime:
    if dt.month == 12:
        return dt.replace(year=dt.year + 1, month=1)
    return dt.replace(month=dt.month + 1)
