"""Immutable undirected weighted graph for one month, plus structural metrics.

The adjacency is stored CSR-style (indptr/indices/weights) with neighbor
lists sorted by index, which is what the partitioning and centrality kernels
operate on directly.  Metrics treat the graph as unweighted; weights exist
for the coarsening stage only.
"""

from __future__ import annotations

import csv
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _kernels

logger = logging.getLogger(__name__)

MIN_FIT_NODES = 50  # below this a power-law exponent is not reported


class UndefinedMetricError(ValueError):
    """A metric was requested on a graph where it is undefined."""


@dataclass(frozen=True)
class MonthlyGraph:
    month_index: int
    node_ids: tuple[str, ...]
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.node_ids)

    @property
    def m(self) -> int:
        return self.indices.shape[0] // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> zip:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return zip(self.indices[lo:hi].tolist(), self.weights[lo:hi].tolist())

    def edge_list(self) -> list[tuple[int, int, int]]:
        """Undirected edges as (u, v, w) with u < v, sorted."""
        out = []
        for v in range(self.n):
            for u, w in self.neighbors(v):
                if v < u:
                    out.append((v, u, w))
        return out

    @classmethod
    def from_edges(
        cls,
        month_index: int,
        node_ids: Sequence[str],
        edges: Iterable[tuple[int, int, int]],
    ) -> "MonthlyGraph":
        """Build from undirected (u, v, w) index triples; u != v required."""
        n = len(node_ids)
        deg = np.zeros(n + 1, np.int64)
        elist = []
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if w < 1:
                raise ValueError(f"edge weight must be >= 1, got {w}")
            elist.append((u, v, w))
            deg[u + 1] += 1
            deg[v + 1] += 1
        indptr = np.cumsum(deg)
        indices = np.empty(2 * len(elist), np.int64)
        weights = np.empty(2 * len(elist), np.int64)
        cursor = indptr[:-1].copy()
        for u, v, w in elist:
            indices[cursor[u]] = v
            weights[cursor[u]] = w
            cursor[u] += 1
            indices[cursor[v]] = u
            weights[cursor[v]] = w
            cursor[v] += 1
        for v in range(n):  # sort each row by neighbor index
            lo, hi = indptr[v], indptr[v + 1]
            order = np.argsort(indices[lo:hi], kind="stable")
            indices[lo:hi] = indices[lo:hi][order]
            weights[lo:hi] = weights[lo:hi][order]
        return cls(month_index, tuple(node_ids), indptr, indices, weights)

    def validate(self) -> None:
        """Check structural invariants (used by tests)."""
        n = self.n
        assert self.indptr.shape == (n + 1,)
        assert self.indptr[0] == 0 and self.indptr[-1] == self.indices.shape[0]
        seen = {}
        for v in range(n):
            prev = -1
            for u, w in self.neighbors(v):
                assert u != v, "self-loop"
                assert u > prev, "unsorted or parallel adjacency entry"
                prev = u
                assert w >= 1
                seen[(v, u)] = w
        for (v, u), w in seen.items():
            assert seen.get((u, v)) == w, "asymmetric adjacency"
        assert self.indices.shape[0] % 2 == 0

    def same_structure(self, other: "MonthlyGraph") -> bool:
        return (
            self.month_index == other.month_index
            and self.node_ids == other.node_ids
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.weights, other.weights)
        )


def empty_graph(month_index: int) -> MonthlyGraph:
    return MonthlyGraph(
        month_index,
        (),
        np.zeros(1, np.int64),
        np.zeros(0, np.int64),
        np.zeros(0, np.int64),
    )


def induced(g: MonthlyGraph, keep: np.ndarray) -> MonthlyGraph:
    """Subgraph on the node indices in ``keep`` (ascending), recompacted."""
    keep = np.asarray(keep, np.int64)
    remap = np.full(g.n, -1, np.int64)
    remap[keep] = np.arange(len(keep))
    edges = []
    for v in keep.tolist():
        for u, w in g.neighbors(v):
            if remap[u] >= 0 and v < u:
                edges.append((int(remap[v]), int(remap[u]), int(w)))
    ids = [g.node_ids[v] for v in keep.tolist()]
    return MonthlyGraph.from_edges(g.month_index, ids, edges)


def giant_component(g: MonthlyGraph) -> tuple[MonthlyGraph, float]:
    """Largest connected component (ties: smallest minimum user_id) and the
    retained node fraction."""
    if g.n == 0:
        return g, 1.0
    comp = _kernels.connected_components(g.indptr, g.indices)
    sizes = np.bincount(comp)
    best = np.flatnonzero(sizes == sizes.max())
    if len(best) > 1:
        winner = min(best, key=lambda c: min(g.node_ids[v] for v in np.flatnonzero(comp == c)))
    else:
        winner = best[0]
    keep = np.flatnonzero(comp == winner)
    frac = len(keep) / g.n
    if len(keep) == g.n:
        return g, 1.0
    return induced(g, keep), frac


def is_connected(g: MonthlyGraph) -> bool:
    if g.n == 0:
        return True
    comp = _kernels.connected_components(g.indptr, g.indices)
    return int(comp.max()) == 0


def density(g: MonthlyGraph) -> float:
    if g.n < 2:
        raise UndefinedMetricError(f"density undefined for n={g.n}")
    return 2.0 * g.m / (g.n * (g.n - 1))


def avg_degree(g: MonthlyGraph) -> float:
    if g.n < 1:
        raise UndefinedMetricError("average degree undefined for empty graph")
    return 2.0 * g.m / g.n


def avg_clustering(g: MonthlyGraph) -> float:
    """Mean over nodes of 2*T(v) / (deg(v)*(deg(v)-1)), zero when deg < 2.

    Triangle counts per degree class are accumulated as exact rationals, so
    the returned mean is the true value rounded once (node-order free).
    """
    if g.n < 1:
        raise UndefinedMetricError("clustering undefined for empty graph")
    tri = _kernels.triangles_per_node(g.indptr, g.indices)
    deg = g.degrees()
    tri_by_degree: dict[int, int] = {}
    for v in range(g.n):
        d = int(deg[v])
        if d >= 2:
            tri_by_degree[d] = tri_by_degree.get(d, 0) + int(tri[v])
    total = Fraction(0)
    for d, t in tri_by_degree.items():
        total += Fraction(2 * t, d * (d - 1))
    return float(total / g.n)


def s_metric(g: MonthlyGraph) -> float:
    """Sum over undirected edges of the product of endpoint degrees."""
    deg = g.degrees().astype(np.float64)
    if g.m == 0:
        return 0.0
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    prod = deg[src] * deg[g.indices]
    return float(prod.sum() / 2.0)


_ZETA_K = 100_000


def _zeta_log_moment(alpha: float) -> float:
    """E[ln X] under the zeta(alpha) distribution on k >= 1, via truncated
    series plus integral tail corrections."""
    k = np.arange(1, _ZETA_K + 1, dtype=np.float64)
    pk = k ** (-alpha)
    logk = np.log(k)
    z = pk.sum()
    zlog = (pk * logk).sum()
    # tail for k > K: integral approximation of sum k^-a and ln(k) k^-a
    a1 = alpha - 1.0
    tail_z = _ZETA_K ** (-a1) / a1 + 0.5 * _ZETA_K ** (-alpha)
    lnK = np.log(_ZETA_K)
    tail_zlog = _ZETA_K ** (-a1) * (lnK / a1 + 1.0 / (a1 * a1)) + 0.5 * lnK * _ZETA_K ** (-alpha)
    return (zlog + tail_zlog) / (z + tail_z)


def fit_power_law_alpha(degrees: np.ndarray) -> float:
    """Discrete maximum-likelihood power-law exponent with minimum degree 1.

    Solves E_alpha[ln X] = mean(ln degree) for the zeta distribution by
    bisection (no xmin scanning).  Degenerate all-ones sequences have no
    finite solution.
    """
    degrees = np.asarray(degrees, np.float64)
    if np.any(degrees < 1):
        raise ValueError("power-law fit requires all degrees >= 1")
    mean_log = float(np.log(degrees).mean())
    if mean_log <= 0.0:
        raise ValueError("degenerate degree sequence: every degree is 1")
    lo, hi = 1.01, 25.0
    if _zeta_log_moment(lo) < mean_log:
        return lo
    if _zeta_log_moment(hi) > mean_log:
        return hi
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if _zeta_log_moment(mid) > mean_log:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class DegreeHistogram:
    counts: dict[int, int]
    alpha: float | None = None
    fitted: bool = field(default=False)

    def total(self) -> int:
        return sum(self.counts.values())


def degree_histogram(g: MonthlyGraph, fit: bool = False) -> DegreeHistogram:
    if g.n < 1:
        raise UndefinedMetricError("degree histogram undefined for empty graph")
    deg = g.degrees()
    uniq, cnt = np.unique(deg, return_counts=True)
    counts = {int(k): int(c) for k, c in zip(uniq, cnt)}
    alpha = None
    fitted = False
    if fit:
        if g.n >= MIN_FIT_NODES and deg.min() >= 1 and deg.max() > 1:
            alpha = fit_power_law_alpha(deg)
            fitted = True
        else:
            warnings.warn(
                f"power-law fit skipped: needs n >= {MIN_FIT_NODES} with all "
                f"degrees >= 1 (n={g.n})",
                stacklevel=2,
            )
    return DegreeHistogram(counts=counts, alpha=alpha, fitted=fitted)


def write_graph_csv(g: MonthlyGraph, nodes_path, edges_path) -> None:
    """Two CSVs: nodes (node_index,user_id) and edges (u_index,v_index,weight)
    with u < v sorted lexicographically as tuples."""
    with open(nodes_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node_index", "user_id"])
        for i, uid in enumerate(g.node_ids):
            w.writerow([i, uid])
    with open(edges_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u_index", "v_index", "weight"])
        for u, v, wt in g.edge_list():
            w.writerow([u, v, wt])


def read_graph_csv(nodes_path, edges_path, month_index: int) -> MonthlyGraph:
    with open(nodes_path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    ids: list[str] = [""] * (len(rows) - 1)
    for idx, uid in rows[1:]:
        ids[int(idx)] = uid
    edges = []
    with open(edges_path, newline="", encoding="utf-8") as fh:
        rdr = csv.reader(fh)
        next(rdr)
        for u, v, w in rdr:
            edges.append((int(u), int(v), int(w)))
    return MonthlyGraph.from_edges(month_index, ids, edges)


@dataclass
class MetricsRow:
    """One row of the per-month structural metrics table."""

    month_index: int
    n: int
    m: int
    gc_fraction: float
    density: float | None
    avg_clustering: float | None
    avg_degree: float | None
    s_metric: float | None
    alpha: float | None


def metrics_row(g: MonthlyGraph, fit: bool = True) -> MetricsRow:
    """Compute the metric battery on the giant component of ``g``."""
    gc, frac = giant_component(g)
    if gc.n < 2:
        return MetricsRow(g.month_index, gc.n, gc.m, frac, None, None,
                          avg_degree(gc) if gc.n else None, None, None)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        hist = degree_histogram(gc, fit=fit)
    return MetricsRow(
        month_index=g.month_index,
        n=gc.n,
        m=gc.m,
        gc_fraction=frac,
        density=density(gc),
        avg_clustering=avg_clustering(gc),
        avg_degree=avg_degree(gc),
        s_metric=s_metric(gc),
        alpha=hist.alpha,
    )
