"""Betweenness centrality on community-induced subgraphs.

Betweenness uses the unordered-pair convention (each shortest-path pair
counted once, endpoints excluded) on the unweighted graph.  The monthly
series thresholds every month's values against one pooled 95th percentile,
so the per-month exceedance fraction is comparable across months.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import MonthlyGraph, giant_component, induced
from .labels import Label
from .leaning import CommunityLabeling

logger = logging.getLogger(__name__)

DEFAULT_PERCENTILE = 95.0


@dataclass
class BetweennessResult:
    month_index: int
    node_ids: tuple[str, ...]
    values: np.ndarray
    component_fraction: float    # share of the induced subgraph analyzed
    pooled_p95: float | None = None
    fraction_high: float | None = None


def induced_subgraph(
    g: MonthlyGraph, labeling: CommunityLabeling, side: Label
) -> MonthlyGraph:
    """Subgraph on the nodes carrying ``side``, keeping internal edges."""
    if labeling.node_ids != g.node_ids:
        raise ValueError("labeling does not cover this graph's nodes")
    keep = np.flatnonzero(np.array([lab is side for lab in labeling.labels]))
    return induced(g, keep)


def betweenness(g: MonthlyGraph) -> np.ndarray:
    """Exact betweenness values (unordered pairs, unnormalized)."""
    if g.n == 0:
        return np.zeros(0, np.float64)
    return _kernels.betweenness_values(g.indptr, g.indices)


def month_betweenness(
    g: MonthlyGraph, labeling: CommunityLabeling, side: Label
) -> BetweennessResult:
    """Betweenness of the side-induced subgraph, computed on its largest
    connected component when disconnected."""
    sub = induced_subgraph(g, labeling, side)
    if sub.n == 0:
        return BetweennessResult(g.month_index, (), np.zeros(0), 1.0)
    gc, frac = giant_component(sub)
    if frac < 1.0:
        logger.info(
            "month %d: induced %s subgraph disconnected, analyzing %.1f%%",
            g.month_index, side.value, 100 * frac,
        )
    return BetweennessResult(g.month_index, gc.node_ids, betweenness(gc), frac)


def high_betweenness_series(
    results: dict[int, np.ndarray], percentile: float = DEFAULT_PERCENTILE
) -> tuple[float, dict[int, float]]:
    """Pool all months' values, take the given percentile (linear
    interpolation), and report each month's share of strictly-exceeding
    nodes."""
    arrays = [v for v in results.values() if len(v) > 0]
    if not arrays:
        raise ValueError("no month has a non-empty subgraph")
    pooled = np.concatenate(arrays)
    threshold = float(np.percentile(pooled, percentile))
    fractions = {
        month: (float(np.count_nonzero(vals > threshold) / len(vals)) if len(vals) else 0.0)
        for month, vals in results.items()
    }
    return threshold, fractions
