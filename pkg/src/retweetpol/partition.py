"""Multilevel two-way graph partitioning.

The classic coarsen / partition / refine scheme: heavy-edge matching shrinks
the graph level by level, a greedy BFS region growing partitions the
coarsest graph, and the assignment is projected back with boundary
refinement at every level.  A call is fully deterministic for a given
(graph, beta, eps, seed); randomness is confined to the matching visit order
and the region-growing start nodes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import MonthlyGraph, is_connected
from .rng import hash64

logger = logging.getLogger(__name__)

COARSEN_STOP_NODES = 100   # stop once a level has fewer nodes than this
COARSEN_MIN_SHRINK = 0.05  # or shrinks by less than this fraction
INITIAL_TRIALS = 4
DEFAULT_EPS = 0.05


def balance_floor(total_weight: int, beta: float, eps: float) -> int:
    """Minimum admissible side weight: round(beta * (1 - eps) * W).

    The integral floor is the two-way equivalent of capping the larger side
    at ceil((1 - beta*(1-eps)) * W); a literal fractional bound would be
    unsatisfiable for odd node counts at beta = 0.5.
    """
    return int(math.floor(beta * (1.0 - eps) * total_weight + 0.5))


@dataclass
class CoarseningLevel:
    """One graph in the coarsening hierarchy.

    ``node_weights[v]`` counts the original users merged into v, and
    ``match`` maps this level's nodes to the next (coarser) level, None on
    the coarsest level.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    node_weights: np.ndarray
    match: np.ndarray | None = None

    @property
    def n(self) -> int:
        return self.indptr.shape[0] - 1

    @property
    def total_weight(self) -> int:
        return int(self.node_weights.sum())

    @classmethod
    def from_graph(cls, g: MonthlyGraph) -> "CoarseningLevel":
        return cls(
            indptr=g.indptr,
            indices=g.indices,
            weights=g.weights,
            node_weights=np.ones(g.n, np.int64),
        )


@dataclass
class PartitionAssignment:
    month_index: int
    side: np.ndarray            # uint8 per node, values {0, 1}
    balance_target: float       # beta
    tolerance: float            # eps
    seed: int
    edge_cut: int

    def recompute_cut(self, level: CoarseningLevel) -> int:
        return int(_kernels.cut_weight(level.indptr, level.indices, level.weights, self.side))


def coarsen(g: MonthlyGraph, seed: int) -> list[CoarseningLevel]:
    """Build the coarsening hierarchy by seeded heavy-edge matching.

    At least one matching pass runs; coarsening stops once a level has fewer
    than COARSEN_STOP_NODES nodes or shrinks by less than COARSEN_MIN_SHRINK.
    A pass that produces no shrink at all is discarded.
    """
    levels = [CoarseningLevel.from_graph(g)]
    step = 0
    while True:
        cur = levels[-1]
        order = _kernels.seeded_permutation(cur.n, np.uint64(hash64(seed, step)))
        partner = _kernels.heavy_edge_matching(cur.indptr, cur.indices, cur.weights, order)
        fine2coarse, indptr, indices, weights, node_w = _kernels.contract_matching(
            cur.indptr, cur.indices, cur.weights, cur.node_weights, partner
        )
        n_new = node_w.shape[0]
        if n_new == cur.n:
            break
        cur.match = fine2coarse
        levels.append(CoarseningLevel(indptr, indices, weights, node_w))
        if n_new < COARSEN_STOP_NODES or (cur.n - n_new) < COARSEN_MIN_SHRINK * cur.n:
            break
        step += 1
    return levels


def initial_partition(
    level: CoarseningLevel,
    beta: float,
    eps: float,
    seed: int,
    month_index: int = 0,
) -> PartitionAssignment:
    """Greedy region growing on the coarsest graph.

    BFS from a random start absorbs nodes into side 0 until it holds at
    least beta of the total weight; the best of INITIAL_TRIALS trials is
    kept, preferring balanced results, then smaller cuts.
    """
    n = level.n
    total = level.total_weight
    if n == 1:
        logger.warning("initial partition on a single supernode is degenerate")
        return PartitionAssignment(month_index, np.zeros(1, np.uint8), beta, eps, seed, 0)
    target = beta * total
    floor_w = balance_floor(total, beta, eps)
    best_side = None
    best_key = None
    for trial in range(INITIAL_TRIALS):
        start = hash64(seed, trial) % n
        side = _kernels.grow_region(level.indptr, level.indices, level.node_weights, start, target)
        cut = int(_kernels.cut_weight(level.indptr, level.indices, level.weights, side))
        w0 = int(level.node_weights[side == 0].sum())
        balanced = min(w0, total - w0) >= floor_w
        key = (0 if balanced else 1, cut, trial)
        if best_key is None or key < best_key:
            best_key = key
            best_side = side
    cut = int(_kernels.cut_weight(level.indptr, level.indices, level.weights, best_side))
    return PartitionAssignment(month_index, best_side, beta, eps, seed, cut)


def refine(
    levels: list[CoarseningLevel],
    assignment: PartitionAssignment,
    seed: int | None = None,
) -> PartitionAssignment:
    """Project a coarsest-level assignment down to level 0 with boundary
    refinement at every level.

    Moves are greedy first-improvement by highest positive gain (ties:
    smallest node index) and never violate the balance floor; the seed
    parameter is accepted for interface symmetry but the pass is
    deterministic.  The returned edge_cut never exceeds the input cut.
    """
    beta = assignment.balance_target
    eps = assignment.tolerance
    side = assignment.side.astype(np.uint8).copy()
    total = levels[0].total_weight
    floor_w = balance_floor(total, beta, eps)
    for i in range(len(levels) - 1, -1, -1):
        lev = levels[i]
        if i < len(levels) - 1:
            side = side[levels[i].match]
        _kernels.refine_side(lev.indptr, lev.indices, lev.weights, lev.node_weights, side, floor_w)
    cut = int(_kernels.cut_weight(levels[0].indptr, levels[0].indices, levels[0].weights, side))
    return PartitionAssignment(
        assignment.month_index, side, beta, eps, assignment.seed, cut
    )


def bipartition(
    g: MonthlyGraph,
    beta: float,
    eps: float,
    seed: int,
    check_connected: bool = True,
) -> PartitionAssignment:
    """Full multilevel bipartition: coarsen, partition the coarsest graph,
    refine back down.  Deterministic for identical (g, beta, eps, seed)."""
    if g.n < 2:
        raise ValueError(f"bipartition needs at least 2 nodes, got {g.n}")
    if not 0.0 < beta <= 0.5:
        raise ValueError(f"balance target must lie in (0, 0.5], got {beta}")
    if check_connected and not is_connected(g):
        raise ValueError("bipartition requires a connected graph; pass the giant component")
    levels = coarsen(g, hash64(seed, 0xC0A5))
    init = initial_partition(
        levels[-1], beta, eps, hash64(seed, 0x1417), month_index=g.month_index
    )
    result = refine(levels, init)
    return PartitionAssignment(
        g.month_index, result.side, beta, eps, seed, result.edge_cut
    )


def edge_cut(g: MonthlyGraph, side: np.ndarray) -> int:
    """Sum of weights of edges crossing the two sides."""
    side = np.asarray(side, np.uint8)
    if side.shape[0] != g.n:
        raise ValueError("side array must cover every node")
    return int(_kernels.cut_weight(g.indptr, g.indices, g.weights, side))
