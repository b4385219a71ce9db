import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import clique_edges, graph_from
from retweetpol.centrality import (
    betweenness,
    high_betweenness_series,
    induced_subgraph,
    month_betweenness,
)
from retweetpol.graph import MonthlyGraph
from retweetpol.labels import Label
from retweetpol.leaning import CommunityLabeling
from retweetpol.synth import random_connected_graph


def labeled(g, is_novax):
    labels = [Label.NOVAX if b else Label.PROVAX for b in is_novax]
    return CommunityLabeling(g.month_index, g.node_ids, labels, ["propagated"] * g.n)


def random_tree(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(int(rng.integers(0, v)), v, 1) for v in range(1, n)]
    return MonthlyGraph.from_edges(1, [f"u{i:03d}" for i in range(n)], edges)


class TestInducedSubgraph:
    def test_all_one_side_identity(self, triangle):
        sub = induced_subgraph(triangle, labeled(triangle, [True] * 3), Label.NOVAX)
        assert sub.same_structure(triangle)

    def test_no_members_empty(self, triangle):
        sub = induced_subgraph(triangle, labeled(triangle, [True] * 3), Label.PROVAX)
        assert sub.n == 0

    def test_bridge_dropped(self):
        edges = clique_edges(range(3)) + clique_edges(range(3, 6)) + [(2, 3, 1)]
        g = graph_from(edges, n=6)
        lab = labeled(g, [True] * 3 + [False] * 3)
        nov = induced_subgraph(g, lab, Label.NOVAX)
        pro = induced_subgraph(g, lab, Label.PROVAX)
        assert nov.n == 3 and nov.m == 3
        assert pro.n == 3 and pro.m == 3


class TestBetweenness:
    def test_path3(self, path3):
        assert betweenness(path3).tolist() == [0.0, 1.0, 0.0]

    def test_star(self, star4):
        assert betweenness(star4).tolist() == [3.0, 0.0, 0.0, 0.0]

    def test_clique_zero(self):
        g = graph_from(clique_edges(range(5)), n=5)
        assert betweenness(g).tolist() == [0.0] * 5

    @given(st.integers(0, 3000))
    @settings(max_examples=12, deadline=None)
    def test_oracle_equivalence(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 51))
        g = random_connected_graph(n, int(rng.integers(0, 2 * n)), seed)
        got = betweenness(g)
        want = oracles.betweenness_oracle(g)
        assert np.allclose(got, want, atol=1e-9)

    @given(st.integers(0, 3000))
    @settings(max_examples=12, deadline=None)
    def test_tree_closed_form(self, seed):
        # on a tree the values sum to sum over pairs of (path length - 1)
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 50))
        g = random_tree(n, seed)
        vals = betweenness(g)
        a = oracles.adjacency_matrix(g) > 0
        import math

        dist = np.full((n, n), math.inf)
        for v in range(n):
            dist[v, v] = 0
        for u in range(n):
            for v in range(n):
                if a[u, v]:
                    dist[u, v] = 1
        for k in range(n):
            for i in range(n):
                for j in range(n):
                    if dist[i, k] + dist[k, j] < dist[i, j]:
                        dist[i, j] = dist[i, k] + dist[k, j]
        expected = sum(
            dist[s, t] - 1 for s in range(n) for t in range(s + 1, n)
        )
        assert vals.sum() == pytest.approx(expected, abs=1e-9)

    def test_disconnected_subgraph_uses_largest_component(self):
        edges = clique_edges(range(4)) + [(4, 5, 1)] + [(0, 6, 1), (4, 6, 1)]
        g = graph_from(edges, n=7)
        lab = labeled(g, [True] * 6 + [False])  # drop the connector node
        res = month_betweenness(g, lab, Label.NOVAX)
        assert len(res.node_ids) == 4
        assert res.component_fraction == pytest.approx(4 / 6)


class TestSeries:
    def test_single_month_five_percent(self):
        rng = np.random.default_rng(3)
        vals = rng.permutation(np.linspace(1, 1000, 1000))
        p95, fracs = high_betweenness_series({1: vals})
        assert fracs[1] == pytest.approx(0.05, abs=0.001)

    def test_shifted_second_month(self):
        # month 2 strictly dominates month 1: the high tail concentrates there
        a = np.linspace(1, 100, 100)
        b = np.linspace(200, 300, 100)
        p95, fracs = high_betweenness_series({1: a, 2: b})
        assert fracs[1] == pytest.approx(0.0)
        assert fracs[2] == pytest.approx(0.10, abs=0.001)

    def test_identical_months_flat(self):
        rng = np.random.default_rng(7)
        base = rng.random(400) * 50
        p95, fracs = high_betweenness_series({m: base.copy() for m in (1, 2, 3)})
        for m in (1, 2, 3):
            assert fracs[m] == pytest.approx(0.05, abs=0.02)

    def test_pooled_fraction_bounded(self):
        rng = np.random.default_rng(11)
        months = {m: rng.random(rng.integers(50, 200)) for m in range(1, 6)}
        p95, fracs = high_betweenness_series(months)
        total = sum(len(v) for v in months.values())
        high = sum(int(round(fracs[m] * len(months[m]))) for m in months)
        assert high / total <= 0.05 + 0.01

    def test_all_empty_rejected(self):
        with pytest.raises(ValueError):
            high_betweenness_series({1: np.zeros(0)})
