
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import clique_edges, graph_from
from retweetpol.graph import (
    MonthlyGraph,
    UndefinedMetricError,
    avg_clustering,
    avg_degree,
    degree_histogram,
    density,
    fit_power_law_alpha,
    giant_component,
    metrics_row,
    s_metric,
)
from retweetpol.synth import random_connected_graph


class TestGiantComponent:
    def test_sizes_5_and_3(self):
        edges = clique_edges(range(5)) + [(5, 6, 1), (6, 7, 1)]
        gc, frac = giant_component(graph_from(edges, n=8))
        assert gc.n == 5
        assert frac == pytest.approx(0.625)

    def test_connected_identity(self, triangle):
        gc, frac = giant_component(triangle)
        assert gc.same_structure(triangle)
        assert frac == 1.0

    def test_tie_break_smallest_user_id(self):
        # two 4-cycles; the winner holds the smallest user_id "u000"
        edges = [(0, 2, 1), (2, 4, 1), (4, 6, 1), (6, 0, 1),
                 (1, 3, 1), (3, 5, 1), (5, 7, 1), (7, 1, 1)]
        g = graph_from(edges, n=8)
        gc, frac = giant_component(g)
        assert gc.n == 4
        assert "u000" in gc.node_ids
        assert frac == pytest.approx(0.5)

    def test_empty_graph(self):
        from retweetpol.graph import empty_graph

        gc, frac = giant_component(empty_graph(1))
        assert gc.n == 0 and frac == 1.0


class TestDensity:
    def test_triangle(self, triangle):
        assert density(triangle) == 1.0

    def test_path3(self, path3):
        assert density(path3) == pytest.approx(2 / 3)

    def test_star4(self, star4):
        assert density(star4) == pytest.approx(oracles.density_oracle(star4)) == 0.5

    def test_single_node_undefined(self):
        g = MonthlyGraph.from_edges(1, ["a"], [])
        with pytest.raises(UndefinedMetricError):
            density(g)


class TestClustering:
    def test_triangle(self, triangle):
        assert avg_clustering(triangle) == 1.0

    def test_path3(self, path3):
        assert avg_clustering(path3) == 0.0

    def test_k4_minus_edge(self):
        g = graph_from([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        expected = oracles.clustering_oracle(g)
        assert expected == pytest.approx(5 / 6)
        assert avg_clustering(g) == pytest.approx(expected, abs=1e-15)


class TestAvgDegree:
    def test_triangle(self, triangle):
        assert avg_degree(triangle) == 2.0

    def test_star4(self, star4):
        assert avg_degree(star4) == pytest.approx(oracles.avg_degree_oracle(star4)) == 1.5

    def test_single_node(self):
        assert avg_degree(MonthlyGraph.from_edges(1, ["a"], [])) == 0.0


class TestSMetric:
    def test_star4(self, star4):
        assert s_metric(star4) == oracles.s_metric_oracle(star4) == 9.0

    def test_triangle(self, triangle):
        assert s_metric(triangle) == oracles.s_metric_oracle(triangle) == 12.0

    def test_path3(self, path3):
        assert s_metric(path3) == oracles.s_metric_oracle(path3) == 4.0


class TestDegreeHistogram:
    def test_star4(self, star4):
        hist = degree_histogram(star4)
        assert hist.counts == {1: 3, 3: 1}

    def test_clique5(self):
        g = graph_from(clique_edges(range(5)), n=5)
        assert degree_histogram(g).counts == {4: 5}

    def test_small_fit_warns_and_omits_alpha(self, star4):
        with pytest.warns(UserWarning):
            hist = degree_histogram(star4, fit=True)
        assert hist.alpha is None
        assert hist.counts == {1: 3, 3: 1}

    def test_power_law_fit_recovers_exponent(self):
        samples = oracles.sample_discrete_power_law(2.5, 10_000, seed=42)
        alpha = fit_power_law_alpha(samples)
        assert alpha == pytest.approx(2.5, abs=0.1)


def relabel(g: MonthlyGraph, perm) -> MonthlyGraph:
    inv = {old: new for new, old in enumerate(perm)}
    edges = [(min(inv[u], inv[v]), max(inv[u], inv[v]), w) for u, v, w in g.edge_list()]
    ids = [g.node_ids[perm[i]] for i in range(g.n)]
    return MonthlyGraph.from_edges(g.month_index, ids, edges)


class TestProperties:
    @given(st.integers(0, 10_000))
    @settings(max_examples=25, deadline=None)
    def test_oracle_equivalence_random_graphs(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 41))
        g = random_connected_graph(n, int(rng.integers(0, 3 * n)), seed)
        assert density(g) == pytest.approx(oracles.density_oracle(g), abs=1e-12)
        assert avg_clustering(g) == pytest.approx(oracles.clustering_oracle(g), abs=1e-12)
        assert avg_degree(g) == pytest.approx(oracles.avg_degree_oracle(g), abs=1e-12)
        assert s_metric(g) == pytest.approx(oracles.s_metric_oracle(g), abs=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_relabeling_invariance(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(3, 30))
        g = random_connected_graph(n, int(rng.integers(0, 2 * n)), seed)
        h = relabel(g, rng.permutation(n).tolist())
        assert density(h) == pytest.approx(density(g), abs=1e-12)
        assert avg_clustering(h) == pytest.approx(avg_clustering(g), abs=1e-12)
        assert avg_degree(h) == pytest.approx(avg_degree(g), abs=1e-12)
        assert s_metric(h) == pytest.approx(s_metric(g), abs=1e-12)

    @given(st.integers(0, 10_000))
    @settings(max_examples=20, deadline=None)
    def test_metric_bounds(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 30))
        g = random_connected_graph(n, int(rng.integers(0, 2 * n)), seed)
        assert 0.0 <= density(g) <= 1.0
        assert 0.0 <= avg_clustering(g) <= 1.0
        assert avg_degree(g) >= 0.0
        assert s_metric(g) >= g.m  # every degree >= 1 when connected

    @pytest.mark.parametrize("n", [3, 5, 8])
    def test_complete_graph_extremes(self, n):
        g = graph_from(clique_edges(range(n)), n=n)
        assert density(g) == 1.0
        assert avg_clustering(g) == 1.0


class TestMetricsRow:
    def test_row_on_giant_component(self):
        edges = clique_edges(range(5)) + [(6, 7, 1)]
        row = metrics_row(graph_from(edges, n=8, month=4), fit=False)
        assert row.month_index == 4
        assert row.n == 5 and row.m == 10
        assert row.gc_fraction == pytest.approx(5 / 8)
        assert row.density == 1.0
        assert row.alpha is None
