from datetime import datetime, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import clique_edges, graph_from
from retweetpol.graph import MonthlyGraph
from retweetpol.ingest import MonthBucket, TweetRecord
from retweetpol.labels import Label
from retweetpol.leaning import CommunityLabeling
from retweetpol.polarization import (
    DegenerateLabelingError,
    UndefinedScoreError,
    community_densities,
    month_report,
    polarization_score,
    proportions_and_productivity,
)
from retweetpol.synth import PlantedSpec, planted_partition, random_connected_graph


def labeled(g: MonthlyGraph, is_novax) -> CommunityLabeling:
    labels = [Label.NOVAX if b else Label.PROVAX for b in is_novax]
    return CommunityLabeling(g.month_index, g.node_ids, labels, ["propagated"] * g.n)


def rec(author, tid):
    return TweetRecord(
        tweet_id=tid, author_id=author,
        created_at=datetime(2019, 1, 5, tzinfo=timezone.utc),
        text="vaccino", lang="it", retweet_of_author_id=None,
        author_verified=False, author_followers=0,
    )


class TestDensities:
    def test_two_disjoint_cliques(self):
        g = graph_from(clique_edges(range(4)) + clique_edges(range(4, 8)), n=8)
        e_n, e_p, e_o = community_densities(g, labeled(g, [True] * 4 + [False] * 4))
        assert (e_n, e_p, e_o) == (1.0, 1.0, 0.0)

    def test_complete_bipartite(self):
        edges = [(u, v, 1) for u in range(3) for v in range(3, 6)]
        g = graph_from(edges, n=6)
        e_n, e_p, e_o = community_densities(g, labeled(g, [True] * 3 + [False] * 3))
        assert (e_n, e_p, e_o) == (0.0, 0.0, 1.0)

    def test_k4_split(self):
        g = graph_from(clique_edges(range(4)), n=4)
        e_n, e_p, e_o = community_densities(g, labeled(g, [True, True, False, False]))
        assert (e_n, e_p, e_o) == (1.0, 1.0, 1.0)
        assert (e_n, e_p, e_o) == oracles.densities_oracle(g, [True, True, False, False])

    def test_empty_community_rejected(self, triangle):
        with pytest.raises(DegenerateLabelingError):
            community_densities(triangle, labeled(triangle, [True, True, True]))

    def test_singleton_community_density_zero(self, triangle):
        e_n, e_p, e_o = community_densities(triangle, labeled(triangle, [True, False, False]))
        assert e_n == 0.0
        assert e_p == 1.0
        assert e_o == 1.0

    @given(st.integers(0, 3000))
    @settings(max_examples=20, deadline=None)
    def test_brute_force_pair_scan(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 60))
        g = random_connected_graph(n, int(rng.integers(0, 2 * n)), seed)
        is_novax = (rng.random(n) < 0.5).tolist()
        if not any(is_novax) or all(is_novax):
            is_novax[0] = True
            is_novax[-1] = False
        got = community_densities(g, labeled(g, is_novax))
        want = oracles.densities_oracle(g, is_novax)
        for a, b in zip(got, want):
            assert a == pytest.approx(b, abs=1e-12)


class TestScore:
    def test_extremes_and_midpoint(self):
        assert polarization_score(1, 1, 0) == 1.0
        assert polarization_score(0, 0, 1) == -1.0
        assert polarization_score(1, 1, 1) == pytest.approx(1 / 3)

    def test_k4_cross_check(self):
        g = graph_from(clique_edges(range(4)), n=4)
        e = community_densities(g, labeled(g, [True, True, False, False]))
        assert polarization_score(*e) == pytest.approx(1 / 3)

    def test_all_zero_rejected(self):
        with pytest.raises(UndefinedScoreError):
            polarization_score(0.0, 0.0, 0.0)

    def test_label_swap_symmetry(self):
        g = graph_from(clique_edges(range(3)) + clique_edges(range(3, 7)) + [(0, 3, 1)], n=7)
        mask = [True, True, True, False, False, False, False]
        r1 = month_report(g, labeled(g, mask))
        r2 = month_report(g, labeled(g, [not b for b in mask]))
        assert r1.score == pytest.approx(r2.score, abs=1e-12)

    def test_bounds_and_extreme_iff(self):
        for e_n, e_p, e_o in [(0.5, 0.1, 0.2), (0.0, 0.3, 0.0), (0.2, 0.0, 0.9)]:
            s = polarization_score(e_n, e_p, e_o)
            assert -1.0 <= s <= 1.0
            assert (s == 1.0) == (e_o == 0.0 and e_n + e_p > 0)
            assert (s == -1.0) == (e_n == 0.0 and e_p == 0.0)

    def test_monotone_in_p_out(self):
        # planted graphs: polarization strictly rises as p_out falls
        grid = [0.02, 0.01, 0.005, 0.002]
        wins = 0
        for seed in range(5):
            scores = []
            for p_out in grid:
                g, truth = planted_partition(PlantedSpec(100, 100, 0.05, p_out, seed))
                r = month_report(g, labeled(g, (truth == 0).tolist()))
                scores.append(r.score)
            if all(scores[i] < scores[i + 1] for i in range(len(scores) - 1)):
                wins += 1
        assert wins >= 3


class TestProportions:
    def test_shares(self):
        g = graph_from(clique_edges(range(3)) + clique_edges(range(3, 10)) + [(0, 3, 1)], n=10)
        lab = labeled(g, [True] * 3 + [False] * 7)
        bucket = MonthBucket(1, None, None, [])
        rows = proportions_and_productivity({1: lab}, [bucket])
        assert rows[0].prop_n == pytest.approx(0.3)
        assert rows[0].prop_p == pytest.approx(0.7)

    def test_retweets_count_toward_productivity(self):
        g = graph_from([(0, 1)], n=2, ids=["A", "B"])
        lab = labeled(g, [True, False])
        records = [rec("A", f"t{i}") for i in range(3)]
        records += [
            TweetRecord(f"r{i}", "A", datetime(2019, 1, 6, tzinfo=timezone.utc),
                        "vaccino", "it", "B", False, 0)
            for i in range(2)
        ]
        rows = proportions_and_productivity({1: lab}, [MonthBucket(1, None, None, records)])
        assert rows[0].tweets_n == 5
        assert rows[0].tweets_p == 0

    def test_constructed_two_to_one(self):
        ids = [f"n{i}" for i in range(10)] + [f"p{i}" for i in range(10)]
        g = graph_from([(i, i + 10, 1) for i in range(10)], n=20, ids=ids)
        lab = labeled(g, [True] * 10 + [False] * 10)
        records = []
        for i in range(10):
            records.append(rec(f"n{i}", f"tn{i}"))
            records.append(rec(f"p{i}", f"tp{i}a"))
            records.append(rec(f"p{i}", f"tp{i}b"))
        rows = proportions_and_productivity({1: lab}, [MonthBucket(1, None, None, records)])
        assert rows[0].tweets_p == 20
        assert rows[0].tweets_n == 10

    def test_unlabeled_month_yields_nulls(self, caplog):
        rows = proportions_and_productivity({}, [MonthBucket(4, None, None, [])])
        assert rows[0].prop_n is None
        assert "month 4" in caplog.text

    def test_unlabeled_users_contribute_nothing(self):
        g = graph_from([(0, 1)], n=2, ids=["A", "B"])
        lab = labeled(g, [True, False])
        records = [rec("A", "t1"), rec("stranger", "t2")]
        rows = proportions_and_productivity({1: lab}, [MonthBucket(1, None, None, records)])
        assert rows[0].tweets_n == 1
        assert rows[0].tweets_p == 0
