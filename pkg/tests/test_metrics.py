"""The five graph statistics and relative-distance comparison."""

import math

import numpy as np
import pytest

from lgsg import (
    Graph,
    MetricsReport,
    assortativity,
    average_degree,
    avg_clustering,
    compute_report,
    edge_distribution_entropy,
    gini,
    relative_distance,
)

from .reference import (
    brute_assortativity,
    brute_average_degree,
    brute_clustering,
    brute_entropy,
    brute_gini,
)
from .util import complete_graph, cycle_graph, path_graph, random_gnp, star_graph


class TestAverageDegree:
    def test_triangle(self):
        assert average_degree(complete_graph(3)) == 2.0

    def test_cora_sized_counts(self):
        g = Graph(2708, [])
        # only the count arithmetic matters here
        assert abs(2 * 5278 / 2708 - 3.8981) < 1e-4

    def test_edgeless(self):
        assert average_degree(Graph(3, [])) == 0.0


class TestEntropy:
    def test_regular_graphs_score_one(self):
        for g in (cycle_graph(5), complete_graph(4), Graph(2, [(0, 1)])):
            assert edge_distribution_entropy(g) == pytest.approx(1.0, abs=1e-12)

    def test_star4_hand_value(self):
        expected = -(0.5 * math.log(0.5) + 3 * (1 / 6) * math.log(1 / 6)) / math.log(4)
        val = edge_distribution_entropy(star_graph(4))
        assert val == pytest.approx(expected, rel=1e-12)
        assert val == pytest.approx(0.8963, abs=1e-4)

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            edge_distribution_entropy(Graph(3, []))


class TestGini:
    def test_regular_graph_zero(self):
        assert gini(cycle_graph(6)) == 0.0

    def test_star4(self):
        assert gini(star_graph(4)) == pytest.approx(0.25, rel=1e-12)

    def test_path3(self):
        assert gini(path_graph(3)) == pytest.approx(4 / 24, rel=1e-12)

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            gini(Graph(2, []))


class TestClustering:
    def test_triangle(self):
        assert avg_clustering(complete_graph(3)) == 1.0

    def test_star_has_none(self):
        assert avg_clustering(star_graph(7)) == 0.0

    def test_k4_minus_edge(self):
        g = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
        assert avg_clustering(g) == pytest.approx((1 + 1 + 2 / 3 + 2 / 3) / 4, rel=1e-12)

    def test_triangle_free_zero(self):
        for g in (path_graph(6), cycle_graph(8), star_graph(5)):
            assert avg_clustering(g) == 0.0


class TestAssortativity:
    def test_regular_graph_undefined(self):
        assert assortativity(cycle_graph(5)) is None

    def test_star_perfectly_disassortative(self):
        for n in (4, 6, 11):
            assert assortativity(star_graph(n)) == pytest.approx(-1.0, rel=1e-12)

    def test_path3(self):
        assert assortativity(path_graph(3)) == pytest.approx(-1.0, rel=1e-12)

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            assortativity(Graph(2, []))


class TestRelativeDistance:
    def make(self, **kw):
        base = dict(avg_degree=4.0, ede=0.9, gini=0.2, clustering=0.3,
                    assortativity=0.1, n_nodes=10, n_edges=20)
        base.update(kw)
        return MetricsReport(**base)

    def test_identical_reports_zero(self):
        r = self.make()
        assert all(v == 0.0 for v in relative_distance(r, r).values())

    def test_ratio(self):
        rel = relative_distance(self.make(avg_degree=4.0), self.make(avg_degree=3.0))
        assert rel["avg_degree"] == pytest.approx(0.25)

    def test_assortativity_floor(self):
        rel = relative_distance(self.make(assortativity=0.0), self.make(assortativity=0.05))
        assert rel["assortativity"] == pytest.approx(5.0)

    def test_undefined_propagates(self):
        rel = relative_distance(self.make(assortativity=None), self.make())
        assert rel["assortativity"] is None
        rel = relative_distance(self.make(), self.make(assortativity=None))
        assert rel["assortativity"] is None


class TestOracleEquivalence:
    def test_random_graphs_match_brute_force(self):
        checked = 0
        for seed in range(120):
            n = 4 + seed % 27
            g = random_gnp(n, 0.25, seed)
            if g.n_edges == 0:
                continue
            edges = sorted(g.edges)
            assert average_degree(g) == pytest.approx(brute_average_degree(n, edges), abs=1e-9)
            assert edge_distribution_entropy(g) == pytest.approx(brute_entropy(n, edges), abs=1e-9)
            assert gini(g) == pytest.approx(brute_gini(n, edges), abs=1e-9)
            assert avg_clustering(g) == pytest.approx(brute_clustering(n, edges), abs=1e-9)
            ref = brute_assortativity(n, edges)
            mine = assortativity(g)
            if ref is None:
                assert mine is None
            else:
                assert mine == pytest.approx(ref, abs=1e-9)
            checked += 1
        assert checked >= 100

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(7)
        for seed in range(10):
            g = random_gnp(12, 0.3, 1000 + seed)
            if g.n_edges == 0:
                continue
            perm = rng.permutation(g.n)
            relabeled = Graph(g.n, [(perm[u], perm[v]) for u, v in g.edges])
            assert average_degree(relabeled) == pytest.approx(average_degree(g), abs=1e-12)
            assert edge_distribution_entropy(relabeled) == pytest.approx(
                edge_distribution_entropy(g), abs=1e-12)
            assert gini(relabeled) == pytest.approx(gini(g), abs=1e-12)
            assert avg_clustering(relabeled) == pytest.approx(avg_clustering(g), abs=1e-12)
            a, b = assortativity(g), assortativity(relabeled)
            if a is None:
                assert b is None
            else:
                assert b == pytest.approx(a, abs=1e-12)

    def test_value_ranges(self):
        for seed in range(30):
            g = random_gnp(10 + seed % 15, 0.3, 2000 + seed)
            if g.n_edges == 0:
                continue
            assert 0.0 < edge_distribution_entropy(g) <= 1.0 + 1e-12
            assert 0.0 <= gini(g) < 1.0
            a = assortativity(g)
            if a is not None:
                assert -1.0 - 1e-9 <= a <= 1.0 + 1e-9


class TestReportSerialization:
    def test_json_keys_and_null(self):
        g = cycle_graph(5)
        rep = compute_report(g)
        d = rep.to_dict()
        assert list(d.keys()) == [
            "avg_degree", "ede", "gini", "clustering", "assortativity",
            "n_nodes", "n_edges",
        ]
        assert d["assortativity"] is None
        assert "null" in rep.to_json()
        assert MetricsReport.from_dict(d) == rep
