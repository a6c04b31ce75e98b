"""Fitted classical generators: Erdos-Renyi, Barabasi-Albert, Kronecker."""

import itertools
import math

import numpy as np
import pytest

from lgsg import (
    Graph,
    KroneckerInitiator,
    KronFitConfig,
    barabasi_albert,
    erdos_renyi,
    gini,
    kronecker_generate,
    kronfit,
)
from lgsg.baselines import (
    ba_edge_count,
    fit_attachment,
    fit_edge_probability,
    kron_log_likelihood,
    kron_loglik_gradient,
    kron_pair_probability,
)
from lgsg.seeding import rng_for

from .util import complete_graph, random_gnp, star_graph


class TestErdosRenyi:
    def test_cora_sized_probability(self):
        # density from the citation-network node/edge counts
        assert 5278 / (2708 * 2707 / 2) == pytest.approx(0.001440, abs=1e-6)

    def test_complete_input_gives_complete_output(self):
        g = erdos_renyi(complete_graph(5), 7, rng_for(0))
        assert g.n == 7 and g.n_edges == 21

    def test_edge_count_within_four_sigma(self):
        g_in = random_gnp(200, 0.01, 3)
        p = fit_edge_probability(g_in)
        pairs = 1000 * 999 / 2
        g = erdos_renyi(g_in, 1000, rng_for(1))
        std = math.sqrt(pairs * p * (1 - p))
        assert abs(g.n_edges - pairs * p) < 4 * std

    def test_density_matches_over_seeds(self):
        g_in = random_gnp(100, 0.05, 4)
        p = fit_edge_probability(g_in)
        pairs = 300 * 299 / 2
        counts = [erdos_renyi(g_in, 300, rng_for(s)).n_edges for s in range(50)]
        se = math.sqrt(p * (1 - p) / (pairs * 50))
        assert abs(np.mean(counts) / pairs - p) < 3 * se


class TestBarabasiAlbert:
    def test_cora_sized_attachment(self):
        g = Graph(2708, [])
        # avg degree 2*5278/2708 = 3.898 -> half rounds to 2
        assert max(1, int(math.floor(3.8981 / 2 + 0.5))) == 2

    def test_attachment_fit_rounding(self):
        assert fit_attachment(star_graph(4)) == 1  # avg degree 1.5 -> 0.75 -> 1
        assert fit_attachment(complete_graph(5)) == 2  # 4 -> 2
        assert fit_attachment(complete_graph(6)) == 3  # 5 -> 2.5 rounds up

    def test_tree_for_single_attachment(self):
        g_in = star_graph(6)  # avg degree < 2 so m_a = 1
        g = barabasi_albert(g_in, 50, rng_for(2))
        assert g.n_edges == 49

    def test_edge_count_formula(self):
        g_in = complete_graph(5)  # m_a = 2
        g = barabasi_albert(g_in, 100, rng_for(3))
        assert g.n_edges == 2 * 98 + 1 == ba_edge_count(2, 100)

    def test_n_out_too_small(self):
        with pytest.raises(ValueError):
            barabasi_albert(complete_graph(5), 2, rng_for(0))

    def test_heavier_tail_than_er(self):
        g_in = complete_graph(9)  # m_a = 4
        ba_gini, er_gini = [], []
        for seed in range(10):
            ba = barabasi_albert(g_in, 1000, rng_for("ba", seed))
            er = erdos_renyi(ba, 1000, rng_for("er", seed))  # same density
            ba_gini.append(gini(ba))
            er_gini.append(gini(er))
        assert np.mean(ba_gini) > np.mean(er_gini)


class TestKroneckerGenerate:
    def test_all_ones_gives_complete_graph(self):
        init = KroneckerInitiator(np.ones((2, 2)), 2)
        g = kronecker_generate(init, rng_for(0))
        assert g.n == 4 and g.n_edges == 6

    def test_identity_initiator_pair_products(self):
        theta = np.array([[1.0, 0.0], [0.0, 1.0]])
        for u, v in itertools.combinations(range(4), 2):
            assert kron_pair_probability(theta, 2, u, v) == 0.0
        g = kronecker_generate(KroneckerInitiator(theta, 2), rng_for(1))
        assert g.n_edges == 0

    def test_heavy_tail_at_k10(self):
        init = KroneckerInitiator(np.array([[0.9, 0.5], [0.5, 0.1]]), 10)
        g = kronecker_generate(init, rng_for(2))
        deg = np.sort(g.degrees())[::-1]
        top = deg[: max(1, g.n // 100)].sum()
        bottom = deg[g.n // 2 :].sum()
        assert top >= 5 * max(bottom, 1)

    def test_truncation(self):
        init = KroneckerInitiator(np.full((2, 2), 0.5), 4)
        g = kronecker_generate(init, rng_for(3), n_out=10)
        assert g.n == 10

    def test_uniform_theta_reduces_to_er(self):
        # all-equal initiator entries q make every pair probability q^k, so
        # the model is ER(p = q^k); pick q so the effective p is 0.05
        p = 0.05
        k = 8
        q = p ** (1 / k)
        theta = np.full((2, 2), q)
        for u, v in [(0, 1), (3, 200), (17, 230)]:
            assert kron_pair_probability(theta, k, u, v) == pytest.approx(p, rel=1e-9)
        init = KroneckerInitiator(theta, k)
        dens = []
        for seed in range(20):
            g = kronecker_generate(init, rng_for("kron-er", seed))
            dens.append(g.n_edges / (g.n * (g.n - 1) / 2))
        se = math.sqrt(p * (1 - p) / (256 * 255 / 2 * 20))
        assert abs(np.mean(dens) - p) < 4 * se


class TestKronLikelihood:
    def test_closed_form_matches_enumeration(self):
        rng = rng_for(5)
        for k in (2, 3):
            theta = rng.uniform(0.2, 0.8, size=(2, 2))
            n = 2 ** k
            # enumerate all pairs; treat a fixed small edge set as the graph
            edges = [(0, 1), (1, 2)]
            pu = np.array([u for u, v in edges])
            pv = np.array([v for u, v in edges])
            ll = kron_log_likelihood(theta, k, pu, pv)
            ref = 0.0
            for u, v in itertools.combinations(range(n), 2):
                p = kron_pair_probability(theta, k, u, v)
                if (u, v) in edges:
                    ref += math.log(p) + p + p * p / 2  # same edge correction
                ref += -p - p * p / 2
            assert ll == pytest.approx(ref, rel=1e-9)

    def test_gradient_matches_finite_differences(self):
        rng = rng_for(6)
        theta = rng.uniform(0.3, 0.7, size=(2, 2))
        k = 4
        edges = [(0, 1), (1, 5), (2, 9), (3, 4), (7, 8)]
        pu = np.array([u for u, v in edges])
        pv = np.array([v for u, v in edges])
        grad = kron_loglik_gradient(theta, k, pu, pv)
        step = 1e-6
        for i in range(2):
            for j in range(2):
                orig = theta[i, j]
                theta[i, j] = orig + step
                lp = kron_log_likelihood(theta, k, pu, pv)
                theta[i, j] = orig - step
                lm = kron_log_likelihood(theta, k, pu, pv)
                theta[i, j] = orig
                fd = (lp - lm) / (2 * step)
                assert grad[i, j] == pytest.approx(fd, rel=1e-5)


class TestKronFit:
    def test_small_graph_rejected(self):
        with pytest.raises(ValueError):
            kronfit(complete_graph(3), rng=rng_for(0))

    def test_likelihood_never_below_initial(self):
        truth = KroneckerInitiator(np.array([[0.9, 0.6], [0.6, 0.2]]), 8)
        g = kronecker_generate(truth, rng_for(7))
        cfg = KronFitConfig(iterations=20, swaps_per_iteration=10,
                            init_theta=((0.5, 0.5), (0.5, 0.5)))
        trace = []
        kronfit(g, cfg, rng_for(8), trace_out=trace)
        assert max(trace) >= trace[0]

    def test_complete_graph_pushes_theta_up(self):
        cfg = KronFitConfig(iterations=150, swaps_per_iteration=5)
        init = kronfit(complete_graph(8), cfg, rng_for(9))
        assert init.k == 3
        assert np.all(init.theta >= 0.9)

    def test_running_best_monotone(self):
        g = random_gnp(20, 0.2, 10)
        trace = []
        kronfit(g, KronFitConfig(iterations=15, swaps_per_iteration=8), rng_for(11),
                trace_out=trace)
        best = -np.inf
        for ll in trace:
            best = max(best, ll)
        assert best == max(trace)

    def test_initiator_validation(self):
        with pytest.raises(ValueError):
            KroneckerInitiator(np.array([[1.5, 0.0], [0.0, 0.5]]), 2)
        with pytest.raises(ValueError):
            KroneckerInitiator(np.zeros((3, 3)), 2)
