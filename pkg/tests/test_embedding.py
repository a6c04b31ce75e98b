"""Embedding trainer: forward pass, contrastive loss, gradients, training."""

import math

import numpy as np
import pytest

from lgsg import ContextBatch, EmbedConfig, Graph, sage_forward, sage_loss, train_embeddings
from lgsg.embedding import (
    _sage_backward,
    _sage_forward,
    _sage_loss_grad,
    init_sage_params,
    load_embeddings,
    node_features,
    sample_context_pairs,
    save_embeddings,
    synthesize_features,
)
from lgsg.numerics import sigmoid
from lgsg.seeding import rng_for

from .util import star_graph, two_cliques


def tiny_graph():
    return Graph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 2)])


class TestForward:
    def test_shape_contract(self):
        g = tiny_graph()
        cfg = EmbedConfig(dim=5, layers=2, neighbor_sample_size=4)
        params = init_sage_params(node_features(g).shape[1], cfg, rng_for(0))
        rows = sage_forward(params, g, [0, 3, 5], seed=1)
        assert rows.shape == (3, 5)
        assert np.all(np.isfinite(rows))

    def test_isolated_node_aggregates_zero(self):
        g = Graph(3, [(1, 2)])
        cfg = EmbedConfig(dim=4, layers=1, neighbor_sample_size=3)
        x = node_features(g)
        params = init_sage_params(x.shape[1], cfg, rng_for(0))
        rows = sage_forward(params, g, [0], seed=9)
        expected = np.tanh(
            np.concatenate([x[0], np.zeros(x.shape[1])]) @ params.weights[0].T
        )
        assert np.allclose(rows[0], expected, atol=1e-12)

    def test_identical_feature_and_neighborhood_nodes_match(self):
        # nodes 0 and 1 both connect to {2, 3} and share a feature row
        g = Graph(4, [(0, 2), (0, 3), (1, 2), (1, 3)],
                  features=[[1.0, 2.0], [1.0, 2.0], [0.5, 0.1], [-0.3, 0.9]])
        cfg = EmbedConfig(dim=3, layers=2, neighbor_sample_size=5)
        params = init_sage_params(2, cfg, rng_for(3))
        r0 = sage_forward(params, g, [0], seed=42)
        r1 = sage_forward(params, g, [1], seed=42)
        assert np.array_equal(r0, r1)

    def test_deterministic_per_seed(self):
        g = tiny_graph()
        cfg = EmbedConfig(dim=4, layers=2)
        params = init_sage_params(node_features(g).shape[1], cfg, rng_for(1))
        a = sage_forward(params, g, [0, 1, 2], seed=7)
        b = sage_forward(params, g, [0, 1, 2], seed=7)
        assert np.array_equal(a, b)

    def test_feature_width_mismatch(self):
        g = tiny_graph()
        cfg = EmbedConfig(dim=4, layers=1)
        params = init_sage_params(7, cfg, rng_for(0))
        with pytest.raises(ValueError):
            sage_forward(params, g, [0], seed=0)


class TestContextPairs:
    def test_single_edge(self):
        g = Graph(2, [(0, 1)])
        batch = sample_context_pairs(g, 1, 2, rng_for(0))
        pairs = set(zip(batch.u.tolist(), batch.v.tolist()))
        assert pairs <= {(0, 1), (1, 0)}
        assert len(batch) > 0

    def test_walks_stay_in_component(self):
        g = two_cliques(5)
        batch = sample_context_pairs(g, 4, 3, rng_for(1))
        for u, v in zip(batch.u.tolist(), batch.v.tolist()):
            assert (u < 5) == (v < 5)

    def test_star_two_step_walks(self):
        g = star_graph(5)
        batch = sample_context_pairs(g, 2, 1, rng_for(2))
        by_node = dict(zip(batch.u.tolist(), batch.v.tolist()))
        for leaf in range(1, 5):
            assert by_node[leaf] == 0 or 1 <= by_node[leaf] <= 4

    def test_isolated_nodes_emit_nothing(self):
        g = Graph(4, [(0, 1)])
        batch = sample_context_pairs(g, 3, 2, rng_for(3))
        assert 2 not in batch.u.tolist() and 3 not in batch.u.tolist()


class TestLoss:
    def test_zero_dots(self):
        z = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        batch = ContextBatch([1], [2], [[0]])
        assert sage_loss(z, batch) == pytest.approx(2 * -math.log(0.5), rel=1e-12)

    def test_spec_value(self):
        z = np.array([[1.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
        batch = ContextBatch([0], [1], [[2]])
        # one negative listed, weighted by Q = 1; the spec's Q = 2 case
        # duplicates the same negative
        batch2 = ContextBatch([0], [1], [[2, 2]])
        expected = -math.log(sigmoid(1.0)) - 2 * math.log(sigmoid(-1.0))
        assert sage_loss(z, batch2) == pytest.approx(expected, rel=1e-12)
        assert sage_loss(z, batch2) == pytest.approx(2.939785, abs=1e-6)
        assert sage_loss(z, batch) == pytest.approx(
            -math.log(sigmoid(1.0)) - math.log(sigmoid(-1.0)), rel=1e-12)

    def test_limit_goes_to_zero(self):
        big = 50.0
        z = np.array([[big, 0.0], [1.0, 0.0], [-1.0, 0.0]])
        batch = ContextBatch([0], [1], [[2]])
        assert sage_loss(z, batch) < 1e-8

    def test_monotonicity_in_dots(self):
        def loss_for(pos, neg):
            z = np.array([[1.0, 0.0], [pos, 0.0], [neg, 0.0]])
            return sage_loss(z, ContextBatch([0], [1], [[2]]))

        assert loss_for(2.0, 0.0) < loss_for(1.0, 0.0)
        assert loss_for(1.0, 1.0) > loss_for(1.0, 0.0)

    def test_empty_batch_rejected(self):
        with pytest.raises(ValueError):
            sage_loss(np.zeros((2, 2)), ContextBatch([], [], np.zeros((0, 1))))

    def test_clamp_keeps_loss_finite(self):
        z = np.array([[1e3, 0.0], [-1e3, 0.0], [1e3, 0.0]])
        batch = ContextBatch([0], [1], [[2]])
        assert np.isfinite(sage_loss(z, batch))


class TestGradients:
    def test_matches_central_differences(self):
        g = tiny_graph()
        cfg = EmbedConfig(dim=3, layers=2, neighbor_sample_size=4)
        x = node_features(g)
        params = init_sage_params(x.shape[1], cfg, rng_for(9))
        nodes = np.arange(6)
        batch = ContextBatch([0, 1, 2], [1, 2, 3], [[4, 5], [5, 0], [0, 1]])
        seed = 42

        rows, cache = _sage_forward(params, g, nodes, seed, x)
        _, dz = _sage_loss_grad(rows, batch)
        analytic = _sage_backward(params, cache, dz)

        step = 1e-4
        for k, w in enumerate(params.weights):
            fd = np.zeros_like(w)
            it = np.nditer(w, flags=["multi_index"])
            for _ in it:
                idx = it.multi_index
                orig = w[idx]
                w[idx] = orig + step
                rp, _ = _sage_forward(params, g, nodes, seed, x)
                lp, _ = _sage_loss_grad(rp, batch)
                w[idx] = orig - step
                rm, _ = _sage_forward(params, g, nodes, seed, x)
                lm, _ = _sage_loss_grad(rm, batch)
                w[idx] = orig
                fd[idx] = (lp - lm) / (2 * step)
            denom = max(np.abs(fd).max(), np.abs(analytic[k]).max(), 1e-10)
            assert np.abs(fd - analytic[k]).max() / denom < 1e-4


class TestTraining:
    def test_loss_decreases_on_k2(self):
        g = Graph(2, [(0, 1)])
        losses = []
        train_embeddings(g, EmbedConfig(dim=2, epochs=5, pairs_per_node=4), seed=0,
                         loss_out=losses)
        assert np.mean(losses[-3:]) < losses[0]

    def test_deterministic(self):
        g = two_cliques(6)
        cfg = EmbedConfig(dim=4, epochs=2)
        a = train_embeddings(g, cfg, seed=5)
        b = train_embeddings(g, cfg, seed=5)
        assert np.array_equal(a.z, b.z)

    def test_two_clique_separation(self):
        wins = 0
        for seed in range(5):
            g = two_cliques(10)
            emb = train_embeddings(
                g, EmbedConfig(dim=8, epochs=10, pairs_per_node=4), seed=seed)
            z = emb.z
            intra, inter = [], []
            for i in range(10):
                for j in range(i + 1, 10):
                    intra.append(np.linalg.norm(z[i] - z[j]))
                    intra.append(np.linalg.norm(z[10 + i] - z[10 + j]))
            for i in range(10):
                for j in range(10):
                    inter.append(np.linalg.norm(z[i] - z[10 + j]))
            wins += np.mean(intra) < np.mean(inter)
        assert wins >= 4

    def test_trailing_loss_below_leading(self):
        g = two_cliques(8)
        losses = []
        train_embeddings(g, EmbedConfig(dim=8, epochs=8, pairs_per_node=4), seed=1,
                         loss_out=losses)
        k = max(1, len(losses) // 10)
        assert np.mean(losses[-k:]) < np.mean(losses[:k])

    def test_edgeless_rejected(self):
        with pytest.raises(ValueError):
            train_embeddings(Graph(4, []), EmbedConfig())

    def test_row_count(self):
        g = two_cliques(4)
        emb = train_embeddings(g, EmbedConfig(dim=6, epochs=1), seed=2)
        assert emb.z.shape == (8, 6)
        assert emb.d == 6


class TestFallbackFeatures:
    def test_shape_and_content(self):
        g = star_graph(4)
        x = synthesize_features(g, seed=0, noise_dim=3)
        assert x.shape == (4, 5)
        assert x[0, 0] == pytest.approx(np.log1p(3))
        assert np.all(x[:, 1] == 1.0)

    def test_explicit_features_win(self):
        g = Graph(2, [(0, 1)], features=[[3.0], [4.0]])
        assert node_features(g).tolist() == [[3.0], [4.0]]


class TestCheckpoint:
    def test_roundtrip(self, tmp_path):
        g = two_cliques(4)
        emb = train_embeddings(g, EmbedConfig(dim=5, epochs=1), seed=3)
        path = tmp_path / "emb.bin"
        save_embeddings(emb, path, manifest={"seed": 3})
        back = load_embeddings(path)
        assert np.array_equal(back.z, emb.z)
        assert (tmp_path / "emb.bin.json").exists()

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "junk.bin"
        p.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
        with pytest.raises(ValueError):
            load_embeddings(p)
