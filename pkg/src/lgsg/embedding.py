"""Self-supervised node embeddings via neighborhood aggregation.

A K-layer encoder computes h^0_v = x_v and then, per layer,

    h^k_v = act(W^k @ [h^{k-1}_v || mean(h^{k-1}_u for u in Neigh(v))])

where Neigh(v) is a fixed-size neighbor multiset sampled with replacement.
Training minimizes a positive/negative contrastive loss over random-walk
context pairs: -log sig(z_u . z_v) - Q * mean_n log sig(-z_u . z_{v_n}).

Gradients are hand-written numpy; the forward keeps its per-layer caches
so the backward can replay them. Neighbor sampling is keyed by (seed,
layer, position-in-batch), which makes a forward pass reproducible and
makes two nodes with identical features and neighborhoods produce
identical rows when run at the same batch position with the same seed.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .numerics import log_sigmoid, sigmoid
from .seeding import mix_seed, rng_for

EMBEDDING_MAGIC = b"LGSGEMB1"
EMBEDDING_VERSION = 1
GRAD_CLIP = 5.0  # global-norm cap keeps momentum SGD from overshooting


@dataclass
class SageParams:
    """Per-layer weight matrices W^k of shape (d_k, 2*d_{k-1})."""

    weights: list
    activation: str = "tanh"
    neighbor_sample_size: int = 10

    def __post_init__(self):
        if not self.weights:
            raise ValueError("at least one layer is required")
        for k, w in enumerate(self.weights):
            if not np.all(np.isfinite(w)):
                raise ValueError(f"layer {k} has non-finite weights")
        for k in range(1, len(self.weights)):
            if self.weights[k].shape[1] != 2 * self.weights[k - 1].shape[0]:
                raise ValueError(
                    f"layer {k} expects input width {self.weights[k].shape[1] // 2}, "
                    f"previous layer outputs {self.weights[k - 1].shape[0]}"
                )

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[0]


@dataclass
class EmbeddingMatrix:
    """One embedding row per graph node."""

    z: np.ndarray

    def __post_init__(self):
        self.z = np.asarray(self.z, dtype=np.float64)
        if self.z.ndim != 2:
            raise ValueError("embedding matrix must be 2-d")
        if not np.all(np.isfinite(self.z)):
            raise ValueError("embedding matrix contains non-finite values")

    @property
    def d(self) -> int:
        return self.z.shape[1]

    @property
    def n(self) -> int:
        return self.z.shape[0]


@dataclass
class ContextBatch:
    """Positive context pairs plus Q negatives per pair."""

    u: np.ndarray
    v: np.ndarray
    negatives: np.ndarray | None = None  # shape (n_pairs, Q)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.int64)
        self.v = np.asarray(self.v, dtype=np.int64)
        if self.u.shape != self.v.shape:
            raise ValueError("u and v must align")
        if self.negatives is not None:
            self.negatives = np.asarray(self.negatives, dtype=np.int64)
            if self.negatives.ndim != 2 or self.negatives.shape[0] != self.u.shape[0]:
                raise ValueError("negatives must be (n_pairs, Q)")
            if self.negatives.shape[1] < 1:
                raise ValueError("need at least one negative per pair")

    def __len__(self):
        return int(self.u.shape[0])


@dataclass
class EmbedConfig:
    dim: int = 32
    layers: int = 2
    neighbor_sample_size: int = 10
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.05
    momentum: float = 0.9
    walk_len: int = 5
    pairs_per_node: int = 2
    batch_size: int = 64
    activation: str = "tanh"

    def to_dict(self):
        return dict(self.__dict__)


def synthesize_features(g: Graph, seed=0, noise_dim=8) -> np.ndarray:
    """Fallback features [log(1 + deg(v)), 1, r_v] for featureless graphs.

    The seeded standard-normal block r_v (noise_dim wide) breaks structural
    symmetry: purely degree-based features are identical across a regular
    graph, and mean aggregation of identical vectors stays identical, which
    would pin every embedding to the same point. Neighborhood averages of
    the random block act as a community fingerprint the loss can amplify;
    a multi-dimensional fingerprint keeps distinct communities from
    colliding the way a scalar one can.
    """
    deg = g.degrees().astype(np.float64)
    noise = rng_for(seed, "features", g.n).standard_normal((g.n, noise_dim))
    return np.column_stack([np.log1p(deg), np.ones(g.n), noise])


def node_features(g: Graph, seed=0, noise_dim=8) -> np.ndarray:
    if g.features is not None:
        return np.asarray(g.features, dtype=np.float64)
    return synthesize_features(g, seed=seed, noise_dim=noise_dim)


def init_sage_params(feature_dim, config: EmbedConfig, rng) -> SageParams:
    dims = [feature_dim] + [config.dim] * config.layers
    weights = []
    for k in range(1, len(dims)):
        fan_in, fan_out = 2 * dims[k - 1], dims[k]
        scale = np.sqrt(2.0 / (fan_in + fan_out))
        weights.append(rng.normal(0.0, scale, size=(fan_out, fan_in)))
    return SageParams(weights, activation=config.activation,
                      neighbor_sample_size=config.neighbor_sample_size)


def _activate(pre, kind):
    if kind == "tanh":
        return np.tanh(pre)
    if kind == "relu":
        return np.maximum(pre, 0.0)
    raise ValueError(f"unknown activation {kind!r}")


def _activate_grad(pre, post, kind):
    if kind == "tanh":
        return 1.0 - post * post
    if kind == "relu":
        return (pre > 0.0).astype(np.float64)
    raise ValueError(f"unknown activation {kind!r}")


def _build_support(g: Graph, batch, sample_size, n_layers, seed):
    """Layered node lists: level[K] is the batch, level[k-1] prepends the
    level-k nodes (self rows) and appends their sampled neighbors.

    Index -1 marks 'no neighbor' (isolated node or propagated sentinel);
    its feature row is zero so it aggregates to the zero vector.
    """
    levels = [None] * (n_layers + 1)
    levels[n_layers] = np.asarray(batch, dtype=np.int64)
    for k in range(n_layers, 0, -1):
        cur = levels[k]
        draws = rng_for(seed, "sage-neigh", k).random((cur.size, sample_size))
        neigh = np.full((cur.size, sample_size), -1, dtype=np.int64)
        for i, node in enumerate(cur):
            if node < 0:
                continue
            nb = g.neighbors(int(node))
            if nb.size == 0:
                continue
            idx = np.minimum((draws[i] * nb.size).astype(np.int64), nb.size - 1)
            neigh[i] = nb[idx]
        levels[k - 1] = np.concatenate([cur, neigh.reshape(-1)])
    return levels


def _sage_forward(params: SageParams, g: Graph, batch, seed, features):
    """Forward pass; returns (rows, cache) with cache ready for backprop."""
    batch = np.asarray(batch, dtype=np.int64)
    if batch.size == 0:
        raise ValueError("empty batch")
    if features.shape[1] != params.weights[0].shape[1] // 2:
        raise ValueError(
            f"feature width {features.shape[1]} does not match first layer "
            f"input width {params.weights[0].shape[1] // 2}"
        )
    sample = params.neighbor_sample_size
    levels = _build_support(g, batch, sample, params.n_layers, seed)
    padded = np.vstack([features, np.zeros((1, features.shape[1]))])
    h = padded[levels[0]]  # sentinel -1 selects the zero row
    cache = {"levels": levels, "layers": []}
    for k in range(1, params.n_layers + 1):
        w = params.weights[k - 1]
        n_out = levels[k].size
        d_in = h.shape[1]
        selfs = h[:n_out]
        neigh = h[n_out:].reshape(n_out, sample, d_in).mean(axis=1)
        cat = np.concatenate([selfs, neigh], axis=1)
        pre = cat @ w.T
        post = _activate(pre, params.activation)
        cache["layers"].append({"h_in": h, "cat": cat, "pre": pre, "post": post})
        h = post
    return h, cache


def sage_forward(params: SageParams, g: Graph, batch, seed, features=None) -> np.ndarray:
    """Embedding rows for ``batch``; deterministic given the seed."""
    if features is None:
        features = node_features(g)
    rows, _ = _sage_forward(params, g, batch, seed, features)
    return rows


def _sage_backward(params: SageParams, cache, d_out):
    """Accumulate dLoss/dW per layer from the gradient on the output rows."""
    sample = params.neighbor_sample_size
    grads = [np.zeros_like(w) for w in params.weights]
    dh = d_out
    for k in range(params.n_layers, 0, -1):
        layer = cache["layers"][k - 1]
        w = params.weights[k - 1]
        d_pre = dh * _activate_grad(layer["pre"], layer["post"], params.activation)
        grads[k - 1] += d_pre.T @ layer["cat"]
        d_cat = d_pre @ w
        d_in = layer["h_in"].shape[1]
        n_out = d_pre.shape[0]
        d_prev = np.zeros_like(layer["h_in"])
        d_prev[:n_out] += d_cat[:, :d_in]
        d_neigh = d_cat[:, d_in:] / sample
        d_prev[n_out:] += np.repeat(d_neigh, sample, axis=0)
        dh = d_prev
    return grads


def sample_context_pairs(g: Graph, walk_len, pairs_per_node, rng) -> ContextBatch:
    """Positive pairs (u, v) from short uniform random walks started at u.

    Each non-isolated node starts up to ``pairs_per_node`` walks of
    ``walk_len`` steps and pairs with the nodes it co-visits; isolated
    nodes emit nothing.
    """
    if walk_len < 1:
        raise ValueError("walk_len must be >= 1")
    us, vs = [], []
    for u in range(g.n):
        if g.degree(u) == 0:
            continue
        quota = pairs_per_node
        for _ in range(pairs_per_node):
            if quota <= 0:
                break
            cur = u
            for _ in range(walk_len):
                nb = g.neighbors(cur)
                cur = int(nb[rng.integers(nb.size)])
                if cur != u and quota > 0:
                    us.append(u)
                    vs.append(cur)
                    quota -= 1
    return ContextBatch(np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64))


def negative_distribution(g: Graph) -> np.ndarray:
    """Sampling weights proportional to degree^0.75."""
    w = g.degrees().astype(np.float64) ** 0.75
    total = w.sum()
    if total <= 0:
        raise ValueError("negative sampling needs at least one edge")
    return w / total


def attach_negatives(batch: ContextBatch, g: Graph, q, rng) -> ContextBatch:
    probs = negative_distribution(g)
    negs = rng.choice(g.n, size=(len(batch), q), p=probs)
    return ContextBatch(batch.u, batch.v, negs)


def sage_loss(z, batch: ContextBatch) -> float:
    """Mean contrastive loss over the batch's positive pairs."""
    loss, _ = _sage_loss_grad(np.asarray(z, dtype=np.float64), batch)
    return loss


def _sage_loss_grad(z, batch: ContextBatch):
    if len(batch) == 0:
        raise ValueError("empty context batch")
    if batch.negatives is None:
        raise ValueError("context batch has no negatives attached")
    n_pairs, q = batch.negatives.shape
    zu, zv = z[batch.u], z[batch.v]
    zn = z[batch.negatives]  # (P, Q, d)
    pos_dot = (zu * zv).sum(axis=1)
    neg_dot = (zu[:, None, :] * zn).sum(axis=2)
    loss = (-log_sigmoid(pos_dot) - q * log_sigmoid(-neg_dot).mean(axis=1)).mean()

    dz = np.zeros_like(z)
    # d/da of -log sig(a) is -(1 - sig(a)); of -log sig(-b) is sig(b).
    c_pos = -(1.0 - sigmoid(pos_dot)) / n_pairs
    c_neg = sigmoid(neg_dot) / n_pairs  # q * mean over q negatives = sum
    np.add.at(dz, batch.u, c_pos[:, None] * zv + (c_neg[:, :, None] * zn).sum(axis=1))
    np.add.at(dz, batch.v, c_pos[:, None] * zu)
    np.add.at(
        dz,
        batch.negatives.reshape(-1),
        (c_neg[:, :, None] * zu[:, None, :]).reshape(-1, z.shape[1]),
    )
    return float(loss), dz


def train_embeddings(g: Graph, config: EmbedConfig, seed=0, loss_out=None) -> EmbeddingMatrix:
    """Mini-batch gradient descent on the contrastive loss; returns final-layer
    embeddings for every node. Deterministic per seed."""
    if g.n_edges == 0:
        raise ValueError("cannot train embeddings on an edgeless graph")
    features = node_features(g, seed=seed)
    params = init_sage_params(features.shape[1], config, rng_for(seed, "sage-init"))
    velocity = [np.zeros_like(w) for w in params.weights]
    step = 0
    for epoch in range(config.epochs):
        batch = sample_context_pairs(
            g, config.walk_len, config.pairs_per_node, rng_for(seed, "sage-walks", epoch)
        )
        if len(batch) == 0:
            raise ValueError("no context pairs sampled; graph has no usable edges")
        batch = attach_negatives(batch, g, config.negatives, rng_for(seed, "sage-negs", epoch))
        order = rng_for(seed, "sage-order", epoch).permutation(len(batch))
        for start in range(0, len(batch), config.batch_size):
            take = order[start : start + config.batch_size]
            mini = ContextBatch(batch.u[take], batch.v[take], batch.negatives[take])
            nodes, inverse = np.unique(
                np.concatenate([mini.u, mini.v, mini.negatives.reshape(-1)]),
                return_inverse=True,
            )
            rows, cache = _sage_forward(params, g, nodes, mix_seed(seed, "sage-fwd", step), features)
            p = len(mini)
            local = ContextBatch(
                inverse[:p], inverse[p : 2 * p], inverse[2 * p :].reshape(p, -1)
            )
            loss, dz = _sage_loss_grad(rows, local)
            if not np.isfinite(loss):
                raise FloatingPointError(f"non-finite loss at step {step}; lower the learning rate")
            if not np.all(np.isfinite(rows)):
                raise FloatingPointError(f"non-finite embedding rows at step {step}")
            grads = _sage_backward(params, cache, dz)
            norm = np.sqrt(sum(float((gw * gw).sum()) for gw in grads))
            if norm > GRAD_CLIP:
                grads = [gw * (GRAD_CLIP / norm) for gw in grads]
            for w, v, gw in zip(params.weights, velocity, grads):
                v *= config.momentum
                v -= config.lr * gw
                w += v
            if loss_out is not None:
                loss_out.append(loss)
            step += 1
    # Final extraction pass over all nodes, in fixed-size chunks.
    out = np.empty((g.n, config.dim), dtype=np.float64)
    chunk = 1024
    for ci, start in enumerate(range(0, g.n, chunk)):
        nodes = np.arange(start, min(start + chunk, g.n))
        out[nodes] = sage_forward(params, g, nodes, mix_seed(seed, "sage-final", ci), features)
    return EmbeddingMatrix(out)


def save_embeddings(emb: EmbeddingMatrix, path, manifest=None) -> None:
    """Little-endian binary: magic, version u32, N u64, d u64, then N*d
    float64 row-major. A JSON manifest goes to ``<path>.json``."""
    with open(path, "wb") as fh:
        fh.write(EMBEDDING_MAGIC)
        fh.write(struct.pack("<IQQ", EMBEDDING_VERSION, emb.n, emb.d))
        fh.write(np.ascontiguousarray(emb.z, dtype="<f8").tobytes())
    with open(f"{path}.json", "w", encoding="utf-8") as fh:
        json.dump(manifest or {}, fh, indent=2, sort_keys=True)


def load_embeddings(path) -> EmbeddingMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(8)
        if magic != EMBEDDING_MAGIC:
            raise ValueError(f"{path}: not an embedding checkpoint")
        version, n, d = struct.unpack("<IQQ", fh.read(4 + 8 + 8))
        if version != EMBEDDING_VERSION:
            raise ValueError(f"unsupported embedding checkpoint version {version}")
        data = np.frombuffer(fh.read(n * d * 8), dtype="<f8").reshape(n, d)
    return EmbeddingMatrix(data.astype(np.float64))
