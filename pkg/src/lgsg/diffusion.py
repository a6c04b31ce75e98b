"""Continuous diffusion over (embedding, adjacency) subgraph samples.

The forward process draws from the closed-form marginal
    x^t = alpha^t x^0 + sigma^t eps,   eps ~ N(0, I)
independently per node-track entry and per edge-track entry, with the edge
noise mirrored across the diagonal so states stay symmetric. A denoiser is
trained to predict eps by mean squared error over the unmasked positions
of both tracks. Reverse sampling walks t = T..1 through the Gaussian
posterior
    mu = alpha_ratio * (sigma_{t-1}^2 / sigma_t^2) * x^t
       + alpha_{t-1} * (sigma_cond^2 / sigma_t^2) * x_hat,
    std = sigma_cond * sigma_{t-1} / sigma_t,
where x_hat = (x^t - sigma_t eps_hat) / alpha_t, and finally discretizes
the edge track by per-pair channel argmax (channel 1 = edge present).

Edge states are two-channel continuous one-hots so the terminal argmax is
well defined; node embeddings diffuse as raw continuous vectors.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .denoiser import (
    Denoiser,
    denoiser_backward_batch,
    denoiser_forward,
    denoiser_forward_batch,
    init_denoiser,
)
from .sampling import SubgraphSample
from .schedule import NoiseSchedule, make_schedule
from .seeding import rng_for

GENERATED_MAGIC = b"LGSGGS01"
GENERATED_VERSION = 1

ALPHA_FLOOR = 1e-8


@dataclass
class NoisedSample:
    """Diffusion state at timestep t; masked rows are zero and stay zero."""

    z: np.ndarray  # (m, d)
    e: np.ndarray  # (m, m, 2), symmetric in the node pair, zero diagonal
    mask: np.ndarray  # (m,)
    t: int


@dataclass
class GeneratedSubgraph:
    """Discretized reverse-process output: adjacency plus node embeddings."""

    emb: np.ndarray  # (size, d)
    adj: np.ndarray  # (size, size) uint8, symmetric, zero diagonal

    def __post_init__(self):
        self.emb = np.asarray(self.emb, dtype=np.float64)
        self.adj = np.asarray(self.adj, dtype=np.uint8)
        k = self.adj.shape[0]
        if self.adj.shape != (k, k) or self.emb.shape[0] != k:
            raise ValueError("embedding/adjacency shapes disagree")
        if np.any(self.adj != self.adj.T) or np.any(np.diag(self.adj)):
            raise ValueError("adjacency must be symmetric with a zero diagonal")
        if not np.all(np.isfinite(self.emb)):
            raise ValueError("embedding contains non-finite values")

    @property
    def size(self) -> int:
        return int(self.adj.shape[0])


@dataclass
class DiffusionConfig:
    timesteps: int = 200
    steps: int = 3000
    lr: float = 0.01
    hidden: int = 64
    blocks: int = 3
    optimizer: str = "sgd"  # or "adam"
    momentum: float = 0.9
    edge_loss_weight: float = 1.0
    noise_draws_per_step: int = 1  # (t, noise) draws averaged per update
    lr_decay: bool = True  # linear decay to 10% of lr over the run
    ema_decay: float = 0.995  # parameter EMA used for the returned model

    def to_dict(self):
        return dict(self.__dict__)


def encode_sample(sample: SubgraphSample):
    """One-hot encode a training sample into diffusion state (z0, e0)."""
    m = sample.capacity
    pm = (sample.mask[:, None] * sample.mask[None, :]).astype(np.float64)
    np.fill_diagonal(pm, 0.0)
    e0 = np.zeros((m, m, 2), dtype=np.float64)
    adj = sample.adj.astype(np.float64)
    e0[:, :, 0] = pm * (1.0 - adj)
    e0[:, :, 1] = pm * adj
    return sample.emb.copy(), e0


def _symmetric_normal(m, channels, rng):
    """Standard normal per off-diagonal entry, mirrored so eps[i,j]=eps[j,i]."""
    iu, ju = np.triu_indices(m, k=1)
    vals = rng.standard_normal((iu.size, channels))
    out = np.zeros((m, m, channels), dtype=np.float64)
    out[iu, ju] = vals
    out[ju, iu] = vals
    return out


def _apply_masks(z, e, mask):
    nm = np.asarray(mask, dtype=np.float64)
    pm = nm[:, None] * nm[None, :]
    np.fill_diagonal(pm, 0.0)
    return z * nm[:, None], e * pm[:, :, None]


def forward_noise(z0, e0, mask, t, sched: NoiseSchedule, rng):
    """Draw x^t from the marginal; returns the noised state and the noise used."""
    if not (0 <= t <= sched.timesteps):
        raise ValueError(f"timestep {t} out of range 0..{sched.timesteps}")
    m, d = z0.shape
    eps_z = rng.standard_normal((m, d))
    eps_e = _symmetric_normal(m, e0.shape[2], rng)
    eps_z, eps_e = _apply_masks(eps_z, eps_e, mask)
    a, s = sched.alpha[t], sched.sigma[t]
    z_t, e_t = _apply_masks(a * z0 + s * eps_z, a * e0 + s * eps_e, mask)
    return NoisedSample(z_t, e_t, np.asarray(mask), int(t)), eps_z, eps_e


def predict_noise(dn: Denoiser, ns: NoisedSample):
    """Deterministic denoiser forward pass."""
    (eps_z, eps_e), _ = denoiser_forward(dn, ns.z, ns.e, ns.mask, ns.t)
    return eps_z, eps_e


def denoise_estimate(ns: NoisedSample, eps_hat, sched: NoiseSchedule):
    """Invert the marginal: x_hat = (x^t - sigma_t * eps_hat) / alpha_t.

    alpha_t is clamped at 1e-8; the cosine schedule never actually gets
    that small, so the clamp only guards degenerate custom schedules.
    """
    if ns.t < 1:
        raise ValueError("estimates are defined for t >= 1")
    eps_z_hat, eps_e_hat = eps_hat
    a = max(float(sched.alpha[ns.t]), ALPHA_FLOOR)
    s = float(sched.sigma[ns.t])
    z_hat = (ns.z - s * eps_z_hat) / a
    e_hat = (ns.e - s * eps_e_hat) / a
    return _apply_masks(z_hat, e_hat, ns.mask)


def posterior_step(ns: NoisedSample, estimate, sched: NoiseSchedule, rng) -> NoisedSample:
    """Sample x^{t-1} given the state x^t and the estimate x_hat.

    At t = 1 the coefficients collapse to mu = x_hat and std = 0, so the
    step returns the estimate exactly.
    """
    t = ns.t
    if t < 1:
        raise ValueError("cannot step below t=0")
    z_hat, e_hat = estimate
    ratio = sched.alpha_ratio(t)
    sig_t_sq = float(sched.sigma[t] ** 2)
    sig_prev_sq = float(sched.sigma[t - 1] ** 2)
    sig_cond_sq = sched.sigma_cond_sq(t)
    coef_state = ratio * sig_prev_sq / sig_t_sq
    coef_est = float(sched.alpha[t - 1]) * sig_cond_sq / sig_t_sq
    std = np.sqrt(max(sig_cond_sq, 0.0)) * float(sched.sigma[t - 1]) / float(sched.sigma[t])

    m, d = ns.z.shape
    noise_z = rng.standard_normal((m, d)) if std > 0 else np.zeros((m, d))
    noise_e = _symmetric_normal(m, ns.e.shape[2], rng) if std > 0 else np.zeros_like(ns.e)
    z_prev = coef_state * ns.z + coef_est * z_hat + std * noise_z
    e_prev = coef_state * ns.e + coef_est * e_hat + std * noise_e
    z_prev, e_prev = _apply_masks(z_prev, e_prev, ns.mask)
    return NoisedSample(z_prev, e_prev, ns.mask, t - 1)


def _loss_and_input_grads(pred, true, mask, edge_weight):
    eps_z_hat, eps_e_hat = pred
    eps_z, eps_e = true
    size = float(np.asarray(mask).sum())
    d = eps_z.shape[1]
    n_pairs = size * (size - 1.0)
    dz_count = max(size * d, 1.0)
    de_count = max(n_pairs * 2.0, 1.0)
    rz = eps_z_hat - eps_z
    re = eps_e_hat - eps_e
    loss = float((rz * rz).sum() / dz_count + edge_weight * (re * re).sum() / de_count)
    d_eps_z = 2.0 * rz / dz_count
    d_eps_e = edge_weight * 2.0 * re / de_count
    return loss, d_eps_z, d_eps_e


def _loss_and_input_grads_batch(pred, true, mask, edge_weight):
    """Mean of the per-draw losses; gradients scaled to match."""
    eps_z_hat, eps_e_hat = pred
    eps_z, eps_e = true
    b = eps_z.shape[0]
    d = eps_z.shape[2]
    size = np.asarray(mask, dtype=np.float64).sum(axis=1)  # (B,)
    dz_count = np.maximum(size * d, 1.0)
    de_count = np.maximum(size * (size - 1.0) * 2.0, 1.0)
    rz = eps_z_hat - eps_z
    re = eps_e_hat - eps_e
    per_z = (rz * rz).sum(axis=(1, 2)) / dz_count
    per_e = (re * re).sum(axis=(1, 2, 3)) / de_count
    loss = float((per_z + edge_weight * per_e).mean())
    d_eps_z = 2.0 * rz / (dz_count[:, None, None] * b)
    d_eps_e = edge_weight * 2.0 * re / (de_count[:, None, None, None] * b)
    return loss, d_eps_z, d_eps_e


GRAD_CLIP = 5.0


class _Optimizer:
    def __init__(self, params, config: DiffusionConfig):
        self.kind = config.optimizer
        self.lr = config.lr
        self.momentum = config.momentum
        if self.kind == "sgd":
            self.state = {k: np.zeros_like(v) for k, v in params.items()}
        elif self.kind == "adam":
            self.m = {k: np.zeros_like(v) for k, v in params.items()}
            self.v = {k: np.zeros_like(v) for k, v in params.items()}
            self.step_count = 0
        else:
            raise ValueError(f"unknown optimizer {self.kind!r}")

    def update(self, params, grads):
        norm = np.sqrt(sum(float((g * g).sum()) for g in grads.values()))
        if norm > GRAD_CLIP:
            scale = GRAD_CLIP / norm
            grads = {k: g * scale for k, g in grads.items()}
        if self.kind == "sgd":
            for k in params:
                buf = self.state[k]
                buf *= self.momentum
                buf -= self.lr * grads[k]
                params[k] += buf
        else:
            self.step_count += 1
            b1, b2, eps = 0.9, 0.999, 1e-8
            corr1 = 1.0 - b1 ** self.step_count
            corr2 = 1.0 - b2 ** self.step_count
            for k in params:
                self.m[k] = b1 * self.m[k] + (1 - b1) * grads[k]
                self.v[k] = b2 * self.v[k] + (1 - b2) * grads[k] ** 2
                params[k] -= self.lr * (self.m[k] / corr1) / (np.sqrt(self.v[k] / corr2) + eps)


def train_diffusion(dataset, config: DiffusionConfig, seed=0, loss_out=None) -> Denoiser:
    """Single-sample SGD on the noise-prediction MSE. Deterministic per seed."""
    if not dataset:
        raise ValueError("empty training dataset")
    m = dataset[0].capacity
    d = dataset[0].d
    for s in dataset:
        if s.capacity != m or s.d != d:
            raise ValueError("dataset mixes capacities or embedding dims")
    encoded = [encode_sample(s) for s in dataset]
    masks = [s.mask for s in dataset]
    sched = make_schedule(config.timesteps)
    dn = init_denoiser(m, d, config.hidden, config.blocks, config.timesteps,
                       rng_for(seed, "denoiser-init"))
    opt = _Optimizer(dn.params, config)
    ema = dn.flat_copy()
    rng = rng_for(seed, "denoiser-train")
    base_lr = config.lr
    draws = max(1, config.noise_draws_per_step)
    for step in range(config.steps):
        if config.lr_decay:
            opt.lr = base_lr * (1.0 - 0.9 * step / max(config.steps - 1, 1))
        idx = int(rng.integers(len(dataset)))
        z0, e0 = encoded[idx]
        zs, es, ezs, ees, ts = [], [], [], [], []
        for _ in range(draws):
            t = int(rng.integers(1, config.timesteps + 1))
            ns, eps_z, eps_e = forward_noise(z0, e0, masks[idx], t, sched, rng)
            zs.append(ns.z)
            es.append(ns.e)
            ezs.append(eps_z)
            ees.append(eps_e)
            ts.append(t)
        mask_b = np.broadcast_to(masks[idx], (draws, m))
        pred, cache = denoiser_forward_batch(
            dn, np.stack(zs), np.stack(es), mask_b, np.array(ts), want_cache=True
        )
        loss, d_ez, d_ee = _loss_and_input_grads_batch(
            pred, (np.stack(ezs), np.stack(ees)), mask_b, config.edge_loss_weight
        )
        if not np.isfinite(loss):
            raise FloatingPointError(f"non-finite diffusion loss at step {step}")
        grads = denoiser_backward_batch(dn, cache, d_ez, d_ee)
        opt.update(dn.params, grads)
        for k, v in dn.params.items():
            ema[k] += (1.0 - config.ema_decay) * (v - ema[k])
        if loss_out is not None:
            loss_out.append(loss)
    dn.params = ema
    return dn


def sample_subgraphs(dn: Denoiser, count, size_distribution, sched=None, seed=0) -> list:
    """Generate subgraphs by reverse diffusion from pure noise.

    Sizes are drawn from the empirical training-size distribution; each of
    the ``count`` samples runs on its own seed substream, so generation
    order and worker layout cannot change the results.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    sizes = np.asarray(size_distribution, dtype=np.int64)
    if sizes.size == 0:
        raise ValueError("empty size distribution")
    if sizes.min() < 1 or sizes.max() > dn.capacity:
        raise ValueError("size distribution outside 1..capacity")
    if sched is None:
        sched = make_schedule(dn.timesteps)
    if sched.timesteps != dn.timesteps:
        raise ValueError("schedule length does not match the model")
    m, d = dn.capacity, dn.emb_dim
    big_t = sched.timesteps

    # Per-sample seed substreams: results do not depend on how the chains
    # are grouped or ordered below.
    rngs = [rng_for(seed, "reverse", j) for j in range(count)]
    states = []
    for j in range(count):
        size = int(sizes[rngs[j].integers(sizes.size)])
        mask = np.zeros(m, dtype=np.uint8)
        mask[:size] = 1
        z = rngs[j].standard_normal((m, d))
        e = _symmetric_normal(m, 2, rngs[j])
        z, e = _apply_masks(z, e, mask)
        states.append((size, mask, z, e))

    # Chains with equal size share masks, so they run as one batch.
    groups = {}
    for j, (size, _, _, _) in enumerate(states):
        groups.setdefault(size, []).append(j)

    out = [None] * count
    for size, idxs in groups.items():
        b = len(idxs)
        mask = states[idxs[0]][1]
        nm = mask.astype(np.float64)
        pm = nm[:, None] * nm[None, :]
        np.fill_diagonal(pm, 0.0)
        z = np.stack([states[j][2] for j in idxs])
        e = np.stack([states[j][3] for j in idxs])
        mask_b = np.broadcast_to(mask, (b, m))
        for t in range(big_t, 0, -1):
            (ez, ee), _ = denoiser_forward_batch(dn, z, e, mask_b, np.full(b, t))
            a = max(float(sched.alpha[t]), ALPHA_FLOOR)
            s = float(sched.sigma[t])
            z_hat = (z - s * ez) / a * nm[None, :, None]
            e_hat = (e - s * ee) / a * pm[None, :, :, None]
            ratio = sched.alpha_ratio(t)
            sig_t_sq = float(sched.sigma[t] ** 2)
            sig_prev_sq = float(sched.sigma[t - 1] ** 2)
            sig_cond_sq = sched.sigma_cond_sq(t)
            coef_state = ratio * sig_prev_sq / sig_t_sq
            coef_est = float(sched.alpha[t - 1]) * sig_cond_sq / sig_t_sq
            std = np.sqrt(max(sig_cond_sq, 0.0)) * float(sched.sigma[t - 1]) / float(sched.sigma[t])
            z = coef_state * z + coef_est * z_hat
            e = coef_state * e + coef_est * e_hat
            if std > 0:
                z = z + std * np.stack([rngs[j].standard_normal((m, d)) for j in idxs])
                e = e + std * np.stack([_symmetric_normal(m, 2, rngs[j]) for j in idxs])
            z = z * nm[None, :, None]
            e = e * pm[None, :, :, None]
        adj = np.argmax(e, axis=3).astype(np.uint8)
        for row, j in enumerate(idxs):
            a_j = adj[row]
            np.fill_diagonal(a_j, 0)
            out[j] = GeneratedSubgraph(z[row, :size], a_j[:size, :size])
    return out


def save_generated(samples, path, capacity=None) -> None:
    """Same record layout as the training dataset, minus origin ids."""
    if not samples:
        raise ValueError("refusing to write an empty sample file")
    d = samples[0].emb.shape[1]
    m = capacity if capacity is not None else max(s.size for s in samples)
    with open(path, "wb") as fh:
        fh.write(GENERATED_MAGIC)
        fh.write(struct.pack("<IQII", GENERATED_VERSION, len(samples), m, d))
        for s in samples:
            if s.size > m or s.emb.shape[1] != d:
                raise ValueError("sample exceeds declared capacity or mixes dims")
            mask = np.zeros(m, dtype=np.uint8)
            mask[: s.size] = 1
            adj = np.zeros((m, m), dtype=np.uint8)
            adj[: s.size, : s.size] = s.adj
            emb = np.zeros((m, d), dtype=np.float64)
            emb[: s.size] = s.emb
            fh.write(struct.pack("<I", s.size))
            fh.write(mask.tobytes())
            fh.write(np.packbits(adj.reshape(-1)).tobytes())
            fh.write(np.ascontiguousarray(emb, dtype="<f8").tobytes())


def load_generated(path) -> list:
    with open(path, "rb") as fh:
        if fh.read(8) != GENERATED_MAGIC:
            raise ValueError(f"{path}: not a generated-sample file")
        version, count, m, d = struct.unpack("<IQII", fh.read(4 + 8 + 4 + 4))
        if version != GENERATED_VERSION:
            raise ValueError(f"unsupported generated-sample version {version}")
        adj_bytes = (m * m + 7) // 8
        out = []
        for _ in range(count):
            (size,) = struct.unpack("<I", fh.read(4))
            fh.read(m)  # mask is implied by size; skip
            bits = np.frombuffer(fh.read(adj_bytes), dtype=np.uint8)
            adj = np.unpackbits(bits, count=m * m).reshape(m, m)
            emb = np.frombuffer(fh.read(8 * m * d), dtype="<f8").reshape(m, d)
            out.append(GeneratedSubgraph(emb[:size].astype(np.float64), adj[:size, :size]))
    return out
