"""Continuous diffusion over (embedding, adjacency) blocks.

Walks through the pieces: the variance-preserving schedule, forward
noising, the exact inversion when the true noise is known, and a short
training run that overfits a single subgraph until reverse sampling
reproduces it (up to node order, which the embeddings recover).
"""

import numpy as np

from lgsg import DiffusionConfig, make_schedule, sample_subgraphs, train_diffusion
from lgsg.diffusion import denoise_estimate, encode_sample, forward_noise
from lgsg.sampling import SubgraphSample
from lgsg.seeding import rng_for

sched = make_schedule(50)
print(f"schedule T=50: alpha goes {sched.alpha[0]:.3f} -> {sched.alpha[-1]:.4f}, "
      f"alpha^2 + sigma^2 deviates by {np.abs(sched.alpha**2 + sched.sigma**2 - 1).max():.1e}")

adj = np.zeros((6, 6), dtype=np.uint8)
for u, v in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]:
    adj[u, v] = adj[v, u] = 1
emb = rng_for(11).standard_normal((6, 8)) * 2.5
sample = SubgraphSample(adj, emb, np.ones(6, dtype=np.uint8), np.arange(6))
z0, e0 = encode_sample(sample)

ns, eps_z, eps_e = forward_noise(z0, e0, sample.mask, 25, sched, rng_for(1))
z_hat, e_hat = denoise_estimate(ns, (eps_z, eps_e), sched)
print(f"inversion with the true noise recovers the origin to {np.abs(z_hat - z0).max():.1e}")

print("\ntraining a small model to overfit this one subgraph (about a minute)...")
losses = []
cfg = DiffusionConfig(timesteps=50, steps=1500, hidden=64, blocks=3,
                      optimizer="adam", lr=3e-3, noise_draws_per_step=8)
model = train_diffusion([sample], cfg, seed=5, loss_out=losses)
print(f"loss {losses[0]:.3f} -> {np.mean(losses[-100:]):.3f}")

generated = sample_subgraphs(model, 20, [6], seed=6)
hits = 0
for g in generated:
    d = np.linalg.norm(g.emb[:, None, :] - emb[None, :, :], axis=2)
    assign = d.argmin(axis=1)
    if len(set(assign.tolist())) != 6:
        continue
    perm_adj = np.zeros_like(adj)
    for i in range(6):
        for j in range(6):
            perm_adj[assign[i], assign[j]] = g.adj[i, j]
    hits += int(np.array_equal(perm_adj, adj))
print(f"{hits}/20 samples reproduce the training subgraph exactly "
      f"(after aligning nodes by embedding)")
print("a longer run (the acceptance suite uses 5000 steps) pushes this above 80%")
