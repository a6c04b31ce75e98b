"""Noise-prediction network for the subgraph diffusion model.

Permutation-equivariant message passing over a node track (m x d) and a
two-channel edge track (m x m x 2). Each block first updates edge features
from their incident node features through a small perceptron, then updates
node features from attention-routed, edge-gated neighbor messages plus a
global mean-pooled context; a sinusoidal timestep embedding is injected
into the node track at the input projection. Linear heads emit per-track
noise predictions; the edge head is symmetrized by averaging the (i, j)
and (j, i) logits, and masked positions always output zero.

Two capacity details matter for recovering specific graphs. Edge updates
see both the sum and the elementwise product of the incident node features
(together they identify the unordered endpoint pair, which sum-pooling
alone cannot). Node messages are routed by a masked dot-product attention
whose logits and values also take contributions from the edge state; the
resulting competition between rows is what lets the reverse process park
each node on a distinct mode instead of collapsing several rows onto one.

Everything is plain numpy, batched over a leading axis so multi-draw
training steps and groups of reverse chains run as single array programs.
The forward keeps its intermediates so the backward can replay them
exactly; nonlinearities are tanh/sigmoid/softmax, so the whole map is
smooth and finite-difference checkable.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .numerics import sigmoid, sinusoidal_embedding

DENOISER_MAGIC = b"LGSGDN02"
DENOISER_VERSION = 2


@dataclass
class Denoiser:
    capacity: int
    emb_dim: int
    hidden: int
    blocks: int
    timesteps: int
    params: dict

    def param_names(self):
        return denoiser_param_names(self.blocks)

    def flat_copy(self) -> dict:
        return {k: v.copy() for k, v in self.params.items()}


def denoiser_param_names(blocks: int) -> list:
    """Declared parameter order; the checkpoint serializes in this order."""
    names = ["w_zin", "b_zin", "w_ein", "b_ein", "w_time", "b_time"]
    for i in range(blocks):
        names += [
            f"blk{i}_w_edge1", f"blk{i}_b_edge1",
            f"blk{i}_w_edge2", f"blk{i}_b_edge2",
            f"blk{i}_w_gate", f"blk{i}_b_gate",
            f"blk{i}_w_att_q", f"blk{i}_w_att_k", f"blk{i}_w_att_e",
            f"blk{i}_w_eval",
            f"blk{i}_w_node1", f"blk{i}_b_node1",
            f"blk{i}_w_node2", f"blk{i}_b_node2",
        ]
    names += ["w_zout", "b_zout", "w_eout", "b_eout"]
    return names


def _param_shapes(d, hidden, blocks):
    shapes = {
        "w_zin": (d, hidden), "b_zin": (hidden,),
        "w_ein": (2, hidden), "b_ein": (hidden,),
        "w_time": (hidden, hidden), "b_time": (hidden,),
        "w_zout": (hidden, d), "b_zout": (d,),
        "w_eout": (3 * hidden, 2), "b_eout": (2,),
    }
    for i in range(blocks):
        shapes[f"blk{i}_w_edge1"] = (3 * hidden, hidden)
        shapes[f"blk{i}_b_edge1"] = (hidden,)
        shapes[f"blk{i}_w_edge2"] = (hidden, hidden)
        shapes[f"blk{i}_b_edge2"] = (hidden,)
        shapes[f"blk{i}_w_gate"] = (hidden, hidden)
        shapes[f"blk{i}_b_gate"] = (hidden,)
        shapes[f"blk{i}_w_att_q"] = (hidden, hidden)
        shapes[f"blk{i}_w_att_k"] = (hidden, hidden)
        shapes[f"blk{i}_w_att_e"] = (hidden,)
        shapes[f"blk{i}_w_eval"] = (hidden, hidden)
        shapes[f"blk{i}_w_node1"] = (3 * hidden, hidden)
        shapes[f"blk{i}_b_node1"] = (hidden,)
        shapes[f"blk{i}_w_node2"] = (hidden, hidden)
        shapes[f"blk{i}_b_node2"] = (hidden,)
    return shapes


def init_denoiser(capacity, emb_dim, hidden, blocks, timesteps, rng) -> Denoiser:
    shapes = _param_shapes(emb_dim, hidden, blocks)
    params = {}
    for name in denoiser_param_names(blocks):
        shape = shapes[name]
        if name.startswith("b_") or "_b_" in name:
            params[name] = np.zeros(shape, dtype=np.float64)
        elif name in ("w_zout", "w_eout"):
            # Zero output heads: predictions start at exactly 0, so the
            # initial loss sits at the variance of the target noise.
            params[name] = np.zeros(shape, dtype=np.float64)
        else:
            fan = shape[0] + (shape[1] if len(shape) > 1 else 1)
            params[name] = rng.normal(0.0, np.sqrt(2.0 / fan), size=shape)
    return Denoiser(capacity, emb_dim, hidden, blocks, timesteps, params)


def _masks_batched(mask, b, m):
    nm = np.asarray(mask, dtype=np.float64).reshape(b, m)
    pm = nm[:, :, None] * nm[:, None, :]
    idx = np.arange(m)
    pm[:, idx, idx] = 0.0
    return nm, pm


def _masked_softmax(logits, pm):
    """Softmax over the last axis restricted to unmasked positions; rows with
    no unmasked positions get all-zero weights."""
    neg = np.where(pm > 0, logits, -np.inf)
    mx = np.max(neg, axis=-1, keepdims=True)
    mx = np.where(np.isfinite(mx), mx, 0.0)
    ex = np.where(pm > 0, np.exp(np.minimum(logits - mx, 50.0)), 0.0)
    z = ex.sum(axis=-1, keepdims=True)
    return ex / np.maximum(z, 1e-300)


def denoiser_forward_batch(dn: Denoiser, z, e, mask, t, want_cache=False):
    """Batched forward pass.

    Shapes: z (B, m, d), e (B, m, m, 2), mask (B, m), t (B,). Returns
    (eps_z_hat, eps_e_hat) of the same leading shapes plus an optional
    cache for the backward.
    """
    p = dn.params
    m, d, hidden = dn.capacity, dn.emb_dim, dn.hidden
    z = np.asarray(z, dtype=np.float64)
    e = np.asarray(e, dtype=np.float64)
    b = z.shape[0]
    if z.shape != (b, m, d) or e.shape != (b, m, m, 2):
        raise ValueError(
            f"input shapes {z.shape}/{e.shape} do not match model (m={m}, d={d})"
        )
    nm, pm = _masks_batched(mask, b, m)
    n_real = np.maximum(nm.sum(axis=1), 1.0)  # (B,)
    scale = 1.0 / np.sqrt(hidden)

    tau0 = np.stack([sinusoidal_embedding(ti, hidden) for ti in np.atleast_1d(t)])
    tau = tau0 @ p["w_time"] + p["b_time"]  # (B, H)

    h = (z @ p["w_zin"] + p["b_zin"] + tau[:, None, :]) * nm[:, :, None]
    g = (e @ p["w_ein"] + p["b_ein"]) * pm[:, :, :, None]

    cache = {"nm": nm, "pm": pm, "n_real": n_real, "tau0": tau0,
             "z": z, "e": e, "blocks": []} if want_cache else None

    for i in range(dn.blocks):
        w1, b1 = p[f"blk{i}_w_edge1"], p[f"blk{i}_b_edge1"]
        w2, b2 = p[f"blk{i}_w_edge2"], p[f"blk{i}_b_edge2"]
        wg, bg = p[f"blk{i}_w_gate"], p[f"blk{i}_b_gate"]
        wq, wk, we = p[f"blk{i}_w_att_q"], p[f"blk{i}_w_att_k"], p[f"blk{i}_w_att_e"]
        wev = p[f"blk{i}_w_eval"]
        w3, b3 = p[f"blk{i}_w_node1"], p[f"blk{i}_b_node1"]
        w4, b4 = p[f"blk{i}_w_node2"], p[f"blk{i}_b_node2"]

        s = h[:, :, None, :] + h[:, None, :, :]
        q = h[:, :, None, :] * h[:, None, :, :]
        u = np.concatenate([s, q, g], axis=3)
        a = np.tanh(u @ w1 + b1)
        bmat = a @ w2 + b2
        g_new = (g + bmat) * pm[:, :, :, None]

        gate = sigmoid(g_new @ wg + bg)
        qv = h @ wq
        kv = h @ wk
        logits = np.einsum("bih,bjh->bij", qv, kv) * scale + g_new @ we
        att = _masked_softmax(logits, pm)
        eval_ = g_new @ wev
        value = gate * h[:, None, :, :] + eval_
        msg = np.einsum("bij,bijh->bih", att, value)
        ctx = (h * nm[:, :, None]).sum(axis=1) / n_real[:, None]  # (B, H)
        n_in = np.concatenate(
            [h, msg, np.broadcast_to(ctx[:, None, :], (b, m, hidden))], axis=2
        )
        dvec = np.tanh(n_in @ w3 + b3)
        f = dvec @ w4 + b4
        h_new = (h + f) * nm[:, :, None]

        if want_cache:
            cache["blocks"].append({
                "h_in": h, "g_in": g, "u": u, "a": a, "g_new": g_new,
                "gate": gate, "qv": qv, "kv": kv, "att": att, "eval": eval_,
                "n_in": n_in, "dvec": dvec,
            })
        h, g = h_new, g_new

    eps_z = (h @ p["w_zout"] + p["b_zout"]) * nm[:, :, None]
    s_fin = h[:, :, None, :] + h[:, None, :, :]
    q_fin = h[:, :, None, :] * h[:, None, :, :]
    v = np.concatenate([s_fin, q_fin, g], axis=3)
    r = v @ p["w_eout"] + p["b_eout"]
    eps_e = 0.5 * (r + r.transpose(0, 2, 1, 3)) * pm[:, :, :, None]

    if want_cache:
        cache["h_fin"] = h
        cache["v"] = v
        return (eps_z, eps_e), cache
    return (eps_z, eps_e), None


def denoiser_forward(dn: Denoiser, z, e, mask, t, want_cache=False):
    """Single-sample wrapper around the batched forward."""
    (eps_z, eps_e), cache = denoiser_forward_batch(
        dn, z[None], e[None], np.asarray(mask)[None], np.array([t]), want_cache
    )
    return (eps_z[0], eps_e[0]), cache


def denoiser_backward_batch(dn: Denoiser, cache, d_eps_z, d_eps_e) -> dict:
    """Parameter gradients given gradients on the two outputs (summed over
    the batch axis)."""
    p = dn.params
    hidden = dn.hidden
    nm, pm = cache["nm"], cache["pm"]
    n_real = cache["n_real"]
    scale = 1.0 / np.sqrt(hidden)
    grads = {k: np.zeros_like(v) for k, v in p.items()}

    # Edge head: eps_e = 0.5 (r + r^T) * pm.
    gmat = d_eps_e * pm[:, :, :, None]
    d_r = 0.5 * (gmat + gmat.transpose(0, 2, 1, 3))
    grads["w_eout"] += cache["v"].reshape(-1, 3 * hidden).T @ d_r.reshape(-1, 2)
    grads["b_eout"] += d_r.sum(axis=(0, 1, 2))
    d_v = d_r @ p["w_eout"].T
    d_s = d_v[..., :hidden]
    d_q = d_v[..., hidden : 2 * hidden]
    d_g = d_v[..., 2 * hidden :]
    h_fin = cache["h_fin"]
    d_h = d_s.sum(axis=2) + d_s.sum(axis=1)
    d_h += (d_q * h_fin[:, None, :, :]).sum(axis=2) + (d_q * h_fin[:, :, None, :]).sum(axis=1)

    # Node head.
    dz_masked = d_eps_z * nm[:, :, None]
    grads["w_zout"] += h_fin.reshape(-1, hidden).T @ dz_masked.reshape(-1, dn.emb_dim)
    grads["b_zout"] += dz_masked.sum(axis=(0, 1))
    d_h += dz_masked @ p["w_zout"].T

    for i in reversed(range(dn.blocks)):
        blk = cache["blocks"][i]
        w2 = p[f"blk{i}_w_edge2"]
        wg = p[f"blk{i}_w_gate"]
        wq, wk, we = p[f"blk{i}_w_att_q"], p[f"blk{i}_w_att_k"], p[f"blk{i}_w_att_e"]
        wev = p[f"blk{i}_w_eval"]
        w3 = p[f"blk{i}_w_node1"]
        w4 = p[f"blk{i}_w_node2"]
        h_in = blk["h_in"]
        gate, att, n_in, dvec = blk["gate"], blk["att"], blk["n_in"], blk["dvec"]

        # h_new = (h_in + f) * nm
        d_f = d_h * nm[:, :, None]
        d_h_in = d_h * nm[:, :, None]
        # f = dvec @ w4 + b4
        grads[f"blk{i}_w_node2"] += dvec.reshape(-1, hidden).T @ d_f.reshape(-1, hidden)
        grads[f"blk{i}_b_node2"] += d_f.sum(axis=(0, 1))
        d_dvec = d_f @ w4.T
        # dvec = tanh(n_in @ w3 + b3)
        d_pre3 = d_dvec * (1.0 - dvec * dvec)
        grads[f"blk{i}_w_node1"] += n_in.reshape(-1, 3 * hidden).T @ d_pre3.reshape(-1, hidden)
        grads[f"blk{i}_b_node1"] += d_pre3.sum(axis=(0, 1))
        d_nin = d_pre3 @ w3.T
        d_h_in += d_nin[..., :hidden]
        d_msg = d_nin[..., hidden : 2 * hidden]
        d_ctx = d_nin[..., 2 * hidden :].sum(axis=1)  # (B, H)
        # ctx = sum_i nm_i h_i / n_real
        d_h_in += nm[:, :, None] * (d_ctx / n_real[:, None])[:, None, :]
        # msg_i = sum_j att_ij (gate_ijh h_jh + eval_ijh)
        value = gate * h_in[:, None, :, :] + blk["eval"]
        d_att = np.einsum("bih,bijh->bij", d_msg, value)
        d_gate = att[:, :, :, None] * d_msg[:, :, None, :] * h_in[:, None, :, :]
        d_h_in += np.einsum("bij,bijh,bih->bjh", att, gate, d_msg)
        d_eval = att[:, :, :, None] * d_msg[:, :, None, :]
        grads[f"blk{i}_w_eval"] += (
            blk["g_new"].reshape(-1, hidden).T @ d_eval.reshape(-1, hidden)
        )
        d_gnew = d_eval @ wev.T
        # att = masked softmax(logits)
        inner = (att * d_att).sum(axis=2, keepdims=True)
        d_logits = att * (d_att - inner)
        # logits = (qv kv^T) * scale + g_new @ we
        d_qv = np.einsum("bij,bjh->bih", d_logits, blk["kv"]) * scale
        d_kv = np.einsum("bij,bih->bjh", d_logits, blk["qv"]) * scale
        grads[f"blk{i}_w_att_q"] += h_in.reshape(-1, hidden).T @ d_qv.reshape(-1, hidden)
        grads[f"blk{i}_w_att_k"] += h_in.reshape(-1, hidden).T @ d_kv.reshape(-1, hidden)
        d_h_in += d_qv @ wq.T + d_kv @ wk.T
        grads[f"blk{i}_w_att_e"] += (blk["g_new"] * d_logits[:, :, :, None]).sum(axis=(0, 1, 2))
        d_gnew += d_logits[:, :, :, None] * we[None, None, None, :]
        # gate = sigmoid(g_new @ wg + bg)
        d_gpre = d_gate * gate * (1.0 - gate)
        grads[f"blk{i}_w_gate"] += blk["g_new"].reshape(-1, hidden).T @ d_gpre.reshape(-1, hidden)
        grads[f"blk{i}_b_gate"] += d_gpre.sum(axis=(0, 1, 2))
        d_gnew += d_g + d_gpre @ wg.T
        # g_new = (g_in + bmat) * pm
        d_bmat = d_gnew * pm[:, :, :, None]
        d_g_in = d_gnew * pm[:, :, :, None]
        # bmat = a @ w2 + b2
        grads[f"blk{i}_w_edge2"] += blk["a"].reshape(-1, hidden).T @ d_bmat.reshape(-1, hidden)
        grads[f"blk{i}_b_edge2"] += d_bmat.sum(axis=(0, 1, 2))
        d_a = d_bmat @ w2.T
        # a = tanh(u @ w1 + b1)
        d_pre1 = d_a * (1.0 - blk["a"] * blk["a"])
        grads[f"blk{i}_w_edge1"] += blk["u"].reshape(-1, 3 * hidden).T @ d_pre1.reshape(-1, hidden)
        grads[f"blk{i}_b_edge1"] += d_pre1.sum(axis=(0, 1, 2))
        d_u = d_pre1 @ p[f"blk{i}_w_edge1"].T
        d_s_in = d_u[..., :hidden]
        d_q_in = d_u[..., hidden : 2 * hidden]
        d_g_in += d_u[..., 2 * hidden :]
        d_h_in += d_s_in.sum(axis=2) + d_s_in.sum(axis=1)
        d_h_in += (d_q_in * h_in[:, None, :, :]).sum(axis=2)
        d_h_in += (d_q_in * h_in[:, :, None, :]).sum(axis=1)

        d_h, d_g = d_h_in, d_g_in

    # Input projections.
    d_hpre = d_h * nm[:, :, None]
    grads["w_zin"] += cache["z"].reshape(-1, dn.emb_dim).T @ d_hpre.reshape(-1, hidden)
    grads["b_zin"] += d_hpre.sum(axis=(0, 1))
    d_tau = d_hpre.sum(axis=1)  # (B, H)
    d_gpre0 = d_g * pm[:, :, :, None]
    grads["w_ein"] += cache["e"].reshape(-1, 2).T @ d_gpre0.reshape(-1, hidden)
    grads["b_ein"] += d_gpre0.sum(axis=(0, 1, 2))
    grads["w_time"] += cache["tau0"].T @ d_tau
    grads["b_time"] += d_tau.sum(axis=0)
    return grads


def denoiser_backward(dn: Denoiser, cache, d_eps_z, d_eps_e) -> dict:
    """Single-sample wrapper around the batched backward."""
    return denoiser_backward_batch(dn, cache, d_eps_z[None], d_eps_e[None])


def save_denoiser(dn: Denoiser, path) -> None:
    """Header (magic, version, m, d, hidden, blocks, T) + parameter blobs in
    the declared order; the schedule is re-derived from T, never stored."""
    with open(path, "wb") as fh:
        fh.write(DENOISER_MAGIC)
        fh.write(struct.pack(
            "<IIIIII", DENOISER_VERSION, dn.capacity, dn.emb_dim,
            dn.hidden, dn.blocks, dn.timesteps,
        ))
        for name in dn.param_names():
            fh.write(np.ascontiguousarray(dn.params[name], dtype="<f8").tobytes())


def load_denoiser(path) -> Denoiser:
    with open(path, "rb") as fh:
        if fh.read(8) != DENOISER_MAGIC:
            raise ValueError(f"{path}: not a denoiser checkpoint")
        version, m, d, hidden, blocks, timesteps = struct.unpack("<IIIIII", fh.read(24))
        if version != DENOISER_VERSION:
            raise ValueError(f"unsupported denoiser checkpoint version {version}")
        shapes = _param_shapes(d, hidden, blocks)
        params = {}
        for name in denoiser_param_names(blocks):
            shape = shapes[name]
            count = int(np.prod(shape))
            params[name] = (
                np.frombuffer(fh.read(8 * count), dtype="<f8").reshape(shape).astype(np.float64)
            )
    return Denoiser(m, d, hidden, blocks, timesteps, params)
