"""Fitted classical graph generators: Erdos-Renyi, Barabasi-Albert,
stochastic Kronecker with a KronFit-style initiator fit.

Fit rules: the ER edge probability is the input graph's edge density; the
BA attachment count is half the input's average degree (rounded half-up,
floor 1); the Kronecker 2x2 initiator is fitted by approximate maximum
likelihood with gradient ascent over the initiator entries and Metropolis
swap sampling over the node-to-index permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .metrics import average_degree

THETA_MIN, THETA_MAX = 0.001, 0.999
MAX_KRON_POWER = 14


@dataclass
class KroneckerInitiator:
    theta: np.ndarray  # 2x2 probabilities
    k: int  # Kronecker power; generated size is 2^k

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.shape != (2, 2):
            raise ValueError("initiator must be 2x2")
        if np.any(self.theta < 0.0) or np.any(self.theta > 1.0):
            raise ValueError("initiator entries must lie in [0, 1]")
        if self.k < 1:
            raise ValueError("Kronecker power must be >= 1")


@dataclass
class KronFitConfig:
    iterations: int = 50
    swaps_per_iteration: int = 30
    lr: float = 0.05
    init_theta: tuple = ((0.9, 0.6), (0.6, 0.2))


def fit_edge_probability(g_in: Graph) -> float:
    if g_in.n < 2:
        raise ValueError("need at least two nodes to fit an edge probability")
    return g_in.n_edges / (g_in.n * (g_in.n - 1) / 2.0)


def erdos_renyi(g_in: Graph, n_out: int, rng) -> Graph:
    """G(n_out, p) with p fitted as the input graph's edge density."""
    if n_out < 1:
        raise ValueError("n_out must be >= 1")
    p = fit_edge_probability(g_in)
    iu, ju = np.triu_indices(n_out, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n_out, zip(iu[keep].tolist(), ju[keep].tolist()))


def fit_attachment(g_in: Graph) -> int:
    """Half the average degree, rounded half-up, never below 1."""
    return max(1, int(math.floor(average_degree(g_in) / 2.0 + 0.5)))


def barabasi_albert(g_in: Graph, n_out: int, rng) -> Graph:
    """Preferential attachment with m_a = fit_attachment(g_in) edges per node.

    The seed is a star on m_a nodes (m_a - 1 edges), so the output has
    exactly m_a * (n_out - m_a) + (m_a - 1) edges. When every existing
    degree is zero (the single-node seed), the attachment target is chosen
    uniformly.
    """
    m_a = fit_attachment(g_in)
    if n_out <= m_a:
        raise ValueError(f"n_out must exceed the attachment count {m_a}")
    edges = [(0, leaf) for leaf in range(1, m_a)]
    deg = np.zeros(n_out, dtype=np.float64)
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    for new in range(m_a, n_out):
        total = deg[:new].sum()
        if total > 0:
            probs = deg[:new] / total
            targets = rng.choice(new, size=m_a, replace=False, p=probs)
        else:
            targets = rng.choice(new, size=m_a, replace=False)
        for tgt in targets:
            edges.append((int(tgt), new))
            deg[tgt] += 1
            deg[new] += 1
    return Graph(n_out, edges)


def ba_edge_count(m_a: int, n_out: int) -> int:
    """Closed-form edge count of the documented construction."""
    return m_a * (n_out - m_a) + (m_a - 1)


def _kron_probability_matrix(theta: np.ndarray, k: int) -> np.ndarray:
    p = np.array([[1.0]])
    for _ in range(k):
        p = np.kron(p, theta)
    return p


def kronecker_generate(init: KroneckerInitiator, rng, n_out=None) -> Graph:
    """Stochastic Kronecker graph on 2^k nodes (optionally truncated).

    Pair (u, v) with u < v appears with the level-wise product of initiator
    entries indexed by the bits of u and v, averaged with the transposed
    product so asymmetric initiators still give a symmetric model.
    Self-loops are skipped; truncation drops the highest-index nodes.
    """
    if init.k > MAX_KRON_POWER:
        raise ValueError(f"Kronecker power {init.k} too large to materialize")
    n_full = 2 ** init.k
    n = n_full if n_out is None else int(n_out)
    if not (1 <= n <= n_full):
        raise ValueError(f"n_out must lie in 1..{n_full}")
    p_full = _kron_probability_matrix(init.theta, init.k)[:n, :n]
    p_sym = 0.5 * (p_full + p_full.T)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p_sym[iu, ju]
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def kron_pair_probability(theta: np.ndarray, k: int, u: int, v: int) -> float:
    """Symmetrized edge probability for one pair, straight from the bit rule."""
    p_uv, p_vu = 1.0, 1.0
    for level in range(k):
        bu = (u >> (k - 1 - level)) & 1
        bv = (v >> (k - 1 - level)) & 1
        p_uv *= theta[bu, bv]
        p_vu *= theta[bv, bu]
    return 0.5 * (p_uv + p_vu)


def _edge_bits(perm_u, perm_v, k):
    shifts = np.arange(k - 1, -1, -1)
    bu = (perm_u[:, None] >> shifts) & 1
    bv = (perm_v[:, None] >> shifts) & 1
    return bu, bv


def _edge_products(theta, bu, bv):
    return theta[bu, bv].prod(axis=1), theta[bv, bu].prod(axis=1)


def kron_log_likelihood(theta: np.ndarray, k: int, perm_u, perm_v) -> float:
    """Approximate log-likelihood of an undirected graph under the initiator.

    The no-edge mass uses the Taylor expansion log(1-p) ~ -p - p^2/2, whose
    sums over all pairs have closed forms in the initiator entries, plus a
    per-edge correction; this is the standard KronFit objective.
    """
    p_uv, p_vu = _edge_products(theta, *_edge_bits(perm_u, perm_v, k))
    p = 0.5 * (p_uv + p_vu)
    edge_term = float(np.log(p).sum() + p.sum() + 0.5 * (p * p).sum())
    s1 = theta.sum()
    t1 = np.trace(theta)
    s2 = (theta**2).sum()
    t2 = (np.diag(theta) ** 2).sum()
    c = (theta * theta.T).sum()
    sum_p = (s1**k - t1**k) / 2.0
    sum_p2 = 0.25 * ((s2**k - t2**k) + (c**k - t2**k))
    return edge_term - sum_p - 0.5 * sum_p2


def kron_loglik_gradient(theta: np.ndarray, k: int, perm_u, perm_v) -> np.ndarray:
    bu, bv = _edge_bits(perm_u, perm_v, k)
    p_uv, p_vu = _edge_products(theta, bu, bv)
    p = 0.5 * (p_uv + p_vu)
    # c[e, i, j] = number of levels where the edge's bits select theta[i, j].
    flat = (2 * bu + bv).astype(np.int64)
    counts = np.zeros((flat.shape[0], 4), dtype=np.float64)
    for slot in range(4):
        counts[:, slot] = (flat == slot).sum(axis=1)
    c_uv = counts.reshape(-1, 2, 2)
    c_vu = c_uv.transpose(0, 2, 1)
    w = (1.0 / p + 1.0 + p) * 0.5
    grad_edges = (
        (w[:, None, None] * (p_uv[:, None, None] * c_uv + p_vu[:, None, None] * c_vu)).sum(axis=0)
        / theta
    )
    s1 = theta.sum()
    t1 = np.trace(theta)
    s2 = (theta**2).sum()
    t2 = (np.diag(theta) ** 2).sum()
    c = (theta * theta.T).sum()
    eye = np.eye(2)
    d_sum_p = (k * s1 ** (k - 1) - eye * k * t1 ** (k - 1)) / 2.0
    d_s2k = k * s2 ** (k - 1) * 2.0 * theta
    d_t2k = eye * (k * t2 ** (k - 1) * 2.0 * theta)
    d_ck = k * c ** (k - 1) * 2.0 * theta.T
    d_sum_p2 = 0.25 * ((d_s2k - d_t2k) + (d_ck - d_t2k))
    return grad_edges - d_sum_p - 0.5 * d_sum_p2


def _initial_permutation(g_in: Graph, theta: np.ndarray, k: int) -> np.ndarray:
    """High-degree nodes go to the Kronecker indices with the highest
    expected degree under the initial initiator."""
    n_full = 2 ** k
    row_sums = theta.sum(axis=1)
    idx = np.arange(n_full)
    shifts = np.arange(k - 1, -1, -1)
    bits = (idx[:, None] >> shifts) & 1
    expected = row_sums[bits].prod(axis=1)
    index_order = np.argsort(-expected, kind="stable")
    node_order = np.argsort(-g_in.degrees(), kind="stable")
    perm = np.empty(n_full, dtype=np.int64)
    spare = iter(index_order[g_in.n :])
    for rank, node in enumerate(node_order):
        perm[node] = index_order[rank]
    for extra in range(g_in.n, n_full):
        perm[extra] = next(spare)
    return perm


def kronfit(g_in: Graph, config: KronFitConfig = None, rng=None, trace_out=None) -> KroneckerInitiator:
    """Fit a 2x2 initiator to a graph by approximate likelihood ascent.

    The graph is conceptually padded to 2^ceil(log2 n) nodes (the padding
    nodes are isolated, which the closed-form no-edge mass already covers).
    Each iteration runs Metropolis permutation swaps at fixed theta, then a
    gradient step accepted only if it improves the likelihood at the
    current permutation. The returned theta is the best seen overall, so
    the final likelihood is never below the initial one.
    """
    if g_in.n < 4:
        raise ValueError("kronfit needs at least 4 nodes")
    if g_in.n_edges == 0:
        raise ValueError("kronfit needs at least one edge")
    config = config or KronFitConfig()
    rng = rng if rng is not None else np.random.default_rng(0)
    k = int(math.ceil(math.log2(g_in.n)))
    theta = np.clip(np.asarray(config.init_theta, dtype=np.float64), THETA_MIN, THETA_MAX)
    perm = _initial_permutation(g_in, theta, k)
    n_full = 2 ** k
    ea = g_in.edge_array()

    def loglik(th, pm):
        return kron_log_likelihood(th, k, pm[ea[:, 0]], pm[ea[:, 1]])

    ll = loglik(theta, perm)
    if not np.isfinite(ll):
        raise FloatingPointError("non-finite likelihood at initialization")
    best_ll, best_theta = ll, theta.copy()
    lr = config.lr
    if trace_out is not None:
        trace_out.append(ll)
    for iteration in range(config.iterations):
        for _ in range(config.swaps_per_iteration):
            i, j = rng.integers(n_full), rng.integers(n_full)
            if i == j:
                continue
            cand = perm.copy()
            cand[i], cand[j] = cand[j], cand[i]
            cand_ll = loglik(theta, cand)
            if cand_ll >= ll or rng.random() < np.exp(cand_ll - ll):
                perm, ll = cand, cand_ll
        grad = kron_loglik_gradient(theta, k, perm[ea[:, 0]], perm[ea[:, 1]])
        step = lr * grad / max(np.abs(grad).max(), 1e-12)
        cand_theta = np.clip(theta + step, THETA_MIN, THETA_MAX)
        cand_ll = loglik(cand_theta, perm)
        if not np.isfinite(cand_ll):
            raise FloatingPointError(f"non-finite likelihood at iteration {iteration}")
        if cand_ll >= ll:
            theta, ll = cand_theta, cand_ll
            lr *= 1.1
        else:
            lr *= 0.5
        if ll > best_ll:
            best_ll, best_theta = ll, theta.copy()
        if trace_out is not None:
            trace_out.append(ll)
    return KroneckerInitiator(best_theta, k)
