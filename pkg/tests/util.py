"""Shared fixtures and small graph builders for the test suite."""

import numpy as np

from lgsg import Graph
from lgsg.diffusion import GeneratedSubgraph
from lgsg.seeding import rng_for


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n):
    """Center 0 with n-1 leaves."""
    return Graph(n, [(0, i) for i in range(1, n)])


def complete_graph(n):
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def two_cliques(k):
    edges = []
    for base in (0, k):
        edges += [(base + i, base + j) for i in range(k) for j in range(i + 1, k)]
    return Graph(2 * k, edges)


def random_gnp(n, p, seed):
    rng = rng_for("gnp", seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph(n, zip(iu[keep].tolist(), ju[keep].tolist()))


def make_sbm(n, blocks, p_in, p_out, seed):
    rng = rng_for(seed, "sbm")
    labels = np.array([i * blocks // n for i in range(n)])
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            p = p_in if labels[u] == labels[v] else p_out
            if rng.random() < p:
                edges.append((u, v))
    return Graph(n, edges)


def gen_subgraph(embs, edges, n=None):
    """GeneratedSubgraph from raw embedding rows and an edge list."""
    embs = np.atleast_2d(np.asarray(embs, dtype=float))
    if embs.shape[0] == 1 and n is not None and n > 1:
        embs = embs.T
    k = n if n is not None else embs.shape[0]
    adj = np.zeros((k, k), dtype=np.uint8)
    for u, v in edges:
        adj[u, v] = adj[v, u] = 1
    return GeneratedSubgraph(embs.reshape(k, -1), adj)


def fixture_ab_subgraphs():
    """The two 1-d-embedding subgraphs used by the assembler hand simulations."""
    a = gen_subgraph(np.array([[0.0], [1.0], [2.0]]), [(0, 1), (1, 2)])
    b = gen_subgraph(np.array([[0.05], [5.0], [6.0]]), [(0, 1), (1, 2)])
    return [a, b]


def random_assembly_input(rng, max_subgraphs=4, max_size=4, d=2):
    """Small random generated-subgraph lists for oracle comparisons."""
    n_sub = int(rng.integers(2, max_subgraphs + 1))
    subs = []
    for _ in range(n_sub):
        k = int(rng.integers(1, max_size + 1))
        embs = rng.normal(0.0, 1.0, size=(k, d)).round(3)
        edges = [
            (i, j) for i in range(k) for j in range(i + 1, k)
            if rng.random() < 0.5
        ]
        subs.append(gen_subgraph(embs, edges))
    return subs
