"""Random-walk subgraph sampling and the on-disk dataset format.

Each sample pairs a capacity-padded adjacency block with the embedding
rows of its nodes. Walks record distinct nodes in first-visit order; the
adjacency is the full induced subgraph over those nodes, not just the
walk edges, so a sample of a dense region stays dense.

Dataset file layout (little-endian):
    magic "LGSGDS01" | version u32 | count u64 | m u32 | d u32
    per sample: size u32 | origin_ids size*u64 | mask m*u8
                | adjacency bits packbits(m*m) | emb m*d float64
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddingMatrix
from .graph import Graph
from .seeding import rng_for

DATASET_MAGIC = b"LGSGDS01"
DATASET_VERSION = 1
WALK_STEP_BUDGET_FACTOR = 10


@dataclass
class SubgraphSample:
    """Mask-padded (adjacency, embedding) block of capacity m."""

    adj: np.ndarray  # (m, m) uint8, symmetric, zero diagonal
    emb: np.ndarray  # (m, d) float64, zero rows where masked
    mask: np.ndarray  # (m,) uint8
    origin_ids: np.ndarray  # (size,) original node ids, diagnostics only

    def __post_init__(self):
        self.adj = np.asarray(self.adj, dtype=np.uint8)
        self.emb = np.asarray(self.emb, dtype=np.float64)
        self.mask = np.asarray(self.mask, dtype=np.uint8)
        self.origin_ids = np.asarray(self.origin_ids, dtype=np.int64)
        m = self.mask.shape[0]
        if self.adj.shape != (m, m) or self.emb.shape[0] != m:
            raise ValueError("adjacency/embedding/mask shapes disagree")
        if np.any(self.adj != self.adj.T) or np.any(np.diag(self.adj)):
            raise ValueError("adjacency must be symmetric with a zero diagonal")
        if np.any(self.adj.sum(axis=1) * (1 - self.mask)):
            raise ValueError("masked rows must have no edges")
        if np.any(self.emb[self.mask == 0] != 0.0):
            raise ValueError("masked embedding rows must be zero")
        if not np.all(np.isfinite(self.emb)):
            raise ValueError("embedding block contains non-finite values")
        if self.origin_ids.shape[0] != int(self.mask.sum()):
            raise ValueError("origin_ids must list exactly the real nodes")
        if len(set(self.origin_ids.tolist())) != self.origin_ids.shape[0]:
            raise ValueError("origin_ids must be distinct")

    @property
    def capacity(self) -> int:
        return int(self.mask.shape[0])

    @property
    def size(self) -> int:
        return int(self.mask.sum())

    @property
    def d(self) -> int:
        return int(self.emb.shape[1])


def random_walk(g: Graph, start, capacity, rng) -> list:
    """Distinct nodes met by a uniform-neighbor walk, in first-visit order.

    Stops after collecting ``capacity`` distinct nodes or exhausting a step
    budget of 10*capacity; an isolated start returns just [start].
    """
    start = int(start)
    if not (0 <= start < g.n):
        raise ValueError(f"start node {start} out of range")
    if capacity < 1:
        raise ValueError("capacity must be >= 1")
    visited = [start]
    seen = {start}
    cur = start
    for _ in range(WALK_STEP_BUDGET_FACTOR * capacity):
        if len(visited) >= capacity:
            break
        nb = g.neighbors(cur)
        if nb.size == 0:
            break
        cur = int(nb[rng.integers(nb.size)])
        if cur not in seen:
            seen.add(cur)
            visited.append(cur)
    return visited


def _make_sample(g: Graph, z: np.ndarray, nodes, capacity) -> SubgraphSample:
    k = len(nodes)
    adj = np.zeros((capacity, capacity), dtype=np.uint8)
    pos = {v: i for i, v in enumerate(nodes)}
    for u, v in g.edges:
        iu, iv = pos.get(u), pos.get(v)
        if iu is not None and iv is not None:
            adj[iu, iv] = 1
            adj[iv, iu] = 1
    emb = np.zeros((capacity, z.shape[1]), dtype=np.float64)
    emb[:k] = z[nodes]
    mask = np.zeros(capacity, dtype=np.uint8)
    mask[:k] = 1
    return SubgraphSample(adj, emb, mask, np.asarray(nodes, dtype=np.int64))


def build_subgraph_dataset(g: Graph, emb: EmbeddingMatrix, walks_per_node, capacity, seed=0) -> list:
    """Exactly walks_per_node * N samples: that many walks started at every
    node, each with a (seed, node, walk-index) substream so parallel and
    sequential generation agree."""
    if emb.n != g.n:
        raise ValueError(f"embedding has {emb.n} rows, graph has {g.n} nodes")
    if walks_per_node < 1:
        raise ValueError("walks_per_node must be >= 1")
    if capacity < 2:
        raise ValueError("capacity must be >= 2")
    samples = []
    for node in range(g.n):
        for w in range(walks_per_node):
            walk = random_walk(g, node, capacity, rng_for(seed, "walk", node, w))
            samples.append(_make_sample(g, emb.z, walk, capacity))
    return samples


def empirical_sizes(samples) -> np.ndarray:
    return np.array([s.size for s in samples], dtype=np.int64)


def save_dataset(samples, path) -> None:
    if not samples:
        raise ValueError("refusing to write an empty dataset")
    m = samples[0].capacity
    d = samples[0].d
    with open(path, "wb") as fh:
        fh.write(DATASET_MAGIC)
        fh.write(struct.pack("<IQII", DATASET_VERSION, len(samples), m, d))
        for s in samples:
            if s.capacity != m or s.d != d:
                raise ValueError("all samples must share capacity and embedding dim")
            fh.write(struct.pack("<I", s.size))
            fh.write(np.ascontiguousarray(s.origin_ids, dtype="<i8").tobytes())
            fh.write(np.ascontiguousarray(s.mask, dtype=np.uint8).tobytes())
            fh.write(np.packbits(s.adj.reshape(-1)).tobytes())
            fh.write(np.ascontiguousarray(s.emb, dtype="<f8").tobytes())


def load_dataset(path) -> list:
    with open(path, "rb") as fh:
        if fh.read(8) != DATASET_MAGIC:
            raise ValueError(f"{path}: not a subgraph dataset")
        version, count, m, d = struct.unpack("<IQII", fh.read(4 + 8 + 4 + 4))
        if version != DATASET_VERSION:
            raise ValueError(f"unsupported dataset version {version}")
        adj_bytes = (m * m + 7) // 8
        samples = []
        for _ in range(count):
            (size,) = struct.unpack("<I", fh.read(4))
            origin = np.frombuffer(fh.read(8 * size), dtype="<i8").astype(np.int64)
            mask = np.frombuffer(fh.read(m), dtype=np.uint8).copy()
            bits = np.frombuffer(fh.read(adj_bytes), dtype=np.uint8)
            adj = np.unpackbits(bits, count=m * m).reshape(m, m)
            emb = np.frombuffer(fh.read(8 * m * d), dtype="<f8").reshape(m, d).astype(np.float64)
            samples.append(SubgraphSample(adj, emb, mask, origin))
    return samples
