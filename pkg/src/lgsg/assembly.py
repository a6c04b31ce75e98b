"""Assemble generated subgraphs into one output graph.

Node aggregation starts from the disjoint union of all subgraphs, builds
every cross-subgraph node pair into a min-heap keyed by the L2 distance
between the nodes' embeddings, and greedily merges the closest pair (via
a disjoint-set union) until the requested node count remains. Distances
are between the original node embeddings only; merged supernodes never get
recomputed pair distances.

Threshold matching processes subgraphs in order, mapping every node of the
incoming subgraph to its closest node in the graph built so far when that
distance is at most delta, else inserting it as a new node. Matches are
computed against the state before any of the current subgraph's nodes are
added, so nodes of one subgraph never match each other.

Both algorithms emit simple graphs: merge-induced self-loops are dropped
and parallel edges collapse.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .dsu import DisjointSetUnion
from .graph import Graph


@dataclass
class AssemblyInput:
    """Flattened view of a list of generated subgraphs.

    Node ids are global (block offsets per subgraph); ``provenance[i]`` is
    the index of the subgraph that produced node i.
    """

    emb: np.ndarray  # (total, d)
    provenance: np.ndarray  # (total,)
    edges: list  # global (u, v) pairs
    sizes: list

    @classmethod
    def from_samples(cls, samples) -> "AssemblyInput":
        if not samples:
            raise ValueError("no subgraphs to assemble")
        emb_blocks, prov, edges, sizes = [], [], [], []
        offset = 0
        for i, s in enumerate(samples):
            emb_blocks.append(np.asarray(s.emb, dtype=np.float64))
            prov.extend([i] * s.size)
            iu, ju = np.nonzero(np.triu(np.asarray(s.adj), k=1))
            edges.extend(zip((iu + offset).tolist(), (ju + offset).tolist()))
            sizes.append(s.size)
            offset += s.size
        emb = np.vstack(emb_blocks)
        if not np.all(np.isfinite(emb)):
            raise ValueError("assembly input embeddings must be finite")
        return cls(emb, np.asarray(prov, dtype=np.int64), edges, sizes)

    @property
    def total_nodes(self) -> int:
        return int(self.emb.shape[0])


@dataclass
class AssembledGraph:
    graph: Graph
    node_embeddings: np.ndarray  # representative embedding per output node
    members: list  # constituent input-node ids per output node


def _pair_distances(emb: np.ndarray) -> np.ndarray:
    # Plain sqrt-of-squared-sums so any reference reimplementation that
    # computes np.sqrt(((a - b) ** 2).sum()) per pair gets identical bits.
    diff = emb[:, None, :] - emb[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def node_aggregation(inp: AssemblyInput, target_nodes: int) -> AssembledGraph:
    """Greedy closest-pair merging down to exactly ``target_nodes`` supernodes.

    Ties in distance break by lexicographic pair order (global node ids
    follow (subgraph index, node index) order, so that is the same thing).
    """
    total = inp.total_nodes
    if not (1 <= target_nodes <= total):
        raise ValueError(
            f"cannot split nodes: target {target_nodes} outside 1..{total}"
        )
    dist = _pair_distances(inp.emb)
    prov = inp.provenance
    heap = [
        (float(dist[u, v]), u, v)
        for u in range(total)
        for v in range(u + 1, total)
        if prov[u] != prov[v]
    ]
    heapq.heapify(heap)
    dsu = DisjointSetUnion(total)
    while dsu.groups > target_nodes:
        if not heap:
            raise ValueError(
                f"target {target_nodes} unreachable: no cross-subgraph pairs left "
                f"at {dsu.groups} supernodes"
            )
        _, u, v = heapq.heappop(heap)
        if dsu.same(u, v):
            continue
        dsu.link(u, v)
    return _finish(inp, dsu)


def _finish(inp: AssemblyInput, dsu: DisjointSetUnion) -> AssembledGraph:
    members_by_root = {}
    for v in range(inp.total_nodes):
        members_by_root.setdefault(dsu.find(v), []).append(v)
    # Output nodes ordered by smallest member id, so zero merges reproduce
    # the disjoint union exactly.
    roots = sorted(members_by_root, key=lambda r: members_by_root[r][0])
    index_of = {}
    members = []
    for i, r in enumerate(roots):
        members.append(members_by_root[r])
        for v in members_by_root[r]:
            index_of[v] = i
    edges = {
        (a, b)
        for u, v in inp.edges
        for a, b in [(index_of[u], index_of[v])]
        if a != b
    }
    graph = Graph(len(roots), edges)
    reps = np.vstack([inp.emb[m].mean(axis=0) for m in members])
    return AssembledGraph(graph, reps, members)


def threshold_matching(inp: AssemblyInput, delta: float) -> AssembledGraph:
    """Sequential insertion with nearest-node matching under distance delta.

    A negative delta degenerates to the disjoint union; an infinite delta
    maps every node after the first subgraph onto an existing one. Argmin
    ties break toward the smallest insertion index, and matched nodes keep
    the existing node's embedding.
    """
    if not inp.sizes:
        raise ValueError("no subgraphs to assemble")
    starts = np.cumsum([0] + list(inp.sizes))
    edges_by_block = [[] for _ in inp.sizes]
    for u, v in inp.edges:
        b = int(np.searchsorted(starts, u, side="right")) - 1
        edges_by_block[b].append((u, v))
    out_emb = []  # one row per output node, in insertion order
    members = []
    edges = set()
    offset = 0
    for bi, size in enumerate(inp.sizes):
        block = inp.emb[offset : offset + size]
        mapping = {}
        fresh = []
        if out_emb:
            existing = np.vstack(out_emb)
            diff = existing[:, None, :] - block[None, :, :]
            dists = np.sqrt((diff * diff).sum(axis=-1))
            nearest = np.argmin(dists, axis=0)  # first minimum = oldest node
        for j in range(size):
            if out_emb:
                u = int(nearest[j])
                if dists[u, j] <= delta:
                    mapping[j] = u
                    continue
            fresh.append(j)
        for j in fresh:
            mapping[j] = len(out_emb)
            out_emb.append(block[j])
            members.append([])
        for j in range(size):
            members[mapping[j]].append(offset + j)
        for u, v in edges_by_block[bi]:
            a, b = mapping[u - offset], mapping[v - offset]
            if a != b:
                edges.add((a, b) if a < b else (b, a))
        offset += size
    graph = Graph(len(out_emb), edges)
    return AssembledGraph(graph, np.vstack(out_emb), members)
