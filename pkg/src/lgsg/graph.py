"""Undirected simple graphs on dense integer node ids, plus edge-list I/O.

The edge-list format is UTF-8 text with one edge per line as two
whitespace-separated non-negative integers. Lines starting with ``#`` are
comments; a comment of the form ``# nodes: N`` declares the node count,
which is how emitted graphs preserve trailing isolated nodes. Feature
files are plain CSV with one row per node and no header.
"""

from __future__ import annotations

import json
import logging
import re

import numpy as np

logger = logging.getLogger(__name__)

_NODES_DIRECTIVE = re.compile(r"#\s*nodes\s*[:=]\s*(\d+)", re.IGNORECASE)


class Graph:
    """Immutable undirected simple graph on nodes ``0..n-1``.

    Edges are kept as a frozenset of ``(u, v)`` tuples with ``u < v``; both
    orientations of an input pair collapse to one edge. ``features`` is an
    optional float matrix with one row per node.
    """

    def __init__(self, n, edges, features=None):
        self.n = int(n)
        if self.n < 0:
            raise ValueError("node count must be non-negative")
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u},{v}) out of range for n={self.n}")
            canon.add((u, v) if u < v else (v, u))
        self.edges = frozenset(canon)
        if features is not None:
            features = np.array(features, dtype=np.float64)
            if features.ndim != 2 or features.shape[0] != self.n:
                raise ValueError(
                    f"feature matrix must have {self.n} rows, got shape {features.shape}"
                )
            if features.shape[1] < 1:
                raise ValueError("feature matrix must have at least one column")
            if not np.all(np.isfinite(features)):
                raise ValueError("feature matrix contains non-finite values")
            features.setflags(write=False)
        self.features = features
        self.self_loops_dropped = 0
        self._neighbors = None
        self._degrees = None

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_array(self) -> np.ndarray:
        """Edges as a sorted (E, 2) int array; canonical iteration order."""
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def _build_adjacency(self):
        lists = [[] for _ in range(self.n)]
        for u, v in self.edges:
            lists[u].append(v)
            lists[v].append(u)
        self._neighbors = [np.array(sorted(l), dtype=np.int64) for l in lists]
        self._degrees = np.array([len(l) for l in lists], dtype=np.int64)

    def neighbors(self, v) -> np.ndarray:
        """Sorted neighbor ids of ``v``."""
        if self._neighbors is None:
            self._build_adjacency()
        return self._neighbors[v]

    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            self._build_adjacency()
        return self._degrees

    def degree(self, v) -> int:
        return int(self.degrees()[v])

    def has_edge(self, u, v) -> bool:
        u, v = int(u), int(v)
        return ((u, v) if u < v else (v, u)) in self.edges

    def adjacency_matrix(self) -> np.ndarray:
        """Dense symmetric 0/1 matrix; intended for small graphs."""
        a = np.zeros((self.n, self.n), dtype=np.uint8)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        return a

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.n_edges})"


def load_edge_list(path, features_path=None, reindex=False) -> Graph:
    """Read a graph from an edge-list file.

    Duplicate lines and both orientations collapse to a single undirected
    edge. Self-loop lines are dropped (counted on the returned graph as
    ``self_loops_dropped``). The node count is ``1 + max index`` unless a
    ``# nodes: N`` directive declares it. With ``reindex=True``, sparse ids
    are remapped to a dense range and the mapping is persisted next to the
    input file as ``<path>.nodemap.json``.
    """
    declared_n = None
    pairs = set()
    dropped = 0
    ids = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = _NODES_DIRECTIVE.match(line)
                if m:
                    declared_n = int(m.group(1))
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected two tokens, got {len(tokens)}")
            try:
                u, v = int(tokens[0]), int(tokens[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer token") from exc
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative node id")
            if u == v:
                dropped += 1
                continue
            pairs.add((u, v) if u < v else (v, u))
            ids.add(u)
            ids.add(v)

    if reindex and ids:
        ordered = sorted(ids)
        if ordered != list(range(len(ordered))):
            mapping = {orig: dense for dense, orig in enumerate(ordered)}
            pairs = {(mapping[u], mapping[v]) for u, v in pairs}
            map_path = f"{path}.nodemap.json"
            with open(map_path, "w", encoding="utf-8") as fh:
                json.dump({str(k): v for k, v in mapping.items()}, fh, indent=0, sort_keys=True)
            logger.info("reindexed %d sparse node ids; mapping saved to %s", len(mapping), map_path)
            ids = set(mapping.values())

    max_id = max(ids) if ids else -1
    n = max_id + 1
    if declared_n is not None:
        if declared_n < n:
            raise ValueError(f"declared node count {declared_n} < 1 + max index {max_id}")
        n = declared_n

    features = None
    if features_path is not None:
        features = np.loadtxt(features_path, delimiter=",", dtype=np.float64, ndmin=2)
        if features.shape[0] != n:
            raise ValueError(
                f"feature file has {features.shape[0]} rows, graph has {n} nodes"
            )

    g = Graph(n, pairs, features=features)
    g.self_loops_dropped = dropped
    if dropped:
        logger.warning("dropped %d self-loop line(s) while loading %s", dropped, path)
    return g


def save_edge_list(g: Graph, path) -> None:
    """Write a graph in the edge-list format, with a node-count directive."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# nodes: {g.n}\n")
        for u, v in sorted(g.edges):
            fh.write(f"{u} {v}\n")


def induced_subgraph(g: Graph, nodes) -> Graph:
    """Subgraph over ``nodes``, relabeled by list position.

    Keeps exactly the edges of ``g`` with both endpoints in the list;
    feature rows are copied in list order.
    """
    nodes = [int(v) for v in nodes]
    if len(set(nodes)) != len(nodes):
        raise ValueError("node list contains duplicates")
    for v in nodes:
        if not (0 <= v < g.n):
            raise ValueError(f"node {v} out of range")
    position = {v: i for i, v in enumerate(nodes)}
    edges = [
        (position[u], position[v])
        for u, v in g.edges
        if u in position and v in position
    ]
    features = g.features[nodes] if g.features is not None else None
    return Graph(len(nodes), edges, features=features)


def disjoint_union(graphs) -> Graph:
    """Union of graphs on block-offset node indices; no cross-block edges."""
    graphs = list(graphs)
    if not graphs:
        raise ValueError("disjoint_union of an empty list")
    edges = []
    offset = 0
    feats = []
    all_have_features = all(g.features is not None for g in graphs)
    widths = {g.features.shape[1] for g in graphs if g.features is not None}
    keep_features = all_have_features and len(widths) == 1
    for g in graphs:
        edges.extend((u + offset, v + offset) for u, v in g.edges)
        if keep_features:
            feats.append(g.features)
        offset += g.n
    features = np.vstack(feats) if keep_features and feats else None
    return Graph(offset, edges, features=features)
