"""Size-independent graph statistics and relative-distance comparison.

The five statistics are average degree, edge distribution entropy (EDE),
the Gini coefficient of the degree distribution, average local clustering,
and degree assortativity. All are pure functions of an immutable graph.

Conventions for degenerate inputs: entropy and Gini require at least one
edge; assortativity returns None (an explicit undefined marker, never a
silent 0) when the endpoint-degree variance vanishes, as it does for
regular graphs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

METRIC_NAMES = ("avg_degree", "ede", "gini", "clustering", "assortativity")


@dataclass
class MetricsReport:
    avg_degree: float
    ede: float
    gini: float
    clustering: float
    assortativity: float | None
    n_nodes: int
    n_edges: int

    def to_dict(self) -> dict:
        return {
            "avg_degree": self.avg_degree,
            "ede": self.ede,
            "gini": self.gini,
            "clustering": self.clustering,
            "assortativity": self.assortativity,
            "n_nodes": self.n_nodes,
            "n_edges": self.n_edges,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d) -> "MetricsReport":
        return cls(
            avg_degree=d["avg_degree"],
            ede=d["ede"],
            gini=d["gini"],
            clustering=d["clustering"],
            assortativity=d["assortativity"],
            n_nodes=d["n_nodes"],
            n_edges=d["n_edges"],
        )


def average_degree(g: Graph) -> float:
    """2|E|/n."""
    if g.n < 1:
        raise ValueError("average degree of an empty graph")
    return 2.0 * g.n_edges / g.n


def edge_distribution_entropy(g: Graph) -> float:
    """Shannon entropy of the degree distribution, normalized by ln n.

    With p_v = deg(v)/(2|E|), EDE = -(1/ln n) * sum_v p_v ln p_v over the
    positive-degree nodes, so any regular graph with all degrees equal and
    positive scores exactly 1.
    """
    if g.n_edges == 0:
        raise ValueError("degree entropy is undefined on an edgeless graph")
    if g.n < 2:
        raise ValueError("degree entropy requires at least two nodes")
    deg = g.degrees().astype(np.float64)
    p = deg[deg > 0] / (2.0 * g.n_edges)
    return float(-(p * np.log(p)).sum() / math.log(g.n))


def gini(g: Graph) -> float:
    """Gini coefficient of the degree sequence.

    Mean absolute pairwise degree difference over twice the mean degree:
    sum_u sum_v |deg(u)-deg(v)| / (2 n^2 dbar). 0 for regular graphs.
    """
    if g.n < 1:
        raise ValueError("gini of an empty graph")
    if g.n_edges == 0:
        raise ValueError("gini is undefined when the mean degree is zero")
    deg = np.sort(g.degrees().astype(np.float64))
    n = g.n
    dbar = deg.mean()
    # For sorted d: sum_{u,v} |d_u - d_v| = 2 * sum_i (2i - n + 1) d_i.
    idx = np.arange(n, dtype=np.float64)
    pair_sum = 2.0 * float(((2.0 * idx - n + 1.0) * deg).sum())
    return float(pair_sum / (2.0 * n * n * dbar))


def _triangles_per_node(g: Graph) -> np.ndarray:
    tri = np.zeros(g.n, dtype=np.int64)
    for u, v in g.edges:
        common = np.intersect1d(g.neighbors(u), g.neighbors(v), assume_unique=True)
        for w in common:
            tri[w] += 1
    return tri


def avg_clustering(g: Graph) -> float:
    """Mean local clustering coefficient, with C(v)=0 when deg(v) < 2."""
    if g.n < 1:
        raise ValueError("clustering of an empty graph")
    deg = g.degrees().astype(np.float64)
    tri = _triangles_per_node(g).astype(np.float64)
    denom = deg * (deg - 1.0)
    c = np.zeros(g.n, dtype=np.float64)
    ok = denom > 0
    c[ok] = 2.0 * tri[ok] / denom[ok]
    return float(c.mean())


def assortativity(g: Graph) -> float | None:
    """Pearson correlation of degrees across edge endpoints.

    Each undirected edge contributes both orientations. Returns None when
    the endpoint-degree variance is zero (e.g. regular graphs).
    """
    if g.n_edges == 0:
        raise ValueError("assortativity is undefined on an edgeless graph")
    deg = g.degrees().astype(np.float64)
    ea = g.edge_array()
    du, dv = deg[ea[:, 0]], deg[ea[:, 1]]
    x = np.concatenate([du, dv])
    y = np.concatenate([dv, du])
    mx = x.mean()
    vx = ((x - mx) ** 2).mean()
    if vx <= 0.0:
        return None
    cov = ((x - mx) * (y - mx)).mean()
    return float(cov / vx)


def compute_report(g: Graph) -> MetricsReport:
    return MetricsReport(
        avg_degree=average_degree(g),
        ede=edge_distribution_entropy(g),
        gini=gini(g),
        clustering=avg_clustering(g),
        assortativity=assortativity(g),
        n_nodes=g.n,
        n_edges=g.n_edges,
    )


def relative_distance(original: MetricsReport, generated: MetricsReport) -> dict:
    """Per-metric |gen - orig| / |orig|.

    Assortativity divides by max(|orig|, 0.01) so near-zero originals do
    not blow up; an undefined value on either side propagates None. For
    the ratio metrics a zero original also yields None.
    """
    out = {}
    for name in ("avg_degree", "ede", "gini", "clustering"):
        o = getattr(original, name)
        v = getattr(generated, name)
        out[name] = abs(v - o) / abs(o) if o != 0 else None
    o, v = original.assortativity, generated.assortativity
    if o is None or v is None:
        out["assortativity"] = None
    else:
        out["assortativity"] = abs(v - o) / max(abs(o), 0.01)
    return out
