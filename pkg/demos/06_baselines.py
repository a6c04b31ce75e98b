"""Fitted classical generators and how their statistics compare.

Fits each baseline to a community-structured input and prints the five
statistics side by side. The random-graph baseline matches density but has
no community structure to show in its clustering coefficient.
"""

import numpy as np

from lgsg import (
    KronFitConfig,
    barabasi_albert,
    compute_report,
    erdos_renyi,
    kronecker_generate,
    kronfit,
)
from lgsg.baselines import fit_attachment, fit_edge_probability
from lgsg.seeding import rng_for
from lgsg import Graph

# community-structured input
rng = rng_for("demo6")
n = 120
edges = set()
for u in range(n):
    for v in range(u + 1, n):
        same = (u * 3 // n) == (v * 3 // n)
        if rng.random() < (0.25 if same else 0.02):
            edges.add((u, v))
g = Graph(n, edges)

orig = compute_report(g)
print(f"input {g}: p_fit={fit_edge_probability(g):.4f} m_a={fit_attachment(g)}")

er = erdos_renyi(g, n, rng_for("er"))
ba = barabasi_albert(g, n, rng_for("ba"))
init = kronfit(g, KronFitConfig(iterations=25, swaps_per_iteration=15), rng_for("kf"))
print(f"kronfit initiator (k={init.k}):\n{np.round(init.theta, 3)}")
kron = kronecker_generate(init, rng_for("kr"), n_out=n)

print(f"\n{'':12s}{'deg':>8s}{'ede':>8s}{'gini':>8s}{'clust':>8s}{'assort':>8s}")
for name, graph in [("input", g), ("er", er), ("ba", ba), ("kronecker", kron)]:
    r = compute_report(graph)
    assort = f"{r.assortativity:8.3f}" if r.assortativity is not None else "    none"
    print(f"{name:12s}{r.avg_degree:8.2f}{r.ede:8.3f}{r.gini:8.3f}"
          f"{r.clustering:8.3f}{assort}")
print("\nnote how the random baseline's clustering collapses to the density")
print("while the input keeps dense communities; that gap is what the")
print("pipeline methods close.")
