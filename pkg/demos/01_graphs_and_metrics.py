"""Graphs, file round-trips, and the five benchmark statistics.

Builds a few toy graphs, shows the metric values you can verify by hand,
and round-trips a graph through the edge-list format.
"""

import tempfile
from pathlib import Path

from lgsg import (
    Graph,
    assortativity,
    average_degree,
    avg_clustering,
    compute_report,
    edge_distribution_entropy,
    gini,
    load_edge_list,
    relative_distance,
    save_edge_list,
)

star = Graph(4, [(0, 1), (0, 2), (0, 3)])
triangle = Graph(3, [(0, 1), (1, 2), (0, 2)])
ring = Graph(6, [(i, (i + 1) % 6) for i in range(6)])

print("star on 4 nodes:")
print(f"  average degree  {average_degree(star):.4f}")
print(f"  entropy (EDE)   {edge_distribution_entropy(star):.4f}  # hubs pull this below 1")
print(f"  gini            {gini(star):.4f}")
print(f"  clustering      {avg_clustering(star):.4f}  # no triangles")
print(f"  assortativity   {assortativity(star):.4f}  # hub-and-spoke = -1")

print("\nring on 6 nodes (regular):")
print(f"  entropy (EDE)   {edge_distribution_entropy(ring):.4f}  # exactly 1")
print(f"  gini            {gini(ring):.4f}          # exactly 0")
print(f"  assortativity   {assortativity(ring)}          # undefined, not 0")

print("\ntriangle full report:", compute_report(triangle).to_json())

rel = relative_distance(compute_report(triangle), compute_report(ring))
print("relative distances triangle -> ring:", {k: round(v, 3) if v is not None else None
                                               for k, v in rel.items()})

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "ring.edges"
    save_edge_list(ring, path)
    print("\nedge-list file:")
    print(path.read_text())
    again = load_edge_list(path)
    print("round-trip equal:", again.edges == ring.edges and again.n == ring.n)
