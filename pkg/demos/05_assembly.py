"""The two subgraph assemblers on a worked micro-example.

Subgraph A has 1-d embeddings (0.0, 1.0, 2.0) on a path, subgraph B has
(0.05, 5.0, 6.0) on a path. Node aggregation greedily merges the closest
cross-subgraph embedding pairs until the target count; threshold matching
inserts subgraphs sequentially, mapping each node onto the closest earlier
node within distance delta.
"""

import numpy as np

from lgsg import AssemblyInput, node_aggregation, threshold_matching
from lgsg.diffusion import GeneratedSubgraph


def path3(values):
    adj = np.zeros((3, 3), dtype=np.uint8)
    adj[0, 1] = adj[1, 0] = adj[1, 2] = adj[2, 1] = 1
    return GeneratedSubgraph(np.array(values).reshape(3, 1), adj)


inp = AssemblyInput.from_samples([path3([0.0, 1.0, 2.0]), path3([0.05, 5.0, 6.0])])
print(f"input: {inp.total_nodes} nodes across 2 subgraphs, {len(inp.edges)} edges\n")

print("node aggregation:")
for target in (6, 5, 4):
    out = node_aggregation(inp, target)
    print(f"  target {target}: {out.graph.n} nodes, {out.graph.n_edges} edges, "
          f"members {out.members}")
print("  (the 0.0 and 0.05 nodes merge first; the next merge folds the 1.0 node in,")
print("   turning one edge into a dropped self-loop)\n")

print("threshold matching:")
for delta in (-1.0, 0.1, float("inf")):
    out = threshold_matching(inp, delta)
    print(f"  delta {delta}: {out.graph.n} nodes, {out.graph.n_edges} edges, "
          f"edges {sorted(out.graph.edges)}")
print("  (negative delta keeps everything separate; an infinite delta collapses")
print("   subgraph B onto A entirely, leaving a triangle)")
