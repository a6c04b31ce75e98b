"""Self-supervised node embeddings: nearby nodes end up close.

Trains the embedding model on two disjoint cliques and shows that the
within-clique embedding distances are smaller than the between-clique ones,
which is exactly the property the subgraph assemblers rely on.
"""

import numpy as np

from lgsg import EmbedConfig, Graph, train_embeddings

k = 10
edges = []
for base in (0, k):
    edges += [(base + i, base + j) for i in range(k) for j in range(i + 1, k)]
g = Graph(2 * k, edges)
print(f"input: two disjoint {k}-cliques -> {g}")

losses = []
emb = train_embeddings(g, EmbedConfig(dim=8, epochs=10, pairs_per_node=4), seed=0,
                       loss_out=losses)
print(f"training loss {losses[0]:.3f} -> {np.mean(losses[-5:]):.3f} over {len(losses)} steps")

z = emb.z
intra = [np.linalg.norm(z[i] - z[j]) for base in (0, k)
         for i in range(base, base + k) for j in range(i + 1, base + k)]
inter = [np.linalg.norm(z[i] - z[k + j]) for i in range(k) for j in range(k)]
print(f"mean intra-clique distance {np.mean(intra):.3f}")
print(f"mean inter-clique distance {np.mean(inter):.3f}")
print("separated:", np.mean(intra) < np.mean(inter))
