"""Clusterings, the disagreement cost, and the pair-flip metric.

A clustering is a label vector; a graph records which pairs "must be
clustered" (edges) and which "must be separated" (non-edges). The cost of a
clustering counts split edges plus joined non-edges; the distance between
two clusterings counts the pairs they disagree on.
"""

import numpy as np

from activecc import (
    Clustering,
    FullGraph,
    clustering_distance,
    cost,
    random_clustering,
    same_cluster,
)

truth = Clustering.from_sets([{0, 1, 2}, {3, 4}], k=2)
graph = FullGraph.from_edges(5, [(0, 1), (0, 2), (1, 2), (3, 4)])

print("truth labels:", truth.labels.tolist())
print("elements 0,1 together?", same_cluster(truth, 0, 1))
print("cost(truth) =", cost(truth, graph), "(the graph is exactly its pair set)")

other = Clustering.from_sets([{0, 1}, {2, 3, 4}], k=2)
print("\nmove element 2 across:", other.labels.tolist())
print("cost(other) =", cost(other, graph))
print("distance(truth, other) =", clustering_distance(truth, other))
print("the cost can change by at most one per disagreeing pair:",
      abs(cost(truth, graph) - cost(other, graph)), "<=", clustering_distance(truth, other))

# label names never matter, only the partition
swapped = Clustering(1 - other.labels, k=2)
print("\nrelabeled copy has distance", clustering_distance(other, swapped), "to the original")

rng = np.random.default_rng(0)
a, b, c = (random_clustering(30, 4, rng) for _ in range(3))
print("\nmetric sanity on three random clusterings over n=30:")
print("  symmetry:", clustering_distance(a, b) == clustering_distance(b, a))
print("  triangle:", clustering_distance(a, c)
      <= clustering_distance(a, b) + clustering_distance(b, c))
