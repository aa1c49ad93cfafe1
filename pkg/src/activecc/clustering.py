"""Clusterings, pairwise agreement, and disagreement counting.

A clustering of n elements into at most k labeled clusters is stored as a
dense label vector. Two clusterings over the same elements are only ever
compared through their pair relations (same cluster / different cluster),
never through raw label values, so cluster labels are free to permute.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "Clustering",
    "FullGraph",
    "pair_key",
    "all_pairs",
    "same_cluster",
    "pair_cost",
    "cost",
    "clustering_distance",
    "sort_clusters",
    "random_clustering",
]


def pair_key(u: int, v: int) -> tuple[int, int]:
    """Canonical unordered key (min, max) for a pair of distinct elements."""
    if u == v:
        raise ValueError(f"pair ({u},{u}) is a self-pair")
    return (u, v) if u < v else (v, u)


def all_pairs(n: int) -> Iterable[tuple[int, int]]:
    """All n(n-1)/2 canonical pairs in lexicographic order."""
    for u in range(n):
        for v in range(u + 1, n):
            yield (u, v)


@dataclass(frozen=True)
class Clustering:
    """Assignment of elements 0..n-1 to cluster labels 0..k-1.

    Clusters may be empty; k is the cluster budget, not the number of
    nonempty clusters. Instances are immutable and safe to share across
    threads.
    """

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.array(self.labels, dtype=np.int64)  # copy: never alias caller state
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if labels.ndim != 1 or labels.size == 0:
            raise ValueError("labels must be a nonempty 1-d sequence")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValueError(f"labels must lie in [0, {self.k})")

    @property
    def n(self) -> int:
        return int(self.labels.size)

    @classmethod
    def from_labels(cls, labels: Sequence[int], k: int) -> "Clustering":
        return cls(np.asarray(labels, dtype=np.int64), k)

    @classmethod
    def from_sets(cls, sets: Sequence[Iterable[int]], k: int | None = None) -> "Clustering":
        """Build from disjoint member sets; set index becomes the label."""
        members = [sorted(s) for s in sets]
        n = sum(len(m) for m in members)
        labels = np.full(n, -1, dtype=np.int64)
        for label, ids in enumerate(members):
            for u in ids:
                if not 0 <= u < n:
                    raise ValueError(f"element {u} out of range for n={n}")
                if labels[u] != -1:
                    raise ValueError(f"element {u} appears in two clusters")
                labels[u] = label
        if (labels == -1).any():
            raise ValueError("sets do not cover 0..n-1")
        return cls(labels, k if k is not None else max(1, len(members)))

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)

    def sizes(self) -> np.ndarray:
        """Cluster sizes indexed by label (length k, zeros for empty clusters)."""
        return np.bincount(self.labels, minlength=self.k)

    def canonical(self) -> tuple[int, ...]:
        """Label vector relabeled by first appearance; permutation-invariant."""
        remap: dict[int, int] = {}
        out = []
        for lab in self.labels.tolist():
            if lab not in remap:
                remap[lab] = len(remap)
            out.append(remap[lab])
        return tuple(out)

    def same_partition(self, other: "Clustering") -> bool:
        return self.n == other.n and self.canonical() == other.canonical()

    def co_membership(self) -> np.ndarray:
        """Boolean n x n matrix of the same-cluster relation."""
        return self.labels[:, None] == self.labels[None, :]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clustering):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.labels, other.labels)

    def __hash__(self) -> int:
        return hash((self.k, self.labels.tobytes()))

    def __repr__(self) -> str:
        return f"Clustering(labels={self.labels.tolist()}, k={self.k})"


@dataclass(frozen=True)
class FullGraph:
    """Complete pairwise side information: edge = 'must be clustered together'.

    Stored as a symmetric boolean adjacency matrix; absence of an edge is the
    'must be separated' label, not missing data.
    """

    n: int
    adjacency: np.ndarray = field(repr=False)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (self.n, self.n):
            raise ValueError(f"adjacency must be {self.n}x{self.n}")
        if not np.array_equal(adj, adj.T) or adj.diagonal().any():
            raise ValueError("adjacency must be symmetric with an empty diagonal")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "FullGraph":
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            u, v = pair_key(u, v)
            if v >= n:
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            adj[u, v] = adj[v, u] = True
        return cls(n, adj)

    def has_edge(self, u: int, v: int) -> bool:
        u, v = pair_key(u, v)
        self._check_range(u, v)
        return bool(self.adjacency[u, v])

    def edges(self) -> list[tuple[int, int]]:
        us, vs = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(us.tolist(), vs.tolist()))

    def edge_count(self) -> int:
        return int(np.triu(self.adjacency, 1).sum())

    def _check_range(self, u: int, v: int) -> None:
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"pair ({u},{v}) out of range for n={self.n}")


def _check_same_n(a: Clustering, b: Clustering) -> None:
    if a.n != b.n:
        raise ValueError(f"clusterings disagree on n: {a.n} vs {b.n}")


def same_cluster(c: Clustering, u: int, v: int) -> bool:
    """True iff u and v carry the same label. Reflexive and symmetric."""
    if not (0 <= u < c.n and 0 <= v < c.n):
        raise ValueError(f"element out of range: ({u},{v}) with n={c.n}")
    return bool(c.labels[u] == c.labels[v])


def pair_cost(c: Clustering, g: FullGraph, u: int, v: int) -> int:
    """Disagreement of c with g on one pair: 1 iff an edge is split or a
    non-edge is joined."""
    if u == v:
        raise ValueError("pair cost is undefined for self-pairs")
    if c.n != g.n:
        raise ValueError(f"clustering n={c.n} does not match graph n={g.n}")
    return int(g.has_edge(u, v) != same_cluster(c, u, v))


def cost(c: Clustering, g: FullGraph) -> int:
    """Total disagreement of c with g over all unordered pairs.

    Ranges over [0, n(n-1)/2]; 0 means g is exactly the within-cluster
    pair set of c.
    """
    if c.n != g.n:
        raise ValueError(f"clustering n={c.n} does not match graph n={g.n}")
    disagree = g.adjacency != c.co_membership()
    return int(np.triu(disagree, 1).sum())


def clustering_distance(a: Clustering, b: Clustering) -> int:
    """Number of unordered pairs on which a and b disagree (joined by exactly
    one of the two). A metric on clusterings up to label permutation."""
    _check_same_n(a, b)
    flip = a.co_membership() != b.co_membership()
    return int(np.triu(flip, 1).sum())


def sort_clusters(c: Clustering) -> Clustering:
    """Relabel clusters in size-descending order.

    Ties break by lowest original label. Empty clusters sort last; the
    element-to-set partition is unchanged.
    """
    sizes = c.sizes()
    order = sorted(range(c.k), key=lambda lab: (-int(sizes[lab]), lab))
    remap = np.empty(c.k, dtype=np.int64)
    for rank, lab in enumerate(order):
        remap[lab] = rank
    return Clustering(remap[c.labels], c.k)


def random_clustering(n: int, k: int, rng: np.random.Generator) -> Clustering:
    """Uniform random label vector over [0, k)^n."""
    return Clustering(rng.integers(0, k, size=n), k)
