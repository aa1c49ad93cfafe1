"""Pair-label oracles with query accounting, and planted instance generation.

The side-information graph exists only implicitly: each pair label is
uncovered on demand at unit query cost. Answers are cached, so only distinct
pairs are ever charged; the ledger is the experiment's cost meter.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass, field

import numpy as np

from .clustering import Clustering, FullGraph, pair_key

__all__ = [
    "PairLabel",
    "QueryLedger",
    "OracleUnavailable",
    "PairOracle",
    "GraphOracle",
    "DictOracle",
    "PlantedInstance",
    "generate_planted",
]


class PairLabel(enum.Enum):
    EDGE = "edge"
    NONEDGE = "nonedge"

    @property
    def is_edge(self) -> bool:
        return self is PairLabel.EDGE

    @classmethod
    def from_bool(cls, is_edge: bool) -> "PairLabel":
        return cls.EDGE if is_edge else cls.NONEDGE


class OracleUnavailable(RuntimeError):
    """The backing label source cannot answer right now (e.g. a human
    session with the pair still pending). The ledger is left unchanged."""


class QueryLedger:
    """Cache of revealed pair labels plus the distinct-query counter.

    distinct_queries always equals the number of revealed pairs and is
    nondecreasing; repeat queries are free.
    """

    def __init__(self):
        self._revealed: dict[tuple[int, int], PairLabel] = {}
        self._lock = threading.Lock()

    @property
    def distinct_queries(self) -> int:
        return len(self._revealed)

    @property
    def revealed(self) -> dict[tuple[int, int], PairLabel]:
        """Snapshot copy of the revealed mapping."""
        with self._lock:
            return dict(self._revealed)

    def lookup(self, key: tuple[int, int]) -> PairLabel | None:
        return self._revealed.get(key)

    def record(self, key: tuple[int, int], label: PairLabel) -> PairLabel:
        """Insert-if-absent; the first recorded label wins under races."""
        with self._lock:
            return self._revealed.setdefault(key, label)


class PairOracle:
    """Base class: lazily uncover pair labels against a backing source.

    query() serializes logically: under concurrent calls each distinct pair
    is charged exactly once and every caller sees the same fixed label.
    """

    def __init__(self, n: int):
        self.n = n
        self.ledger = QueryLedger()

    def query(self, u: int, v: int) -> PairLabel:
        if u == v:
            raise ValueError("cannot query a self-pair")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"pair ({u},{v}) out of range for n={self.n}")
        key = pair_key(u, v)
        cached = self.ledger.lookup(key)
        if cached is not None:
            return cached
        label = self._resolve(key)  # may raise OracleUnavailable; ledger untouched
        return self.ledger.record(key, label)

    def _resolve(self, key: tuple[int, int]) -> PairLabel:
        raise NotImplementedError


class GraphOracle(PairOracle):
    """Oracle backed by a fully known graph (simulation mode)."""

    def __init__(self, graph: FullGraph):
        super().__init__(graph.n)
        self.graph = graph

    def _resolve(self, key: tuple[int, int]) -> PairLabel:
        return PairLabel.from_bool(self.graph.has_edge(*key))


class DictOracle(PairOracle):
    """Oracle backed by an explicit label mapping (human-session mode).

    Pairs absent from the mapping raise OracleUnavailable; more answers can
    be supplied over time via provide().
    """

    def __init__(self, n: int, labels: dict[tuple[int, int], PairLabel] | None = None):
        super().__init__(n)
        self._labels = dict(labels or {})

    def provide(self, u: int, v: int, label: PairLabel) -> None:
        self._labels[pair_key(u, v)] = label

    def knows(self, u: int, v: int) -> bool:
        return pair_key(u, v) in self._labels

    def _resolve(self, key: tuple[int, int]) -> PairLabel:
        if key not in self._labels:
            raise OracleUnavailable(f"no answer yet for pair {key}")
        return self._labels[key]


@dataclass(frozen=True)
class PlantedInstance:
    """A hidden true clustering plus a noisy realization of its pair labels.

    Each pair label agrees with the truth independently with probability
    1 - p; everything is deterministic given the seed.
    """

    truth: Clustering
    p: float
    seed: int
    graph: FullGraph = field(repr=False)

    @property
    def n(self) -> int:
        return self.truth.n

    @property
    def k(self) -> int:
        return self.truth.k

    def oracle(self) -> GraphOracle:
        return GraphOracle(self.graph)


def generate_planted(sizes: list[int] | tuple[int, ...], p: float, seed: int) -> PlantedInstance:
    """Plant a clustering with the given cluster sizes and flip each pair
    label independently with probability p.

    Elements are assigned to clusters in consecutive blocks: the first
    sizes[0] ids form cluster 0, and so on. Expected cost of the truth
    against the realized graph is p * n(n-1)/2.
    """
    sizes = list(sizes)
    if not sizes or any(s < 0 for s in sizes):
        raise ValueError("sizes must be a nonempty list of nonnegative counts")
    if not 0.0 <= p < 0.5:
        raise ValueError(f"flip probability must lie in [0, 0.5), got {p}")
    n = sum(sizes)
    if n < 1:
        raise ValueError("instance must contain at least one element")
    labels = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    truth = Clustering(labels, k=len(sizes))

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    iu, iv = np.triu_indices(n, 1)
    flips = rng.random(iu.size) < p
    together = labels[iu] == labels[iv]
    edge = together != flips
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[edge], iv[edge]] = True
    adj |= adj.T
    return PlantedInstance(truth=truth, p=p, seed=seed, graph=FullGraph(n, adj))
