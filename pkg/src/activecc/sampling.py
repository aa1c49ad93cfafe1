"""Size-biased pair sampling around a pivotal clustering and the resulting
relative-regret estimator.

The regret of a candidate clustering relative to a pivot is the cost
difference between the two against the side-information graph. Sampling is
organized per pivot cluster, size-descending: every element u in cluster i
draws q companions (uniform, with repetition) from its own cluster and from
each smaller cluster j > i. Reweighting each draw by |C_j|/q makes the
estimator unbiased, and the scheme concentrates queries on pairs incident
to small clusters, where a fixed query budget buys the most resolution.

Whenever q reaches a cluster's size, sampling that cluster degrades to full
enumeration with unit weight ("exhaustive mode"); with every cluster
exhaustive the estimator is exact, which the test suites use as an oracle.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .clustering import (
    Clustering,
    FullGraph,
    clustering_distance,
    cost,
    pair_key,
    random_clustering,
    sort_clusters,
)
from .oracle import PairLabel, PairOracle

__all__ = [
    "SrraParams",
    "sample_size_q",
    "SampleGroup",
    "SamplePlan",
    "sample_plan",
    "SampleSet",
    "attach_labels",
    "draw_samples",
    "RegretEstimator",
    "exact_regret",
    "estimate_regret",
    "estimate_regret_exact",
    "Rectangle",
    "rectangle_decompose",
    "decomposition_distance",
    "decomposition_regret",
    "measure_smoothness",
]


@dataclass(frozen=True)
class SrraParams:
    """Error tolerance and sample-size knobs.

    q_override bypasses the theoretical sample-size formula, which is far
    too large at desk scale; epsilon still parameterizes smoothness checks.
    """

    epsilon: float
    c2: float = 1.0
    q_override: int | None = None

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        if self.c2 <= 0:
            raise ValueError(f"c2 must be positive, got {self.c2}")
        if self.q_override is not None and self.q_override < 1:
            raise ValueError(f"q_override must be >= 1, got {self.q_override}")


def sample_size_q(n: int, k: int, params: SrraParams) -> int:
    """Per-(element, cluster) sample size: ceil(c2 * k^2 * ln(n) / eps^4),
    or the explicit override when one is set."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if params.q_override is not None:
        return params.q_override
    return math.ceil(params.c2 * k * k * math.log(n) / params.epsilon**4)


@dataclass(frozen=True)
class SampleGroup:
    """Draws for one (element u, target cluster j) slot of the scheme.

    ids holds q draws with repetition from cluster j, or every member once
    when the group is exhaustive. i is u's own cluster; cluster indices
    refer to the size-descending pivot labeling, 0-based.
    """

    u: int
    i: int
    j: int
    ids: np.ndarray
    exhaustive: bool

    @property
    def intra(self) -> bool:
        return self.i == self.j


@dataclass(frozen=True)
class SamplePlan:
    """The purely structural part of one sampling round: which pairs get
    drawn, before any label is revealed. Deterministic given the seed."""

    pivot: Clustering
    q: int
    groups: tuple[SampleGroup, ...]

    def distinct_pairs(self) -> list[tuple[int, int]]:
        """Distinct non-self pairs touched by the plan, in draw order."""
        seen: dict[tuple[int, int], None] = {}
        for g in self.groups:
            for v in g.ids.tolist():
                if v != g.u:
                    seen.setdefault(pair_key(g.u, v), None)
        return list(seen)


def _require_sorted(pivot: Clustering) -> np.ndarray:
    sizes = pivot.sizes()
    if (np.diff(sizes) > 0).any():
        raise ValueError("pivot clusters must be labeled in size-descending order")
    return sizes


def sample_plan(pivot: Clustering, params: SrraParams, seed) -> SamplePlan:
    """Draw the sampling structure around a size-descending pivot.

    For each element u of cluster i and each nonempty cluster j >= i, draws
    q members of cluster j uniformly with repetition (self-draws allowed;
    they occupy a slot but never contribute). Groups where q >= |C_j| are
    replaced by one copy of each member with unit weight and consume no
    randomness.
    """
    _require_sorted(pivot)
    q = sample_size_q(max(pivot.n, 2), pivot.k, params)
    rng = np.random.default_rng(seed)
    members = [pivot.members(i) for i in range(pivot.k)]
    groups: list[SampleGroup] = []
    for i in range(pivot.k):
        for u in members[i].tolist():
            for j in range(i, pivot.k):
                cj = members[j]
                if cj.size == 0:
                    continue
                if q >= cj.size:
                    ids = cj.copy()
                    exhaustive = True
                else:
                    ids = cj[rng.integers(0, cj.size, size=q)]
                    exhaustive = False
                groups.append(SampleGroup(u=u, i=i, j=j, ids=ids, exhaustive=exhaustive))
    return SamplePlan(pivot=pivot, q=q, groups=tuple(groups))


class SampleSet:
    """One round of biased samples together with the labels they revealed.

    Immutable once built; estimation is a pure read, so one SampleSet can
    score many candidates (concurrently, if desired) without touching the
    oracle again.
    """

    def __init__(self, plan: SamplePlan, labels: dict[tuple[int, int], bool]):
        self.plan = plan
        self.labels = labels
        self._estimator: RegretEstimator | None = None

    @property
    def pivot(self) -> Clustering:
        return self.plan.pivot

    @property
    def q(self) -> int:
        return self.plan.q

    def estimator(self) -> "RegretEstimator":
        if self._estimator is None:
            self._estimator = RegretEstimator.from_sample_set(self)
        return self._estimator

    def with_labels(self, labels: dict[tuple[int, int], bool]) -> "SampleSet":
        """Same draws, different labels (test hook for support checks)."""
        return SampleSet(self.plan, labels)

    def to_json_dict(self) -> dict:
        sizes = self.pivot.sizes()
        return {
            "pivot": {"labels": self.pivot.labels.tolist(), "k": self.pivot.k},
            "q": self.q,
            "groups": [
                {
                    "u": g.u,
                    "i": g.i,
                    "j": g.j,
                    "ids": g.ids.tolist(),
                    "exhaustive": g.exhaustive,
                    "weight": 1.0 if g.exhaustive else int(sizes[g.j]) / self.q,
                }
                for g in self.plan.groups
            ],
            "labels": [
                {"u": u, "v": v, "label": PairLabel.from_bool(e).value}
                for (u, v), e in sorted(self.labels.items())
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())


def attach_labels(plan: SamplePlan, oracle: PairOracle) -> SampleSet:
    """Reveal every distinct pair the plan touches (once each) and bundle
    the labels with the plan. Oracle failure propagates and the partially
    built set is discarded; labels already revealed stay in the ledger."""
    labels: dict[tuple[int, int], bool] = {}
    for u, v in plan.distinct_pairs():
        labels[(u, v)] = oracle.query(u, v).is_edge
    return SampleSet(plan, labels)


def draw_samples(pivot: Clustering, oracle: PairOracle, params: SrraParams, seed) -> SampleSet:
    """Run one sampling round: draw the plan, then reveal every distinct
    drawn pair through the oracle (repeats are free)."""
    return attach_labels(sample_plan(pivot, params, seed), oracle)


class RegretEstimator:
    """Linear-form evaluator of a (sampled or exact) relative regret.

    Internally the estimate is CONST minus a weighted count of sampled pairs
    the candidate joins, all over one integer denominator, so estimates are
    exact rationals; value() exposes the float. Also serves the local search
    with per-element slot incidence for O(degree) move deltas.
    """

    def __init__(
        self,
        pivot: Clustering,
        pair_u: np.ndarray,
        pair_v: np.ndarray,
        weights: np.ndarray,
        denominator: int,
    ):
        self.pivot = pivot
        self.pair_u = pair_u
        self.pair_v = pair_v
        self.weights = weights  # signed integer numerators, one per slot
        self.denominator = denominator
        same_pivot = pivot.labels[pair_u] == pivot.labels[pair_v]
        self.const = int(weights[same_pivot].sum())
        self._incidence: list[tuple[np.ndarray, np.ndarray]] | None = None

    @classmethod
    def from_sample_set(cls, s: SampleSet) -> "RegretEstimator":
        pivot, q = s.pivot, s.q
        sizes = pivot.sizes()
        us, vs, ws = [], [], []
        for g in s.plan.groups:
            if g.intra:
                base = q if g.exhaustive else int(sizes[g.i])
            else:
                base = 2 * q if g.exhaustive else 2 * int(sizes[g.j])
            for v in g.ids.tolist():
                if v == g.u:
                    continue
                edge = s.labels[pair_key(g.u, v)]
                us.append(g.u)
                vs.append(v)
                ws.append(base if edge else -base)
        return cls(
            pivot,
            np.asarray(us, dtype=np.int64),
            np.asarray(vs, dtype=np.int64),
            np.asarray(ws, dtype=np.int64),
            denominator=2 * q,
        )

    @classmethod
    def census(cls, pivot: Clustering, graph: FullGraph) -> "RegretEstimator":
        """Exact regret as a linear form: every pair once, unit weight."""
        iu, iv = np.triu_indices(pivot.n, 1)
        edge = graph.adjacency[iu, iv]
        return cls(pivot, iu.astype(np.int64), iv.astype(np.int64),
                   np.where(edge, 1, -1).astype(np.int64), denominator=1)

    @property
    def n_slots(self) -> int:
        return int(self.pair_u.size)

    def numerator(self, candidate: Clustering) -> int:
        if candidate.n != self.pivot.n:
            raise ValueError("candidate size does not match the pivot")
        same = candidate.labels[self.pair_u] == candidate.labels[self.pair_v]
        return self.const - int(self.weights[same].sum())

    def value(self, candidate: Clustering) -> float:
        return self.numerator(candidate) / self.denominator

    def value_fraction(self, candidate: Clustering) -> Fraction:
        return Fraction(self.numerator(candidate), self.denominator)

    def batch_numerators(self, labels_matrix: np.ndarray) -> np.ndarray:
        """Estimate numerators for many candidates at once; rows are label
        vectors. Ordering by numerator equals ordering by value."""
        same = labels_matrix[:, self.pair_u] == labels_matrix[:, self.pair_v]
        return self.const - same @ self.weights

    def incidence(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-element view: for each x, (other endpoints, slot weights) of
        every slot incident to x. Built once, cached."""
        if self._incidence is None:
            n = self.pivot.n
            out: list[tuple[list[int], list[int]]] = [([], []) for _ in range(n)]
            for u, v, w in zip(self.pair_u.tolist(), self.pair_v.tolist(), self.weights.tolist()):
                out[u][0].append(v)
                out[u][1].append(w)
                out[v][0].append(u)
                out[v][1].append(w)
            self._incidence = [
                (np.asarray(others, dtype=np.int64), np.asarray(ws, dtype=np.int64))
                for others, ws in out
            ]
        return self._incidence


def exact_regret(pivot: Clustering, candidate: Clustering, g: FullGraph) -> int:
    """Cost of the candidate minus cost of the pivot; zero at the pivot and
    bounded in magnitude by the clustering distance."""
    if pivot.n != candidate.n:
        raise ValueError("pivot and candidate sizes differ")
    return cost(candidate, g) - cost(pivot, g)


def estimate_regret(s: SampleSet, candidate: Clustering) -> float:
    """Sampled regret estimate of the candidate relative to s's pivot.

    Unbiased over the sample draws; exactly zero at the pivot; exactly the
    true regret when every group of s is exhaustive.
    """
    return s.estimator().value(candidate)


def estimate_regret_exact(s: SampleSet, candidate: Clustering) -> Fraction:
    """estimate_regret as an exact rational (for equality-grade tests)."""
    return s.estimator().value_fraction(candidate)


@dataclass(frozen=True)
class Rectangle:
    """One block of the disagreement set between pivot and candidate.

    intra: rows live in pivot cluster i and candidate cluster j, columns are
    the rest of pivot cluster i (pairs the candidate splits). Each such pair
    shows up in two intra rectangles, hence the half weight on intra sums.
    cross: rows and columns are pivot clusters i1 < i2 restricted to
    candidate cluster j (pairs the candidate joins).
    """

    kind: str  # "intra" | "cross"
    i: int
    i2: int | None
    j: int
    rows: np.ndarray
    cols: np.ndarray

    @property
    def area(self) -> int:
        return int(self.rows.size) * int(self.cols.size)

    def edge_count(self, g: FullGraph) -> int:
        return int(g.adjacency[np.ix_(self.rows, self.cols)].sum())

    def regret_sum(self, g: FullGraph) -> int:
        """Sum of per-pair regret over the block: +1 per split edge / joined
        non-edge, -1 for the opposite, depending on block kind."""
        e = self.edge_count(g)
        if self.kind == "intra":
            return 2 * e - self.area  # candidate splits these pairs
        return self.area - 2 * e  # candidate joins these pairs


def rectangle_decompose(pivot: Clustering, candidate: Clustering) -> list[Rectangle]:
    """Partition the disagreeing pairs into intra/cross rectangles.

    Intra areas (halved) plus cross areas reproduce the clustering distance;
    the analogous weighted regret sums reproduce the exact regret.
    """
    if pivot.n != candidate.n:
        raise ValueError("pivot and candidate sizes differ")
    rects: list[Rectangle] = []
    cells: dict[tuple[int, int], np.ndarray] = {}
    for i in range(pivot.k):
        ci = pivot.members(i)
        if ci.size == 0:
            continue
        cand_labels = candidate.labels[ci]
        for j in np.unique(cand_labels).tolist():
            cij = ci[cand_labels == j]
            cells[(i, j)] = cij
            rest = ci[cand_labels != j]
            if cij.size and rest.size:
                rects.append(Rectangle("intra", i=i, i2=None, j=j, rows=cij, cols=rest))
    for j in range(candidate.k):
        pivot_is = sorted(i for (i, jj) in cells if jj == j)
        for a in range(len(pivot_is)):
            for b in range(a + 1, len(pivot_is)):
                i1, i2 = pivot_is[a], pivot_is[b]
                rects.append(Rectangle("cross", i=i1, i2=i2, j=j,
                                       rows=cells[(i1, j)], cols=cells[(i2, j)]))
    return rects


def decomposition_distance(rects: list[Rectangle]) -> int:
    intra = sum(r.area for r in rects if r.kind == "intra")
    cross = sum(r.area for r in rects if r.kind == "cross")
    assert intra % 2 == 0  # every split pair sits in exactly two intra blocks
    return intra // 2 + cross


def decomposition_regret(rects: list[Rectangle], g: FullGraph) -> int:
    intra = sum(r.regret_sum(g) for r in rects if r.kind == "intra")
    cross = sum(r.regret_sum(g) for r in rects if r.kind == "cross")
    assert intra % 2 == 0
    return intra // 2 + cross


def measure_smoothness(
    pivot: Clustering,
    oracle: PairOracle,
    g: FullGraph,
    params: SrraParams,
    trials: int,
    seed,
) -> float:
    """Empirical smoothness of one sampling round: the largest ratio of
    estimator error to clustering distance over random candidates.

    Test-only: needs the full graph for the exact regret. Zero when every
    group is exhaustive.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    draw_seed, cand_seed = root.spawn(2)
    sorted_pivot = sort_clusters(pivot)
    sample = draw_samples(sorted_pivot, oracle, params, draw_seed)
    est = sample.estimator()
    rng = np.random.default_rng(cand_seed)
    worst = 0.0
    for _ in range(trials):
        while True:
            cand = random_clustering(sorted_pivot.n, sorted_pivot.k, rng)
            d = clustering_distance(sorted_pivot, cand)
            if d > 0:
                break
        err = abs(est.value(cand) - exact_regret(sorted_pivot, cand, g))
        worst = max(worst, err / d)
    return worst
