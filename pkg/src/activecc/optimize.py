"""Minimizing the estimated regret over the clustering space, and the
iterative reclustering loop built on top of it.

Each iteration draws fresh samples around the current pivot, minimizes the
resulting regret estimate (steepest single-element relabeling with restarts,
or exhaustive enumeration at desk scale), and adopts the minimizer as the
next pivot. With an estimator whose error scales with distance from the
pivot, the loop contracts geometrically toward a near-optimal clustering;
check_convergence_bound evaluates that bound on a recorded trace.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .clustering import Clustering, FullGraph, cost, sort_clusters
from .oracle import OracleUnavailable, PairOracle
from .sampling import (
    RegretEstimator,
    SamplePlan,
    SampleSet,
    SrraParams,
    attach_labels,
    sample_plan,
)

__all__ = [
    "LoopConfig",
    "TraceRow",
    "ExperimentTrace",
    "SearchSpaceTooLarge",
    "local_search_min",
    "brute_force_min",
    "canonical_assignments",
    "LoopRunner",
    "srra_loop",
    "uniform_loop",
    "uniform_regret_estimator",
    "convergence_bound",
    "check_convergence_bound",
    "loop_seed",
]

# spawn-key domains for deriving independent per-iteration streams
SEED_INIT = 0
SEED_DRAW = 1
SEED_SEARCH = 2
SEED_SHUFFLE = 3
SEED_UNIFORM = 4


def loop_seed(root: int, domain: int, t: int = 0) -> np.random.SeedSequence:
    return np.random.SeedSequence(root, spawn_key=(domain, t))


class SearchSpaceTooLarge(ValueError):
    """Raised when exhaustive enumeration is asked for more than the guard
    allows (k**n > 10**7)."""


@dataclass(frozen=True)
class LoopConfig:
    """Knobs for the iterative loop.

    restarts counts the random initializations of each local search on top
    of the two mandatory starts (the search's start point and the pivot);
    restarts=1 means no random starts. use_brute_force swaps the local
    search for exhaustive enumeration when the space fits the guard.
    """

    k: int
    params: SrraParams
    t_max: int
    restarts: int = 3
    improvement_floor: float = 0.0
    seed: int = 0
    use_brute_force: bool = False

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.improvement_floor < 0:
            raise ValueError("improvement_floor must be >= 0")


@dataclass(frozen=True)
class TraceRow:
    t: int
    pivot: Clustering
    cost: int | None
    fhat_min: float | None
    distinct_queries: int


@dataclass
class ExperimentTrace:
    """Per-iteration record of the loop: adopted pivot, true cost when the
    full graph is known, estimated-regret minimum, and the query ledger."""

    rows: list[TraceRow] = field(default_factory=list)
    truncated: bool = False
    stop_reason: str = ""

    @property
    def final_pivot(self) -> Clustering:
        return self.rows[-1].pivot

    @property
    def iterations(self) -> int:
        return self.rows[-1].t

    def to_csv_rows(self) -> list[list[str]]:
        out = [["t", "cost", "fhat_min", "distinct_queries"]]
        for r in self.rows:
            out.append([
                str(r.t),
                "" if r.cost is None else str(r.cost),
                "" if r.fhat_min is None else repr(r.fhat_min),
                str(r.distinct_queries),
            ])
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            csv.writer(fh).writerows(self.to_csv_rows())


def _descend(est: RegretEstimator, labels: np.ndarray, k: int) -> None:
    """Steepest single-element relabeling, in place, until no move helps.

    Maintains T[x, b] = signed slot weight incident to x whose other
    endpoint currently carries label b; relabeling x from a to b changes the
    estimate numerator by T[x, a] - T[x, b], so each applied move is a
    strict integer decrease and termination is guaranteed. Ties break by
    smallest element, then smallest label.
    """
    inc = est.incidence()
    n = labels.size
    T = np.zeros((n, k), dtype=np.int64)
    for x in range(n):
        others, ws = inc[x]
        if others.size:
            np.add.at(T[x], labels[others], ws)
    idx = np.arange(n)
    best = T.argmax(axis=1)
    gains = T[idx, best] - T[idx, labels]
    while True:
        x = int(gains.argmax())
        if gains[x] <= 0:
            return
        old, new = int(labels[x]), int(best[x])
        labels[x] = new
        others, ws = inc[x]
        np.subtract.at(T, (others, np.full_like(others, old)), ws)
        np.add.at(T, (others, np.full_like(others, new)), ws)
        touched = np.unique(np.append(others, x))
        best[touched] = T[touched].argmax(axis=1)
        gains[touched] = T[touched, best[touched]] - T[touched, labels[touched]]


def move_delta_numerator(est: RegretEstimator, labels: np.ndarray, x: int, new_label: int) -> int:
    """Numerator change of the estimate when element x moves to new_label,
    touching only the sampled slots incident to x. Agrees exactly with full
    re-evaluation; the local search maintains the same quantity
    incrementally."""
    others, ws = est.incidence()[x]
    old_label = labels[x]
    if others.size == 0 or new_label == old_label:
        return 0
    other_labels = labels[others]
    t_old = int(ws[other_labels == old_label].sum())
    t_new = int(ws[other_labels == new_label].sum())
    return t_old - t_new


def local_search_min(
    sample: SampleSet | RegretEstimator,
    start: Clustering,
    restarts: int,
    seed,
) -> Clustering:
    """Best local minimum of the estimated regret over single-element moves.

    Descends from the given start, from the pivot, and from restarts-1
    random label vectors; returns the lowest estimate found, breaking ties
    by lexicographically smallest canonical label vector. Since the pivot
    scores exactly zero, the result never scores above zero.
    """
    est = sample.estimator() if isinstance(sample, SampleSet) else sample
    pivot = est.pivot
    if start.n != pivot.n:
        raise ValueError("start size does not match the pivot")
    k = pivot.k
    if int(start.labels.max()) >= k:
        raise ValueError("start uses more clusters than the pivot allows")
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    starts = [start.labels.copy(), pivot.labels.copy()]
    starts += [rng.integers(0, k, size=pivot.n) for _ in range(restarts - 1)]
    best_key = None
    best_labels = None
    for labels in starts:
        labels = labels.astype(np.int64, copy=True)
        _descend(est, labels, k)
        c = Clustering(labels, k)
        key = (est.numerator(c), c.canonical())
        if best_key is None or key < best_key:
            best_key, best_labels = key, labels
    return Clustering(best_labels, k)


def canonical_assignments(n: int, k: int):
    """All distinct partitions of 0..n-1 into at most k clusters, as
    canonical label vectors in lexicographic order."""
    labels = [0] * n

    def rec(i: int, used: int):
        if i == n:
            yield tuple(labels)
            return
        for lab in range(min(used + 1, k)):
            labels[i] = lab
            yield from rec(i + 1, max(used, lab + 1))

    yield from rec(1, 1)


def brute_force_min(objective, n: int, k: int) -> Clustering:
    """Global minimizer of the objective over all assignments of n elements
    to at most k clusters.

    Guarded to k**n <= 10**7. objective is a callable on Clusterings;
    RegretEstimator objects take a vectorized fast path. Ties break by
    lexicographically smallest canonical label vector.
    """
    if k**n > 10**7:
        raise SearchSpaceTooLarge(f"k^n = {k**n} exceeds the enumeration guard")
    if isinstance(objective, RegretEstimator):
        best_num = None
        best_labels = None
        chunk: list[tuple[int, ...]] = []

        def flush():
            nonlocal best_num, best_labels
            if not chunk:
                return
            mat = np.asarray(chunk, dtype=np.int64)
            nums = objective.batch_numerators(mat)
            i = int(nums.argmin())
            if best_num is None or nums[i] < best_num:
                best_num = int(nums[i])
                best_labels = mat[i].copy()

        for assignment in canonical_assignments(n, k):
            chunk.append(assignment)
            if len(chunk) >= 65536:
                flush()
                chunk.clear()
        flush()
        return Clustering(best_labels, k)

    best_val = None
    best_labels = None
    for assignment in canonical_assignments(n, k):
        c = Clustering(np.asarray(assignment, dtype=np.int64), k)
        val = objective(c)
        if best_val is None or val < best_val:
            best_val, best_labels = val, c.labels
    return Clustering(best_labels, k)


def uniform_regret_estimator(oracle: PairOracle, pivot: Clustering, m: int, seed) -> RegretEstimator:
    """Baseline estimator from m pairs drawn uniformly with repetition over
    all n(n-1)/2 pairs, each reweighted by total/m. Unbiased.

    When m covers the whole pair set, degrades to a full census (each pair
    once, unit weight) and becomes exact.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    n = pivot.n
    iu, iv = np.triu_indices(n, 1)
    total = iu.size
    if m >= total:
        us, vs = iu, iv
        scale, denom = 1, 1
    else:
        idx = np.random.default_rng(seed).integers(0, total, size=m)
        us, vs = iu[idx], iv[idx]
        scale, denom = total, m
    ws = np.empty(us.size, dtype=np.int64)
    for s, (u, v) in enumerate(zip(us.tolist(), vs.tolist())):
        ws[s] = scale if oracle.query(u, v).is_edge else -scale
    return RegretEstimator(pivot, us.astype(np.int64), vs.astype(np.int64), ws, denominator=denom)


def _minimize(est: RegretEstimator, start: Clustering, config: LoopConfig, t: int) -> Clustering:
    if config.use_brute_force and config.k ** start.n <= 10**7:
        return brute_force_min(est, start.n, config.k)
    return local_search_min(est, start, config.restarts, loop_seed(config.seed, SEED_SEARCH, t))


class LoopRunner:
    """Stepwise form of the iterative loop.

    begin_iteration() runs the pre-sampling stop checks and exposes the
    upcoming round's sampling plan (so a batching front end can collect
    labels first); step() executes the round against the oracle. srra_loop
    and uniform_loop drive this to completion in one call.
    """

    def __init__(
        self,
        oracle: PairOracle,
        config: LoopConfig,
        initial: Clustering,
        estimator_kind: str = "srra",
        graph: FullGraph | None = None,
        budget: int | None = None,
    ):
        if initial.n != oracle.n:
            raise ValueError("initial clustering does not match the oracle's n")
        if estimator_kind not in ("srra", "uniform"):
            raise ValueError(f"unknown estimator kind {estimator_kind!r}")
        self.oracle = oracle
        self.config = config
        self.estimator_kind = estimator_kind
        self.graph = graph
        self.budget = budget
        self.pivot = initial
        self.t = 1
        self.done = False
        self.trace = ExperimentTrace(stop_reason="")
        self.trace.rows.append(
            TraceRow(0, initial, self._true_cost(initial), None, oracle.ledger.distinct_queries)
        )
        self._sorted_pivot: Clustering | None = None
        self._plan: SamplePlan | None = None

    def _true_cost(self, c: Clustering) -> int | None:
        return cost(c, self.graph) if self.graph is not None else None

    def _finish(self, reason: str) -> None:
        self.done = True
        self.trace.stop_reason = reason
        self._plan = None
        self._sorted_pivot = None

    def begin_iteration(self) -> SamplePlan | None:
        """Prepare iteration t: apply the t_max and budget gates, sort the
        pivot, and draw the sampling plan. Returns None once the loop is
        finished; idempotent until step() consumes the plan."""
        if self.done:
            return None
        if self._plan is not None:
            return self._plan
        if self.t > self.config.t_max:
            self._finish("t_max")
            return None
        if self.budget is not None and self.oracle.ledger.distinct_queries >= self.budget:
            self._finish("budget_exhausted")
            return None
        self._sorted_pivot = sort_clusters(self.pivot)
        self._plan = sample_plan(self._sorted_pivot, self.config.params,
                                 loop_seed(self.config.seed, SEED_DRAW, self.t))
        return self._plan

    def step(self) -> bool:
        """Execute one full iteration. Returns True while the loop can
        continue. On oracle failure the trace is truncated at the last
        complete iteration and flagged."""
        plan = self.begin_iteration()
        if plan is None:
            return False
        t, sorted_pivot = self.t, self._sorted_pivot
        try:
            if self.estimator_kind == "srra":
                est = attach_labels(plan, self.oracle).estimator()
            else:
                m = max(1, len(plan.distinct_pairs()))
                est = uniform_regret_estimator(self.oracle, sorted_pivot, m,
                                               loop_seed(self.config.seed, SEED_UNIFORM, t))
        except OracleUnavailable:
            self.trace.truncated = True
            self._finish("oracle_unavailable")
            return False
        candidate = _minimize(est, sorted_pivot, self.config, t)
        fhat = est.value(candidate)
        self.trace.rows.append(TraceRow(t, candidate, self._true_cost(candidate), fhat,
                                        self.oracle.ledger.distinct_queries))
        self.pivot = candidate
        self._plan = None
        self._sorted_pivot = None
        self.t = t + 1
        if candidate.same_partition(sorted_pivot):
            self._finish("fixed_point")
        elif -fhat < self.config.improvement_floor:
            self._finish("improvement_floor")
        return not self.done

    def run(self) -> ExperimentTrace:
        while self.step():
            pass
        if not self.trace.stop_reason:
            self.trace.stop_reason = "t_max"
        return self.trace


def srra_loop(
    oracle: PairOracle,
    config: LoopConfig,
    initial: Clustering,
    graph: FullGraph | None = None,
    budget: int | None = None,
) -> ExperimentTrace:
    """Iterate: sort the pivot, draw biased samples, minimize the estimate,
    adopt the minimizer. Stops at t_max, at a pivot fixed point, when the
    estimated improvement drops below the floor, or when the query budget
    gates the next round (the round in progress always completes).

    Samples are redrawn fresh for every pivot; the cache keeps repeated
    pairs free. On oracle failure the trace is truncated at the last
    complete iteration and flagged.
    """
    return LoopRunner(oracle, config, initial, "srra", graph, budget).run()


def uniform_loop(
    oracle: PairOracle,
    config: LoopConfig,
    initial: Clustering,
    graph: FullGraph | None = None,
    budget: int | None = None,
) -> ExperimentTrace:
    """Same loop with the uniform-sampling baseline estimator, its
    per-iteration pair budget matched to what the biased scheme would draw
    at the same pivot. Isolates the sampling distribution as the only
    difference between the two methods."""
    return LoopRunner(oracle, config, initial, "uniform", graph, budget).run()


def convergence_bound(t: int, opt: int, epsilon: float, d0: int) -> float:
    """Cost ceiling after t iterations: (1+8e)(1+(5e)^t)*opt + (5e)^t*d0."""
    decay = (5.0 * epsilon) ** t
    return (1.0 + 8.0 * epsilon) * (1.0 + decay) * opt + decay * d0


def check_convergence_bound(
    trace: ExperimentTrace,
    opt: int,
    epsilon_used: float,
    d0: int,
) -> list[bool]:
    """Evaluate the geometric convergence bound at every iteration t >= 1 of
    the trace, using the recorded true costs. Requires epsilon < 1/5 (the
    bound is vacuous beyond) and a trace recorded with the full graph."""
    if not 0.0 <= epsilon_used < 0.2:
        raise ValueError(f"epsilon must lie in [0, 0.2), got {epsilon_used}")
    out = []
    for row in trace.rows:
        if row.t == 0:
            continue
        if row.cost is None:
            raise ValueError("trace rows carry no true cost; rerun with the full graph")
        out.append(row.cost <= convergence_bound(row.t, opt, epsilon_used, d0))
    return out
