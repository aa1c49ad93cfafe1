"""Experiment harness: budgeted runs of the biased and uniform methods over
planted or file-backed instances, with CSV emission.

Budgets gate the start of sampling rounds, never interrupt one: a round in
progress completes even if it overruns, so reported query counts are the
true ledger. A run whose very first round overruns its budget is flagged
INSUFFICIENT on the returned row (recognizable in the CSV by
distinct_queries > budget).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .clustering import Clustering, FullGraph, cost, random_clustering
from .graph_io import read_graph_jsonl
from .optimize import (
    SEED_INIT,
    LoopConfig,
    ExperimentTrace,
    loop_seed,
    srra_loop,
    uniform_loop,
)
from .oracle import GraphOracle, generate_planted
from .sampling import SrraParams

__all__ = ["ExperimentConfig", "RunRow", "run_experiment", "write_rows_csv", "rows_to_csv_text"]

CSV_HEADER = ["method", "budget", "seed", "iterations", "final_cost", "distinct_queries"]


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: a method, an instance family, and a budget schedule.

    Every (budget, seed) cell is an independent run with a fresh oracle.
    In planted mode the run seed also seeds the instance, so seeds index
    i.i.d. replicates; in graph mode the instance is fixed by the file.
    """

    method: str
    budgets: tuple[int, ...]
    seeds: tuple[int, ...]
    k: int
    params: SrraParams
    t_max: int
    restarts: int = 3
    improvement_floor: float = 0.0
    use_brute_force: bool = False
    sizes: tuple[int, ...] | None = None
    p: float | None = None
    graph_path: str | None = None
    output: str | None = None

    def __post_init__(self):
        if self.method not in ("SRRA", "UNIFORM"):
            raise ValueError(f"method must be SRRA or UNIFORM, got {self.method!r}")
        if not self.budgets or any(b < 1 for b in self.budgets):
            raise ValueError("budgets must be a nonempty list of positive counts")
        if any(b2 <= b1 for b1, b2 in zip(self.budgets, self.budgets[1:])):
            raise ValueError("budgets must be strictly increasing")
        if not self.seeds:
            raise ValueError("at least one seed is required")
        has_instance = self.sizes is not None and self.p is not None
        if has_instance == (self.graph_path is not None):
            raise ValueError("configure exactly one of (sizes, p) or graph_path")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        instance = d.pop("instance", None) or {}
        seeds = d.pop("seeds", None)
        if seeds is None:
            seeds = [d.pop("seed", 0)]
        sizes = instance.get("sizes")
        params = SrraParams(
            epsilon=d.pop("epsilon", 0.5),
            c2=d.pop("c2", 1.0),
            q_override=d.pop("q_override", None),
        )
        k = d.pop("k", len(sizes) if sizes else None)
        if k is None:
            raise ValueError("k is required when no instance sizes are given")
        return cls(
            method=d.pop("method"),
            budgets=tuple(d.pop("budgets")),
            seeds=tuple(seeds),
            k=k,
            params=params,
            t_max=d.pop("t_max", 5),
            restarts=d.pop("restarts", 3),
            improvement_floor=d.pop("improvement_floor", 0.0),
            use_brute_force=d.pop("use_brute_force", False),
            sizes=tuple(sizes) if sizes else None,
            p=instance.get("p"),
            graph_path=d.pop("graph_path", None),
            output=d.pop("output", None),
        )

    @classmethod
    def from_json_file(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class RunRow:
    method: str
    budget: int
    seed: int
    iterations: int
    final_cost: int
    distinct_queries: int
    flag: str = ""  # "INSUFFICIENT" when round 1 alone overran the budget

    def csv_values(self) -> list[str]:
        return [self.method, str(self.budget), str(self.seed), str(self.iterations),
                str(self.final_cost), str(self.distinct_queries)]


def _instance_graph(config: ExperimentConfig, seed: int) -> FullGraph:
    if config.graph_path is not None:
        graph, _ = read_graph_jsonl(config.graph_path)
        return graph
    return generate_planted(list(config.sizes), config.p, seed).graph


def _single_run(config: ExperimentConfig, budget: int, seed: int) -> tuple[RunRow, ExperimentTrace, GraphOracle]:
    graph = _instance_graph(config, seed)
    oracle = GraphOracle(graph)
    initial = random_clustering(graph.n, config.k,
                                np.random.default_rng(loop_seed(seed, SEED_INIT)))
    loop_config = LoopConfig(
        k=config.k,
        params=config.params,
        t_max=config.t_max,
        restarts=config.restarts,
        improvement_floor=config.improvement_floor,
        seed=seed,
        use_brute_force=config.use_brute_force,
    )
    run = srra_loop if config.method == "SRRA" else uniform_loop
    trace = run(oracle, loop_config, initial, graph=graph, budget=budget)
    flag = ""
    if len(trace.rows) > 1 and trace.rows[1].distinct_queries > budget:
        flag = "INSUFFICIENT"
    row = RunRow(
        method=config.method,
        budget=budget,
        seed=seed,
        iterations=trace.iterations,
        final_cost=cost(trace.final_pivot, graph),
        distinct_queries=oracle.ledger.distinct_queries,
        flag=flag,
    )
    return row, trace, oracle


def run_experiment(config: ExperimentConfig, return_details: bool = False):
    """Run every (budget, seed) cell and return the rows, optionally with
    the full traces and oracles for auditing. Deterministic per config;
    writes the fixed-schema CSV when an output path is configured."""
    rows: list[RunRow] = []
    details: list[tuple[RunRow, ExperimentTrace, GraphOracle]] = []
    for budget in config.budgets:
        for seed in config.seeds:
            row, trace, oracle = _single_run(config, budget, seed)
            rows.append(row)
            if return_details:
                details.append((row, trace, oracle))
    if config.output:
        write_rows_csv(rows, config.output)
    return (rows, details) if return_details else rows


def rows_to_csv_text(rows: list[RunRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow(row.csv_values())
    return buf.getvalue()


def write_rows_csv(rows: list[RunRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv_text(rows))
