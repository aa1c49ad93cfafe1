"""On-disk formats: JSON Lines graphs, clustering JSON, planted sidecars.

A graph file starts with a header record {"n": ..., "k": ...} followed by
one {"u": ..., "v": ...} record per edge. Clusterings serialize as
{"labels": [...]}; planted instances add a sidecar with the hidden truth.
"""

from __future__ import annotations

import json

from .clustering import Clustering, FullGraph
from .oracle import PlantedInstance

__all__ = [
    "write_graph_jsonl",
    "read_graph_jsonl",
    "clustering_to_dict",
    "clustering_from_dict",
    "write_planted",
    "read_sidecar",
]


def write_graph_jsonl(graph: FullGraph, k: int, path) -> None:
    with open(path, "w") as fh:
        fh.write(json.dumps({"n": graph.n, "k": k}) + "\n")
        for u, v in graph.edges():
            fh.write(json.dumps({"u": u, "v": v}) + "\n")


def read_graph_jsonl(path) -> tuple[FullGraph, int]:
    """Returns the graph and the k recorded in the header."""
    with open(path) as fh:
        lines = [line for line in fh if line.strip()]
    if not lines:
        raise ValueError(f"{path}: empty graph file")
    header = json.loads(lines[0])
    if "n" not in header or "k" not in header:
        raise ValueError(f"{path}: first record must be a header with n and k")
    edges = []
    for line in lines[1:]:
        rec = json.loads(line)
        edges.append((rec["u"], rec["v"]))
    return FullGraph.from_edges(header["n"], edges), int(header["k"])


def clustering_to_dict(c: Clustering) -> dict:
    return {"labels": c.labels.tolist()}


def clustering_from_dict(d: dict, k: int) -> Clustering:
    return Clustering.from_labels(d["labels"], k)


def write_planted(instance: PlantedInstance, graph_path, sidecar_path=None) -> None:
    """Write the realized graph as JSONL, optionally with a truth sidecar."""
    write_graph_jsonl(instance.graph, instance.k, graph_path)
    if sidecar_path is not None:
        with open(sidecar_path, "w") as fh:
            json.dump(
                {
                    "truth": instance.truth.labels.tolist(),
                    "p": instance.p,
                    "seed": instance.seed,
                },
                fh,
            )
            fh.write("\n")


def read_sidecar(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
