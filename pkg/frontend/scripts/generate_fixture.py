"""Record a session transcript for the frontend test suite.

Drives a real labeling session with labels scripted from a planted graph
and dumps everything the browser console should observe: per-round batches,
states, the label script, and the in-process run's final clustering. The
TypeScript mock server replays this transcript, so the UI tests validate
against the engine's actual behavior without a live Python process.
"""

import json
import pathlib

import numpy as np

from activecc import (
    GraphOracle,
    LoopConfig,
    PairLabel,
    SrraParams,
    generate_planted,
    random_clustering,
    srra_loop,
)
from activecc.optimize import SEED_INIT, loop_seed
from activecc.session import LabelSession

FIXTURES = {
    "session_n5_k2_q2.json": {
        "config": {"n": 5, "k": 2, "q": 2, "seed": 7, "t_max": 3, "restarts": 2},
        "instance": {"sizes": [3, 2], "p": 0.2, "seed": 42},
    },
    "session_n8_k2_q1.json": {
        "config": {"n": 8, "k": 2, "q": 1, "seed": 3, "t_max": 4, "restarts": 2},
        "instance": {"sizes": [5, 3], "p": 0.15, "seed": 9},
    },
}


def record(name: str, spec: dict) -> None:
    config, instance = spec["config"], spec["instance"]
    inst = generate_planted(instance["sizes"], instance["p"], instance["seed"])
    loop_config = LoopConfig(
        k=config["k"],
        params=SrraParams(epsilon=0.5, q_override=config["q"]),
        t_max=config["t_max"],
        restarts=config["restarts"],
        seed=config["seed"],
    )
    initial = random_clustering(config["n"], config["k"],
                                np.random.default_rng(loop_seed(config["seed"], SEED_INIT)))
    reference = srra_loop(GraphOracle(inst.graph), loop_config, initial, graph=inst.graph)

    session = LabelSession("fixture", config["n"], loop_config)
    rounds = []
    initial_state = session.state()
    while not session.done:
        batch = session.next_batch()
        if not batch:
            break
        for u, v in batch:
            session.submit(u, v, PairLabel.from_bool(inst.graph.has_edge(u, v)))
        rounds.append({"batch": [[u, v] for u, v in batch],
                       "state_after": session.state()})

    assert session.state()["current_clustering"] == reference.final_pivot.labels.tolist()

    fixture = {
        "config": config,
        "instance": instance,
        "edges": [[u, v] for u, v in inst.graph.edges()],
        "initial_state": initial_state,
        "rounds": rounds,
        "final_state": session.state(),
        "in_process_final": reference.final_pivot.labels.tolist(),
    }
    out = pathlib.Path(__file__).resolve().parent.parent / "fixtures" / name
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"wrote {out} ({len(rounds)} rounds, "
          f"{fixture['final_state']['labels_collected']} labels)")


def main() -> None:
    for name, spec in FIXTURES.items():
        record(name, spec)


if __name__ == "__main__":
    main()
