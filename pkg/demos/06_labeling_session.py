"""A labeling session driven headlessly: a human-in-the-loop run where the
"human" is scripted from a known graph.

The session exposes one sampling round at a time as a shuffled batch of
pairs; the loop advances exactly when the batch drains. Because everything
is deterministic given the seed, the session run reproduces the in-process
run against the same graph exactly -- the transport changes nothing.

For the real thing: `activecc serve` starts this API over HTTP, and the
browser console under frontend/ renders the batches for a person.
"""

import numpy as np
from fastapi.testclient import TestClient

from activecc import (
    GraphOracle,
    LoopConfig,
    SrraParams,
    cost,
    generate_planted,
    random_clustering,
    srra_loop,
)
from activecc.optimize import SEED_INIT, loop_seed
from activecc.session import SessionRegistry, create_app

inst = generate_planted([3, 2], p=0.2, seed=42)
config = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=2),
                    t_max=3, restarts=2, seed=7)

# reference: the ordinary in-process run against a graph-backed oracle
initial = random_clustering(5, 2, np.random.default_rng(loop_seed(7, SEED_INIT)))
reference = srra_loop(GraphOracle(inst.graph), config, initial, graph=inst.graph)
print("in-process final clustering:", reference.final_pivot.labels.tolist())

# the same run, but every label travels through the session API
registry = SessionRegistry()
client = TestClient(create_app(registry))
sid = client.post("/sessions", json={"n": 5, "k": 2, "q": 2, "seed": 7,
                                     "t_max": 3, "restarts": 2}).json()["id"]
round_no = 0
while True:
    batch = client.get(f"/sessions/{sid}/batch").json()["pairs"]
    if not batch:
        break
    round_no += 1
    print(f"round {round_no}: labeling {len(batch)} pairs")
    for pair in batch:
        u, v = pair["u"], pair["v"]
        label = "edge" if inst.graph.has_edge(u, v) else "nonedge"
        client.post(f"/sessions/{sid}/labels", json={"u": u, "v": v, "label": label})

state = client.get(f"/sessions/{sid}/state").json()
print("session final clustering:   ", state["current_clustering"])
print("identical to the in-process run:",
      state["current_clustering"] == reference.final_pivot.labels.tolist())
final = state["current_clustering"]
print("labels collected:", state["labels_collected"],
      "| final cost:", cost(reference.final_pivot, inst.graph))
