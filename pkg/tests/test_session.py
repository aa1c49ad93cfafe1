from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest
from fastapi.testclient import TestClient

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
from activecc.session import LabelSession, ProtocolError, SessionRegistry, create_app


@pytest.fixture()
def api():
    registry = SessionRegistry()
    return registry, TestClient(create_app(registry))


def open_session(client, **overrides):
    body = dict(n=5, k=2, q=2, seed=7, t_max=3, restarts=2)
    body.update(overrides)
    resp = client.post("/sessions", json=body)
    assert resp.status_code == 200
    return resp.json()["id"]


def drive_with_graph(client, sid, graph):
    """Scripted labeler: answer every batch straight from a known graph."""
    batches = 0
    while True:
        pairs = client.get(f"/sessions/{sid}/batch").json()["pairs"]
        if not pairs:
            break
        batches += 1
        for pair in pairs:
            u, v = pair["u"], pair["v"]
            assert 0 <= u < v < graph.n
            label = "edge" if graph.has_edge(u, v) else "nonedge"
            resp = client.post(f"/sessions/{sid}/labels",
                               json={"u": u, "v": v, "label": label})
            assert resp.status_code == 200
    return batches


def test_fresh_session_has_a_wellformed_batch(api):
    _, client = api
    sid = open_session(client)
    pairs = client.get(f"/sessions/{sid}/batch").json()["pairs"]
    assert pairs
    seen = set()
    for pair in pairs:
        u, v = pair["u"], pair["v"]
        assert 0 <= u < v < 5
        assert (u, v) not in seen
        seen.add((u, v))
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["iteration"] == 0
    assert state["labels_collected"] == 0
    assert not state["done"]


def test_session_reproduces_the_in_process_run(api):
    registry, client = api
    inst = generate_planted([3, 2], 0.2, seed=42)
    cfg = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=2),
                     t_max=3, restarts=2, seed=7)
    init = random_clustering(5, 2, np.random.default_rng(loop_seed(7, SEED_INIT)))
    inproc = srra_loop(GraphOracle(inst.graph), cfg, init, graph=inst.graph)

    sid = open_session(client)
    drive_with_graph(client, sid, inst.graph)
    state = client.get(f"/sessions/{sid}/state").json()
    assert state["done"]
    assert state["current_clustering"] == inproc.final_pivot.labels.tolist()
    assert state["iteration"] == inproc.iterations
    session = registry.get(sid)
    assert [(r.t, r.pivot, r.fhat_min) for r in session.runner.trace.rows] == \
        [(r.t, r.pivot, r.fhat_min) for r in inproc.rows]
    # the human answered exactly the pairs the ledger charged
    assert state["labels_collected"] == session.oracle.ledger.distinct_queries


def test_repeat_submit_is_rejected_and_changes_nothing(api):
    _, client = api
    sid = open_session(client)
    pair = client.get(f"/sessions/{sid}/batch").json()["pairs"][0]
    body = {"u": pair["u"], "v": pair["v"], "label": "edge"}
    first = client.post(f"/sessions/{sid}/labels", json=body)
    assert first.status_code == 200
    before = client.get(f"/sessions/{sid}/state").json()
    second = client.post(f"/sessions/{sid}/labels", json={**body, "label": "nonedge"})
    assert second.status_code == 409
    assert client.get(f"/sessions/{sid}/state").json() == before


def test_non_pending_and_unknown_submits(api):
    _, client = api
    # q=1 on n=8 touches at most 16 of the 28 pairs, so some pair is unrequested
    sid = open_session(client, n=8, q=1)
    pending = {(p["u"], p["v"]) for p in client.get(f"/sessions/{sid}/batch").json()["pairs"]}
    outside = next((u, v) for u in range(8) for v in range(u + 1, 8)
                   if (u, v) not in pending)
    resp = client.post(f"/sessions/{sid}/labels",
                       json={"u": outside[0], "v": outside[1], "label": "edge"})
    assert resp.status_code == 409
    assert client.get("/sessions/nope/state").status_code == 404
    assert client.get("/sessions/nope/batch").status_code == 404
    bad = client.post(f"/sessions/{sid}/labels", json={"u": 0, "v": 1, "label": "maybe"})
    assert bad.status_code == 422


def test_finished_session_has_empty_batch(api):
    _, client = api
    inst = generate_planted([3, 2], 0.0, seed=1)
    sid = open_session(client, seed=1)
    drive_with_graph(client, sid, inst.graph)
    assert client.get(f"/sessions/{sid}/batch").json()["pairs"] == []
    assert client.get(f"/sessions/{sid}/state").json()["done"]


def test_snapshot_exports_full_state(api):
    registry, client = api
    inst = generate_planted([3, 2], 0.1, seed=3)
    sid = open_session(client, seed=3)
    drive_with_graph(client, sid, inst.graph)
    snap = client.get(f"/sessions/{sid}/snapshot").json()
    assert snap["id"] == sid
    assert snap["pending"] == []
    assert snap["state"]["done"]
    answered = {(rec["u"], rec["v"]) for rec in snap["answered"]}
    assert len(answered) == snap["state"]["labels_collected"]
    assert snap["trace"][0] == ["t", "cost", "fhat_min", "distinct_queries"]


def test_concurrent_submits_for_distinct_pairs():
    inst = generate_planted([4, 3], 0.15, seed=11)
    cfg = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=3),
                     t_max=2, restarts=1, seed=11)
    session = LabelSession("s", 7, cfg)
    while not session.done:
        batch = session.next_batch()
        if not batch:
            break
        labels = [(u, v, PairLabel.from_bool(inst.graph.has_edge(u, v))) for u, v in batch]
        with ThreadPoolExecutor(max_workers=4) as pool:
            list(pool.map(lambda rec: session.submit(*rec), labels))
    assert session.done
    assert session.labels_collected == session.oracle.ledger.distinct_queries


def test_direct_api_rejects_non_pending(api):
    cfg = LoopConfig(k=2, params=SrraParams(epsilon=0.5, q_override=2),
                     t_max=2, restarts=1, seed=0)
    session = LabelSession("s", 5, cfg)
    batch = session.next_batch()
    u, v = batch[0]
    session.submit(u, v, PairLabel.EDGE)
    with pytest.raises(ProtocolError):
        session.submit(u, v, PairLabel.EDGE)
