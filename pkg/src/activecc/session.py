"""Labeling sessions: run the clustering loop with a human as the oracle.

A session exposes, one sampling round at a time, the pairs the loop still
needs labels for. Batches are shuffled so labelers cannot tell which element
or cluster motivated a pair. The loop advances exactly when the pending
batch drains; everything is deterministic given the session seed, so a
session fed labels scripted from a known graph reproduces the in-process run
against that graph bit for bit.

Sessions live in process memory; state can be exported as a JSON snapshot
but does not survive the process.
"""

from __future__ import annotations

import threading
import uuid

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel
from typing import Literal

from .clustering import pair_key, random_clustering
from .oracle import DictOracle, PairLabel
from .optimize import SEED_INIT, SEED_SHUFFLE, LoopConfig, LoopRunner, loop_seed
from .sampling import SrraParams

__all__ = ["ProtocolError", "LabelSession", "SessionRegistry", "create_app"]


class ProtocolError(ValueError):
    """A submit that violates the session protocol (non-pending pair);
    session state is left unchanged."""


class LabelSession:
    """The loop plus a pending-batch buffer between it and the labeler.

    A pair appears at most once across pending and answered; submits for
    the same pair serialize with first-wins (the second is rejected).
    """

    def __init__(self, session_id: str, n: int, config: LoopConfig):
        self.id = session_id
        self.n = n
        self.config = config
        self.oracle = DictOracle(n)
        self.labels_collected = 0
        initial = random_clustering(n, config.k,
                                    np.random.default_rng(loop_seed(config.seed, SEED_INIT)))
        self.runner = LoopRunner(self.oracle, config, initial, "srra")
        self._pending: dict[tuple[int, int], None] = {}
        self._lock = threading.RLock()  # snapshot() reads state() under the same lock
        self._advance()

    def _advance(self) -> None:
        """Step the loop until it either finishes or needs labels."""
        while True:
            plan = self.runner.begin_iteration()
            if plan is None:
                self._pending = {}
                return
            needed = [pk for pk in plan.distinct_pairs() if not self.oracle.knows(*pk)]
            if needed:
                rng = np.random.default_rng(
                    loop_seed(self.config.seed, SEED_SHUFFLE, self.runner.t))
                order = rng.permutation(len(needed))
                self._pending = dict.fromkeys(needed[i] for i in order)
                return
            self.runner.step()

    @property
    def done(self) -> bool:
        return self.runner.done

    def next_batch(self) -> list[tuple[int, int]]:
        """Pairs the current round still needs; empty when the loop can
        advance (or has finished)."""
        with self._lock:
            return list(self._pending)

    def submit(self, u: int, v: int, label: PairLabel) -> int:
        """Answer one pending pair; returns how many remain pending."""
        key = pair_key(u, v)
        with self._lock:
            if key not in self._pending:
                raise ProtocolError(f"pair {key} is not pending")
            self.oracle.provide(*key, label)
            del self._pending[key]
            self.labels_collected += 1
            if not self._pending:
                self._advance()
            return len(self._pending)

    def state(self) -> dict:
        with self._lock:
            return {
                "iteration": self.runner.trace.rows[-1].t,
                "labels_collected": self.labels_collected,
                "current_clustering": self.runner.pivot.labels.tolist(),
                "done": self.done,
            }

    def snapshot(self) -> dict:
        """JSON-serializable dump of the full session state (audit/export)."""
        with self._lock:
            return {
                "id": self.id,
                "n": self.n,
                "pending": [list(p) for p in self._pending],
                "answered": [
                    {"u": u, "v": v, "label": lab.value}
                    for (u, v), lab in sorted(self.oracle.ledger.revealed.items())
                ],
                "trace": self.runner.trace.to_csv_rows(),
                "state": self.state() | {"id": self.id},
            }


class SessionRegistry:
    def __init__(self):
        self._sessions: dict[str, LabelSession] = {}
        self._lock = threading.Lock()

    def create(self, n: int, config: LoopConfig) -> LabelSession:
        session = LabelSession(uuid.uuid4().hex, n, config)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> LabelSession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise KeyError(session_id)
        return session


class SessionCreate(BaseModel):
    n: int
    k: int
    seed: int = 0
    q: int | None = None
    epsilon: float = 0.5
    c2: float = 1.0
    t_max: int = 5
    restarts: int = 3
    improvement_floor: float = 0.0


class LabelSubmit(BaseModel):
    u: int
    v: int
    label: Literal["edge", "nonedge"]


def create_app(registry: SessionRegistry | None = None) -> FastAPI:
    registry = registry if registry is not None else SessionRegistry()
    app = FastAPI(title="activecc labeling sessions")
    app.state.registry = registry

    def lookup(session_id: str) -> LabelSession:
        try:
            return registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")

    @app.post("/sessions")
    def create_session(body: SessionCreate) -> dict:
        try:
            config = LoopConfig(
                k=body.k,
                params=SrraParams(epsilon=body.epsilon, c2=body.c2, q_override=body.q),
                t_max=body.t_max,
                restarts=body.restarts,
                improvement_floor=body.improvement_floor,
                seed=body.seed,
            )
            session = registry.create(body.n, config)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"id": session.id}

    @app.get("/sessions/{session_id}/batch")
    def get_batch(session_id: str) -> dict:
        session = lookup(session_id)
        return {"pairs": [{"u": u, "v": v} for u, v in session.next_batch()]}

    @app.post("/sessions/{session_id}/labels")
    def post_label(session_id: str, body: LabelSubmit) -> dict:
        session = lookup(session_id)
        try:
            remaining = session.submit(body.u, body.v, PairLabel(body.label))
        except ProtocolError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"pending_remaining": remaining}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str) -> dict:
        return lookup(session_id).state()

    @app.get("/sessions/{session_id}/snapshot")
    def get_snapshot(session_id: str) -> dict:
        return lookup(session_id).snapshot()

    return app
