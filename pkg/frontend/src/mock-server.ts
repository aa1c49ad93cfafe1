/**
 * Replay mock of the session API, driven by a transcript recorded from the
 * real engine (see scripts/generate_fixture.py).
 *
 * The mock enforces the protocol strictly: request bodies must validate,
 * only pending pairs may be answered, and every submitted label must match
 * the scripted graph the transcript was recorded against. Any divergence in
 * the UI (wrong mapping, duplicate submit, skipped pair) surfaces as an
 * HTTP error instead of a silently wrong clustering.
 */

import {
  FetchLike,
  ResponseLike,
  SessionState,
  labelSubmitSchema,
  sessionCreateSchema,
} from "./api.js";

export interface FixtureRound {
  batch: Array<[number, number]>;
  state_after: SessionState;
}

export interface SessionFixture {
  config: Record<string, unknown>;
  instance: Record<string, unknown>;
  edges: Array<[number, number]>;
  initial_state: SessionState;
  rounds: FixtureRound[];
  final_state: SessionState;
  in_process_final: number[];
}

const SESSION_ID = "fixture-session";

const pairKey = (u: number, v: number) => (u < v ? `${u},${v}` : `${v},${u}`);

function respond(status: number, body: unknown): ResponseLike {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  };
}

const notFound = (what: string) => respond(404, { detail: `unknown ${what}` });

export class MockSessionServer {
  private created = false;
  private round = 0;
  private pending = new Map<string, [number, number]>();
  private readonly edgeSet: Set<string>;
  readonly requests: Array<{ method: string; path: string; body?: unknown }> = [];

  constructor(private readonly fixture: SessionFixture) {
    this.edgeSet = new Set(fixture.edges.map(([u, v]) => pairKey(u, v)));
  }

  private loadRound(): void {
    this.pending.clear();
    if (this.round < this.fixture.rounds.length) {
      for (const [u, v] of this.fixture.rounds[this.round].batch) {
        this.pending.set(pairKey(u, v), [u, v]);
      }
    }
  }

  private currentState(): SessionState {
    return this.round === 0
      ? this.fixture.initial_state
      : this.fixture.rounds[this.round - 1].state_after;
  }

  fetch: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    const body = init?.body === undefined ? undefined : JSON.parse(init.body);
    this.requests.push({ method, path, body });

    if (method === "POST" && path === "/sessions") {
      const parsed = sessionCreateSchema.safeParse(body);
      if (!parsed.success) {
        return respond(422, { detail: parsed.error.message });
      }
      for (const [field, value] of Object.entries(this.fixture.config)) {
        if ((parsed.data as Record<string, unknown>)[field] !== value) {
          return respond(422, {
            detail: `config field ${field} does not match the recorded transcript`,
          });
        }
      }
      this.created = true;
      this.round = 0;
      this.loadRound();
      return respond(200, { id: SESSION_ID });
    }

    const match = path.match(/^\/sessions\/([^/]+)\/(batch|labels|state)$/);
    if (!match) {
      return notFound("route");
    }
    const [, sessionId, endpoint] = match;
    if (!this.created || sessionId !== SESSION_ID) {
      return notFound(`session ${sessionId}`);
    }

    if (endpoint === "batch" && method === "GET") {
      return respond(200, { pairs: [...this.pending.values()].map(([u, v]) => ({ u, v })) });
    }

    if (endpoint === "state" && method === "GET") {
      return respond(200, this.currentState());
    }

    if (endpoint === "labels" && method === "POST") {
      const parsed = labelSubmitSchema.safeParse(body);
      if (!parsed.success) {
        return respond(422, { detail: parsed.error.message });
      }
      const { u, v, label } = parsed.data;
      const key = pairKey(u, v);
      if (!this.pending.has(key)) {
        return respond(409, { detail: `pair (${u},${v}) is not pending` });
      }
      const scripted = this.edgeSet.has(key) ? "edge" : "nonedge";
      if (label !== scripted) {
        return respond(409, {
          detail: `label for (${u},${v}) disagrees with the recorded script`,
        });
      }
      this.pending.delete(key);
      if (this.pending.size === 0) {
        this.round += 1;
        this.loadRound();
      }
      return respond(200, { pending_remaining: this.pending.size });
    }

    return notFound("route");
  };
}
