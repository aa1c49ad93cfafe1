/**
 * Typed client for the labeling-session HTTP API.
 *
 * Every request body and response is validated against the schemas below, so
 * a drifting server (or a buggy caller) fails loudly instead of corrupting a
 * labeling run. The fetch implementation is injectable for tests.
 */

import { z } from "zod";

export const pairSchema = z.object({
  u: z.number().int().nonnegative(),
  v: z.number().int().nonnegative(),
});

export const sessionCreateSchema = z.object({
  n: z.number().int().min(1),
  k: z.number().int().min(1),
  seed: z.number().int(),
  q: z.number().int().min(1).optional(),
  epsilon: z.number().gt(0).lt(1).optional(),
  c2: z.number().positive().optional(),
  t_max: z.number().int().min(1).optional(),
  restarts: z.number().int().min(1).optional(),
  improvement_floor: z.number().min(0).optional(),
});

export const createResponseSchema = z.object({ id: z.string().min(1) });

export const batchResponseSchema = z.object({ pairs: z.array(pairSchema) });

export const labelSubmitSchema = z.object({
  u: z.number().int().nonnegative(),
  v: z.number().int().nonnegative(),
  label: z.enum(["edge", "nonedge"]),
});

export const labelResponseSchema = z.object({
  pending_remaining: z.number().int().nonnegative(),
});

export const stateResponseSchema = z.object({
  iteration: z.number().int().nonnegative(),
  labels_collected: z.number().int().nonnegative(),
  current_clustering: z.array(z.number().int().nonnegative()),
  done: z.boolean(),
});

export type Pair = z.infer<typeof pairSchema>;
export type PairLabel = "edge" | "nonedge";
export type SessionCreate = z.infer<typeof sessionCreateSchema>;
export type SessionState = z.infer<typeof stateResponseSchema>;

/** Minimal slice of the fetch response surface the client needs. */
export interface ResponseLike {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<ResponseLike>;

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

async function detail(response: ResponseLike): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    return body.detail ?? `HTTP ${response.status}`;
  } catch {
    return `HTTP ${response.status}`;
  }
}

export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (globalThis.fetch as unknown as FetchLike),
  ) {}

  private async request(method: string, path: string, body?: unknown): Promise<unknown> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, await detail(response));
    }
    return response.json();
  }

  async createSession(config: SessionCreate): Promise<string> {
    const body = sessionCreateSchema.parse(config);
    const raw = await this.request("POST", "/sessions", body);
    return createResponseSchema.parse(raw).id;
  }

  async nextBatch(sessionId: string): Promise<Pair[]> {
    const raw = await this.request("GET", `/sessions/${sessionId}/batch`);
    return batchResponseSchema.parse(raw).pairs;
  }

  async submitLabel(sessionId: string, u: number, v: number, label: PairLabel): Promise<number> {
    const body = labelSubmitSchema.parse({ u, v, label });
    const raw = await this.request("POST", `/sessions/${sessionId}/labels`, body);
    return labelResponseSchema.parse(raw).pending_remaining;
  }

  async state(sessionId: string): Promise<SessionState> {
    const raw = await this.request("GET", `/sessions/${sessionId}/state`);
    return stateResponseSchema.parse(raw);
  }
}
