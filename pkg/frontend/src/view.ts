/**
 * The labeling console's behavior, separated from the DOM.
 *
 * The console fetches the pending batch, hands one card per pair to a
 * renderer, and submits the labeler's judgments. Cards are removed
 * optimistically on submit and restored with a notice if the API rejects
 * the label. When the batch drains it polls session state, shows the new
 * iteration's clustering, and fetches the next batch until the loop
 * finishes. Display names for elements come from an optional names table;
 * numeric ids otherwise.
 */

import { Pair, PairLabel, SessionClient, SessionState } from "./api.js";

export interface PairCard {
  readonly u: number;
  readonly v: number;
  readonly uName: string;
  readonly vName: string;
  /** "together" maps to an edge label, "separate" to a non-edge. */
  submit(action: "together" | "separate"): Promise<void>;
}

export interface ConsoleRenderer {
  showBatch(cards: PairCard[]): void;
  cardResolved(card: PairCard): void;
  cardFailed(card: PairCard, message: string): void;
  showState(state: SessionState): void;
  showDone(state: SessionState): void;
}

export interface SessionView {
  sessionId: string;
  names?: string[];
  pollMs?: number;
}

export const actionToLabel: Record<"together" | "separate", PairLabel> = {
  together: "edge",
  separate: "nonedge",
};

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class LabelingConsole {
  private readonly pollMs: number;
  private readonly names: string[];

  constructor(
    private readonly client: SessionClient,
    private readonly view: SessionView,
    private readonly renderer: ConsoleRenderer,
  ) {
    this.pollMs = view.pollMs ?? 2000;
    this.names = view.names ?? [];
  }

  private nameOf(element: number): string {
    return this.names[element] ?? String(element);
  }

  private makeCard(pair: Pair, resolved: () => void): PairCard {
    const { client, view, renderer } = this;
    const card: PairCard = {
      u: pair.u,
      v: pair.v,
      uName: this.nameOf(pair.u),
      vName: this.nameOf(pair.v),
      async submit(action) {
        renderer.cardResolved(card); // optimistic removal
        try {
          await client.submitLabel(view.sessionId, pair.u, pair.v, actionToLabel[action]);
          resolved();
        } catch (err) {
          renderer.cardFailed(card, err instanceof Error ? err.message : String(err));
          throw err;
        }
      },
    };
    return card;
  }

  /**
   * Render one batch and resolve once every card in it is submitted.
   * Returns false when the batch was empty (the loop advanced or finished).
   */
  async renderBatch(): Promise<boolean> {
    const pairs = await this.client.nextBatch(this.view.sessionId);
    if (pairs.length === 0) {
      return false;
    }
    let outstanding = pairs.length;
    let finishBatch!: () => void;
    const drained = new Promise<void>((resolve) => (finishBatch = resolve));
    const cards = pairs.map((pair) =>
      this.makeCard(pair, () => {
        outstanding -= 1;
        if (outstanding === 0) finishBatch();
      }),
    );
    this.renderer.showBatch(cards);
    await drained;
    return true;
  }

  /** Drive the session to completion; resolves with the final state. */
  async run(): Promise<SessionState> {
    for (;;) {
      const hadCards = await this.renderBatch();
      const state = await this.client.state(this.view.sessionId);
      this.renderer.showState(state);
      if (state.done) {
        this.renderer.showDone(state);
        return state;
      }
      if (!hadCards) {
        await sleep(this.pollMs); // nothing to label yet: poll
      }
    }
  }
}

/** Group a label vector into display-friendly member lists, empty clusters
 * omitted. */
export function clusteringGroups(labels: number[], names?: string[]): string[][] {
  const groups = new Map<number, string[]>();
  labels.forEach((label, element) => {
    const name = names?.[element] ?? String(element);
    if (!groups.has(label)) groups.set(label, []);
    groups.get(label)!.push(name);
  });
  return [...groups.entries()].sort(([a], [b]) => a - b).map(([, members]) => members);
}
