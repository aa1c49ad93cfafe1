import { describe, expect, it } from "vitest";

import { ApiError, SessionClient } from "../src/api.js";
import { ScriptedLabeler } from "../src/labeler.js";
import { MockSessionServer, SessionFixture } from "../src/mock-server.js";
import {
  ConsoleRenderer,
  LabelingConsole,
  PairCard,
  actionToLabel,
  clusteringGroups,
} from "../src/view.js";

const tinyFixture: SessionFixture = {
  config: { n: 3, k: 2, seed: 0 },
  instance: {},
  edges: [[0, 1]],
  initial_state: { iteration: 0, labels_collected: 0, current_clustering: [0, 1, 0], done: false },
  rounds: [
    {
      batch: [
        [0, 1],
        [1, 2],
      ],
      state_after: { iteration: 1, labels_collected: 2, current_clustering: [0, 0, 1], done: true },
    },
  ],
  final_state: { iteration: 1, labels_collected: 2, current_clustering: [0, 0, 1], done: true },
  in_process_final: [0, 0, 1],
};

class RecordingRenderer implements ConsoleRenderer {
  cards: PairCard[] = [];
  resolved: PairCard[] = [];
  failed: Array<[PairCard, string]> = [];
  showBatch(cards: PairCard[]): void {
    this.cards = cards;
  }
  cardResolved(card: PairCard): void {
    this.resolved.push(card);
  }
  cardFailed(card: PairCard, message: string): void {
    this.failed.push([card, message]);
  }
  showState(): void {}
  showDone(): void {}
}

function freshConsole() {
  const server = new MockSessionServer(tinyFixture);
  const client = new SessionClient("http://mock", server.fetch);
  const renderer = new RecordingRenderer();
  return { server, client, renderer };
}

describe("protocol mapping", () => {
  it("maps together/separate onto edge/nonedge", () => {
    expect(actionToLabel.together).toBe("edge");
    expect(actionToLabel.separate).toBe("nonedge");
  });

  it("posts the exact body for a judgment", async () => {
    const { server, client, renderer } = freshConsole();
    const id = await client.createSession({ n: 3, k: 2, seed: 0 });
    const console_ = new LabelingConsole(client, { sessionId: id, pollMs: 1 }, renderer);
    const batchDone = console_.renderBatch();
    expect(renderer.cards.length).toBe(0); // showBatch runs after the fetch resolves
    await new Promise((r) => setTimeout(r, 0));
    expect(renderer.cards.length).toBe(2);
    await renderer.cards[0].submit("together");
    await renderer.cards[1].submit("separate");
    await batchDone;
    const posts = server.requests.filter((r) => r.path.endsWith("/labels"));
    expect(posts[0].body).toEqual({ u: 0, v: 1, label: "edge" });
    expect(posts[1].body).toEqual({ u: 1, v: 2, label: "nonedge" });
  });
});

describe("card lifecycle", () => {
  it("renders one card per pending pair with display names", async () => {
    const { client, renderer } = freshConsole();
    const id = await client.createSession({ n: 3, k: 2, seed: 0 });
    const console_ = new LabelingConsole(
      client,
      { sessionId: id, names: ["ada", "bo", "cy"], pollMs: 1 },
      renderer,
    );
    const pending = console_.renderBatch();
    await new Promise((r) => setTimeout(r, 0));
    expect(renderer.cards.map((c) => [c.uName, c.vName])).toEqual([
      ["ada", "bo"],
      ["bo", "cy"],
    ]);
    await renderer.cards[0].submit("together");
    await renderer.cards[1].submit("separate");
    await pending;
    expect(renderer.resolved.length).toBe(2);
  });

  it("restores a card when the API rejects the label", async () => {
    const { client, renderer } = freshConsole();
    const id = await client.createSession({ n: 3, k: 2, seed: 0 });
    const console_ = new LabelingConsole(client, { sessionId: id, pollMs: 1 }, renderer);
    const batch = console_.renderBatch();
    await new Promise((r) => setTimeout(r, 0));
    const [edgeCard, otherCard] = renderer.cards;
    // (0,1) is scripted as an edge; submitting "separate" must be rejected
    await expect(edgeCard.submit("separate")).rejects.toThrow(ApiError);
    expect(renderer.failed.length).toBe(1);
    expect(renderer.failed[0][1]).toMatch(/disagrees/);
    // the pair is still pending: the correct judgment now succeeds
    await edgeCard.submit("together");
    await otherCard.submit("separate");
    await batch;
  });
});

describe("clustering display", () => {
  it("groups labels into member lists", () => {
    expect(clusteringGroups([0, 1, 0, 1, 0])).toEqual([
      ["0", "2", "4"],
      ["1", "3"],
    ]);
    expect(clusteringGroups([1, 1, 0], ["x", "y", "z"])).toEqual([["z"], ["x", "y"]]);
  });
});

describe("client-side validation", () => {
  it("rejects malformed server responses", async () => {
    const bogus = async () => ({ ok: true, status: 200, json: async () => ({ nope: 1 }) });
    const client = new SessionClient("http://mock", bogus);
    await expect(client.state("s")).rejects.toThrow();
  });

  it("refuses to send an invalid label", async () => {
    const { client } = freshConsole();
    const id = await client.createSession({ n: 3, k: 2, seed: 0 });
    await expect(
      client.submitLabel(id, 0, 1, "maybe" as unknown as "edge"),
    ).rejects.toThrow();
  });

  it("surfaces http errors with their detail", async () => {
    const { client } = freshConsole();
    await expect(client.nextBatch("missing")).rejects.toThrow(/unknown session/);
  });
});
