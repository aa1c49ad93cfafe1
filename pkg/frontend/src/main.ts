/**
 * Browser entry: bind the labeling console to the DOM.
 *
 * Query parameters: ?api=http://host:port (default: same origin),
 * ?session=<id> to join an existing session, or ?n=&k=&q=&seed= to create
 * one. An optional names file (?names=url pointing at a JSON array) maps
 * element ids to display names.
 */

import { SessionClient, SessionState } from "./api.js";
import { ConsoleRenderer, LabelingConsole, PairCard, clusteringGroups } from "./view.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

class DomRenderer implements ConsoleRenderer {
  private readonly batchHost: HTMLElement;
  private readonly stateHost: HTMLElement;
  private readonly noticeHost: HTMLElement;
  private readonly cardNodes = new Map<PairCard, HTMLElement>();
  private names?: string[];

  constructor(root: HTMLElement, names?: string[]) {
    this.names = names;
    this.noticeHost = el("div", "notice");
    this.batchHost = el("div", "batch");
    this.stateHost = el("div", "state");
    root.append(this.noticeHost, this.batchHost, this.stateHost);
  }

  private cardNode(card: PairCard): HTMLElement {
    const node = el("div", "card");
    node.append(el("span", "pair", `${card.uName}  ·  ${card.vName}`));
    const together = el("button", "together", "together");
    const separate = el("button", "separate", "separate");
    const fire = (action: "together" | "separate") => () => {
      together.disabled = separate.disabled = true;
      card.submit(action).catch(() => {
        together.disabled = separate.disabled = false;
      });
    };
    together.addEventListener("click", fire("together"));
    separate.addEventListener("click", fire("separate"));
    node.append(together, separate);
    return node;
  }

  showBatch(cards: PairCard[]): void {
    this.batchHost.replaceChildren();
    this.cardNodes.clear();
    for (const card of cards) {
      const node = this.cardNode(card);
      this.cardNodes.set(card, node);
      this.batchHost.append(node);
    }
    this.noticeHost.textContent = cards.length
      ? `${cards.length} pairs awaiting judgment`
      : "";
  }

  cardResolved(card: PairCard): void {
    this.cardNodes.get(card)?.remove();
  }

  cardFailed(card: PairCard, message: string): void {
    const node = this.cardNodes.get(card);
    if (!node) return;
    this.batchHost.append(node); // restore the optimistically removed card
    node.querySelectorAll("button").forEach((b) => (b.disabled = false));
    this.noticeHost.textContent = `submit failed: ${message}`;
  }

  showState(state: SessionState): void {
    this.stateHost.replaceChildren(
      el("div", "progress",
         `iteration ${state.iteration} · ${state.labels_collected} labels collected`),
      ...clusteringGroups(state.current_clustering, this.names).map((members, i) =>
        el("div", "cluster", `cluster ${i + 1}: ${members.join(", ")}`)),
    );
  }

  showDone(state: SessionState): void {
    this.noticeHost.textContent =
      `done after ${state.iteration} iterations · ${state.labels_collected} labels`;
  }
}

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const client = new SessionClient(params.get("api") ?? "");
  let names: string[] | undefined;
  const namesUrl = params.get("names");
  if (namesUrl) {
    names = (await (await fetch(namesUrl)).json()) as string[];
  }
  let sessionId = params.get("session");
  if (!sessionId) {
    sessionId = await client.createSession({
      n: Number(params.get("n") ?? 5),
      k: Number(params.get("k") ?? 2),
      q: Number(params.get("q") ?? 2),
      seed: Number(params.get("seed") ?? 0),
    });
  }
  const root = document.getElementById("console");
  if (!root) throw new Error("missing #console element");
  const renderer = new DomRenderer(root, names);
  const console_ = new LabelingConsole(client, { sessionId, names }, renderer);
  await console_.run();
}

boot().catch((err) => {
  const root = document.getElementById("console");
  if (root) root.textContent = `failed to start: ${err}`;
});
