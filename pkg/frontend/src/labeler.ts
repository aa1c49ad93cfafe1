/**
 * Scripted labelers: answer pair cards from a known edge set. Used by the
 * test suite (and demos) to stand in for a human.
 */

import { PairCard } from "./view.js";

const key = (u: number, v: number) => (u < v ? `${u},${v}` : `${v},${u}`);

export class ScriptedLabeler {
  private readonly edges: Set<string>;

  constructor(edges: Array<[number, number]>) {
    this.edges = new Set(edges.map(([u, v]) => key(u, v)));
  }

  actionFor(u: number, v: number): "together" | "separate" {
    return this.edges.has(key(u, v)) ? "together" : "separate";
  }

  async labelAll(cards: PairCard[]): Promise<void> {
    for (const card of cards) {
      await card.submit(this.actionFor(card.u, card.v));
    }
  }
}
