/**
 * Explorer session state and the operations that mutate it.
 *
 * The explorer never computes analysis results locally: every cut family
 * and probability shown comes from a service response.  What lives here
 * is bookkeeping:
 *
 *   - the baseline (no-defense) family, fetched once per model and never
 *     mutated afterwards;
 *   - the current family, defined as the one the service returned for the
 *     toggle set it was asked about;
 *   - optimistic toggles with rollback, so a failed request leaves the
 *     UI where it was;
 *   - a monotone sequence counter so a slow response for an older toggle
 *     set (or an older model) is discarded instead of clobbering state.
 */

import { ServiceClient } from "./api.js";
import { classifyFamilies, type CutDiff } from "./diff.js";
import type { LeafPartition, ProbResult, Violation } from "./types.js";

export interface LoadedModel {
  token: string;
  leaves: LeafPartition;
  labels: Record<string, string>;
  violations: Violation[];
  dot: string;
}

export interface ProbabilityPair {
  current: ProbResult;
  baseline: ProbResult;
}

export class Explorer {
  readonly client: ServiceClient;

  token: string | null = null;
  leaves: LeafPartition = { bas: [], bcf: [], bds: [] };
  labels: Record<string, string> = {};
  violations: Violation[] = [];
  dot = "";

  /** Defense id -> deployed?  Keys are exactly the model's BDS leaves. */
  defenseToggles = new Map<string, boolean>();

  /** No-defense cut family, fetched once at load. */
  baseline: string[][] = [];
  /** Family for the last toggle set the service acknowledged. */
  current: string[][] = [];

  private seq = 0;

  constructor(client: ServiceClient = new ServiceClient()) {
    this.client = client;
  }

  /** Defenses currently toggled on, in stable (insertion) order. */
  deployed(): string[] {
    const out: string[] = [];
    for (const [id, on] of this.defenseToggles) {
      if (on) out.push(id);
    }
    return out;
  }

  /**
   * Upload model text and reset the session around it: baseline family,
   * rendering text, and an all-off toggle per defense leaf.  Throws
   * ModelRejectedError / ApiError / TypeError straight through so the
   * caller can render findings inline or show the offline banner.
   */
  async loadModel(text: string): Promise<LoadedModel> {
    const ticket = ++this.seq;
    const uploaded = await this.client.uploadModel(text);
    const [family, dot] = await Promise.all([
      this.client.fetchMcs(uploaded.token, []),
      this.client.fetchDot(uploaded.token),
    ]);
    if (ticket !== this.seq) {
      // A newer load started while we were waiting; keep its state.
      return { ...uploaded, dot };
    }
    this.token = uploaded.token;
    this.leaves = uploaded.leaves;
    this.labels = uploaded.labels;
    this.violations = uploaded.violations;
    this.dot = dot;
    this.defenseToggles = new Map(this.leaves.bds.map((id) => [id, false]));
    this.baseline = family.cuts;
    this.current = family.cuts;
    return { ...uploaded, dot };
  }

  /**
   * Flip one defense optimistically and refetch the cut family for the
   * new toggle set.  On failure the toggle is rolled back and the error
   * rethrown; on a stale response (a newer toggle or load has happened
   * since) the result is discarded.  Returns the family now displayed.
   */
  async toggleDefense(id: string): Promise<string[][]> {
    if (this.token === null) throw new Error("no model loaded");
    if (!this.defenseToggles.has(id)) throw new Error(`unknown defense ${id}`);
    const token = this.token;
    const was = this.defenseToggles.get(id) === true;
    this.defenseToggles.set(id, !was);
    const ticket = ++this.seq;
    let family;
    try {
      family = await this.client.fetchMcs(token, this.deployed());
    } catch (err) {
      if (ticket === this.seq && this.token === token) {
        this.defenseToggles.set(id, was);
      }
      throw err;
    }
    if (ticket !== this.seq || this.token !== token) {
      return this.current;
    }
    this.current = family.cuts;
    return this.current;
  }

  /** Classification of every baseline cut against the current family. */
  diff(): CutDiff[] {
    return classifyFamilies(this.baseline, this.current);
  }

  /**
   * Top-event probability under the current toggles and under no
   * defenses, side by side, for the same leaf probabilities.
   */
  async probabilityPair(
    probs: Record<string, number>,
    mc?: { samples: number; seed: number },
  ): Promise<ProbabilityPair> {
    if (this.token === null) throw new Error("no model loaded");
    const [current, baseline] = await Promise.all([
      this.client.probability(this.token, probs, this.deployed(), mc),
      this.client.probability(this.token, probs, [], mc),
    ]);
    return { current, baseline };
  }
}
