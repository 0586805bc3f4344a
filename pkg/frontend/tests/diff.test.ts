/**
 * Classification of baseline cuts against a post-deployment family.
 *
 * The fixture families are the four defense subsets of the toy model
 * (none, D1, D2, both) plus the ground-segment corpus with and without
 * network segmentation, all captured from a live service.
 */

import { describe, expect, it } from "vitest";
import { classifyFamilies, hardenedCuts, type CutDiff } from "../src/diff.js";
import { FX } from "./fixtures.js";

const byKind = (diff: CutDiff[], kind: CutDiff["kind"]): string[][] =>
  diff.filter((d) => d.kind === kind).map((d) => d.cut);

describe("classifyFamilies on the toy model", () => {
  it("marks everything unchanged when nothing is deployed", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4Mcs.cuts);
    expect(diff).toHaveLength(4);
    expect(diff.every((d) => d.kind === "unchanged")).toBe(true);
    expect(diff.every((d) => d.hardenedTo.length === 0)).toBe(true);
  });

  it("D1 hardens {A1,C1} into {A1,C1,C3} and leaves the rest", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4McsD1.cuts);
    expect(byKind(diff, "unchanged")).toEqual([
      ["A1", "A2"],
      ["A1", "C2"],
      ["A2", "C2"],
    ]);
    expect(byKind(diff, "removed")).toEqual([]);
    const hardened = diff.filter((d) => d.kind === "hardened");
    expect(hardened).toHaveLength(1);
    expect(hardened[0]?.cut).toEqual(["A1", "C1"]);
    expect(hardened[0]?.hardenedTo).toEqual([["A1", "C1", "C3"]]);
  });

  it("D2 removes the three voting-branch cuts outright", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4McsD2.cuts);
    expect(byKind(diff, "unchanged")).toEqual([["A1", "C1"]]);
    expect(byKind(diff, "removed")).toEqual([
      ["A1", "A2"],
      ["A1", "C2"],
      ["A2", "C2"],
    ]);
    expect(byKind(diff, "hardened")).toEqual([]);
  });

  it("D1 and D2 together harden one cut and remove three", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4McsD1D2.cuts);
    expect(byKind(diff, "hardened")).toEqual([["A1", "C1"]]);
    expect(byKind(diff, "removed")).toEqual([
      ["A1", "A2"],
      ["A1", "C2"],
      ["A2", "C2"],
    ]);
    expect(byKind(diff, "unchanged")).toEqual([]);
  });

  it("preserves baseline order in the output", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4McsD1D2.cuts);
    expect(diff.map((d) => d.cut)).toEqual(FX.fig4Mcs.cuts);
  });
});

describe("classifyFamilies on the ground-segment corpus", () => {
  it("Seg removes exactly the ten antenna-site pairs", () => {
    const diff = classifyFamilies(FX.gsaasMcs.cuts, FX.gsaasMcsSeg.cuts);
    expect(diff).toHaveLength(22);
    const removed = byKind(diff, "removed");
    expect(removed).toHaveLength(10);
    expect(removed).toEqual(
      FX.gsaasMcs.cuts.filter((cut) => cut.every((id) => id.startsWith("AS"))),
    );
    expect(byKind(diff, "hardened")).toEqual([]);
    expect(byKind(diff, "unchanged")).toHaveLength(12);
  });
});

describe("classifyFamilies edge cases", () => {
  it("handles an empty baseline", () => {
    expect(classifyFamilies([], [["X"]])).toEqual([]);
  });

  it("treats member order inside a cut as irrelevant", () => {
    const diff = classifyFamilies([["B", "A"]], [["A", "B"]]);
    expect(diff[0]?.kind).toBe("unchanged");
  });

  it("requires a proper superset for hardening, not equality", () => {
    const diff = classifyFamilies([["A", "B"]], [["A", "B", "C"], ["A", "B"]]);
    expect(diff[0]?.kind).toBe("unchanged");
  });

  it("collects every superset that replaced a hardened cut", () => {
    const diff = classifyFamilies([["A"]], [["A", "B"], ["A", "C"]]);
    expect(diff[0]?.kind).toBe("hardened");
    expect(diff[0]?.hardenedTo).toEqual([
      ["A", "B"],
      ["A", "C"],
    ]);
  });
});

describe("hardenedCuts", () => {
  it("lists each replacement cut once across the whole diff", () => {
    const diff = classifyFamilies(
      [["A"], ["B"]],
      [["A", "B", "C"]],
    );
    expect(diff.map((d) => d.kind)).toEqual(["hardened", "hardened"]);
    expect(hardenedCuts(diff)).toEqual([["A", "B", "C"]]);
  });

  it("is empty when nothing hardened", () => {
    const diff = classifyFamilies(FX.fig4Mcs.cuts, FX.fig4McsD2.cuts);
    expect(hardenedCuts(diff)).toEqual([]);
  });
});
