/**
 * Wire types for the analysis service.
 *
 * These mirror the JSON bodies byte-for-byte; the explorer never derives
 * analysis results itself, so every field here is service-owned.
 */

/** Leaf ids grouped by kind, as returned by a model upload. */
export interface LeafPartition {
  bas: string[];
  bcf: string[];
  bds: string[];
}

/** Successful POST /models response. */
export interface UploadResult {
  token: string;
  leaves: LeafPartition;
  /** Display labels for leaves whose label differs from the id. */
  labels: Record<string, string>;
  violations: Violation[];
}

/** One structural rule violation (422 body and upload echo). */
export interface Violation {
  code: string;
  node: string | null;
  message: string;
}

/** One positioned parse error from a 422 body. */
export interface ParseErrorEntry {
  line: number;
  column: number;
  length: number;
  code: string;
  message: string;
}

/** JSON-document schema complaint from a 422 body. */
export interface SchemaErrorEntry {
  path: string;
  message: string;
}

/** GET /models/{token}/mcs response. */
export interface McsFamily {
  defense: string[];
  cuts: string[][];
}

/** One row of GET /models/{token}/impact. */
export interface ImpactEntry {
  mcs: string[];
  neutralizing: string[][];
  eradicating: string[][];
  hardened_by: { defense: string[]; cuts: string[][] }[];
}

/** POST /models/{token}/probability response. */
export interface ProbResult {
  value: number;
  method: "exact" | "monte_carlo";
  samples?: number;
  std_error?: number;
  seed?: number;
}

/** Monte-Carlo knobs for a probability request; omit for exact. */
export interface McOptions {
  samples: number;
  seed: number;
}
