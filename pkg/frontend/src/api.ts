/**
 * HTTP client for the analysis service.
 *
 * Every failure body except model findings is the uniform envelope
 * {"error": {"code", "message"}} and surfaces as ApiError.  Model findings
 * (parse errors, structural violations, schema complaints) keep their
 * structured 422 shapes and surface as ModelRejectedError so the UI can
 * point at the offending statement.  Network-level failures are left to
 * the caller; fetch rejects with TypeError when the service is down.
 */

import type {
  LeafPartition,
  McOptions,
  McsFamily,
  ImpactEntry,
  ParseErrorEntry,
  ProbResult,
  SchemaErrorEntry,
  UploadResult,
  Violation,
} from "./types.js";

export const DEFAULT_BASE_URL = "http://localhost:8741";

/** Non-2xx response carrying the {"error": {code, message}} envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** 422 on upload: the model text was understood but rejected. */
export class ModelRejectedError extends Error {
  constructor(
    readonly parseErrors: ParseErrorEntry[],
    readonly violations: Violation[],
    readonly schemaError: SchemaErrorEntry | null,
  ) {
    super("model rejected");
    this.name = "ModelRejectedError";
  }
}

async function raiseFor(response: Response): Promise<never> {
  let body: unknown = null;
  try {
    body = await response.json();
  } catch {
    throw new ApiError(response.status, "ERROR", response.statusText);
  }
  const doc = body as Record<string, unknown>;
  if (doc && typeof doc === "object") {
    if ("parse_errors" in doc || "violations" in doc || "schema_error" in doc) {
      throw new ModelRejectedError(
        (doc.parse_errors as ParseErrorEntry[]) ?? [],
        (doc.violations as Violation[]) ?? [],
        (doc.schema_error as SchemaErrorEntry) ?? null,
      );
    }
    const envelope = doc.error as { code?: string; message?: string } | undefined;
    if (envelope && typeof envelope.code === "string") {
      throw new ApiError(response.status, envelope.code, envelope.message ?? "");
    }
  }
  throw new ApiError(response.status, "ERROR", response.statusText);
}

export class ServiceClient {
  constructor(readonly baseUrl: string = DEFAULT_BASE_URL) {}

  private url(path: string, defense?: string[]): string {
    const base = `${this.baseUrl}${path}`;
    if (!defense || defense.length === 0) return base;
    return `${base}?defenses=${encodeURIComponent(defense.join(","))}`;
  }

  private async getJson<T>(path: string, defense?: string[]): Promise<T> {
    const response = await fetch(this.url(path, defense));
    if (!response.ok) await raiseFor(response);
    return response.json() as Promise<T>;
  }

  private async postJson<T>(path: string, payload: unknown): Promise<T> {
    const response = await fetch(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!response.ok) await raiseFor(response);
    return response.json() as Promise<T>;
  }

  /** Upload model text (.afdt DSL or JSON document) for this session. */
  async uploadModel(text: string): Promise<UploadResult> {
    const response = await fetch(this.url("/models"), {
      method: "POST",
      headers: { "Content-Type": "text/plain" },
      body: text,
    });
    if (!response.ok) await raiseFor(response);
    return response.json() as Promise<UploadResult>;
  }

  /** Minimal cut sets with the given defense subset deployed. */
  fetchMcs(token: string, defense: string[]): Promise<McsFamily> {
    return this.getJson(`/models/${token}/mcs`, defense);
  }

  /** Per-cut neutralizing/eradicating/hardening defense sets. */
  async fetchImpact(token: string): Promise<ImpactEntry[]> {
    const doc = await this.getJson<{ entries: ImpactEntry[] }>(
      `/models/${token}/impact`,
    );
    return doc.entries;
  }

  /**
   * Evaluate the TLE for one assignment of active leaves.  Deployed
   * defenses are active BDS leaves; there is no separate deployment
   * parameter on this endpoint.
   */
  async evaluate(token: string, active: string[]): Promise<boolean> {
    const doc = await this.postJson<{ tle: boolean }>(
      `/models/${token}/evaluate`,
      { active },
    );
    return doc.tle;
  }

  /** TLE probability; exact unless Monte-Carlo options are given. */
  probability(
    token: string,
    probs: Record<string, number>,
    defense: string[],
    mc?: McOptions,
  ): Promise<ProbResult> {
    const payload: Record<string, unknown> = { probs, defenses: defense };
    if (mc) {
      payload.mc = mc.samples;
      payload.seed = mc.seed;
    }
    return this.postJson(`/models/${token}/probability`, payload);
  }

  /** Graphviz DOT text for the model. */
  async fetchDot(token: string): Promise<string> {
    const response = await fetch(this.url(`/models/${token}/dot`));
    if (!response.ok) await raiseFor(response);
    return response.text();
  }
}

/** Leaf ids that can carry a probability (everything but defenses). */
export function riskLeaves(leaves: LeafPartition): string[] {
  return [...leaves.bas, ...leaves.bcf].sort();
}
