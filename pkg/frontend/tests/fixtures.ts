/**
 * Test doubles built around frozen service responses.
 *
 * fixtures/service.json holds byte-for-byte captures from a live service
 * (tokens normalized), so every stubbed reply in these tests is a real
 * wire shape.  FakeService replays them through a fetch-compatible
 * dispatcher; tests prime it with the families and probabilities the
 * scenario needs and can inject one-shot failures.
 */

import raw from "./fixtures/service.json";
import type { ImpactEntry, McsFamily, ProbResult, UploadResult } from "../src/types.js";

// ----- Typed fixture accessors -----

export const FX = {
  gsaasUpload: raw.gsaas_upload as UploadResult,
  gsaasMcs: raw.gsaas_mcs as McsFamily,
  gsaasMcsSeg: raw.gsaas_mcs_seg as McsFamily,
  gsaasDot: raw.gsaas_dot,
  fig4Upload: raw.fig4_upload as UploadResult,
  fig4Mcs: raw.fig4_mcs as McsFamily,
  fig4McsD1: raw.fig4_mcs_d1 as McsFamily,
  fig4McsD2: raw.fig4_mcs_d2 as McsFamily,
  fig4McsD1D2: raw.fig4_mcs_d1d2 as McsFamily,
  fig4Dot: raw.fig4_dot,
  fig4ProbExact: raw.fig4_prob_exact as ProbResult,
  fig4ProbD1Exact: raw.fig4_prob_d1_exact as ProbResult,
  fig4ProbD1Mc: raw.fig4_prob_d1_mc as ProbResult,
  fig4Impact: raw.fig4_impact as { entries: ImpactEntry[] },
  fig3Upload: raw.fig3_upload as UploadResult,
  fig3Mcs: raw.fig3_mcs as McsFamily,
  fig3ProbExact: raw.fig3_prob_exact as ProbResult,
  parseError422: raw.parse_error_422,
  unknownDefense400: raw.unknown_defense_400,
  unknownModel404: raw.unknown_model_404,
};

// ----- Model texts as a user would paste them -----

export const FIG4_TEXT = `// The toy tree extended with defenses.  D1 guards the AND branch but is
// itself knocked out when component C3 fails; D2 guards the voting branch
// unconditionally.
toplevel TLE;
TLE or I1 I2;
I1 inh event=G1 defense=D1 disabler=C3;
I2 inh event=G2 defense=D2;
G1 and C1 A1;
G2 vot 2 of A1 A2 C2;
A1 bas;
A2 bas;
C1 bcf;
C2 bcf;
C3 bcf;
D1 bds;
D2 bds;
`;

export const GSAAS_TEXT = `// Ground segment as a service: the top event is loss of correct and
// reliable mission execution.  Risks range from unintentional user errors
// to credential theft; eight defenses guard specific branches.
toplevel TLE;
TLE or UU COGS G_MITM G_DDOS HE G_SCA IA G_BUG Malware G_VFCD G_CI G_AS G_CRED;

// Attacks stopped by a single deployed defense.
G_MITM inh event=MITM defense=E2E;
G_DDOS inh event=DDoS defense=DP;
G_CI inh event=CI defense=Auth;
G_BUG inh event=Bug defense=TSA;

// Side-channel analysis needs data-storage separation plus either secure
// cryptographic storage or time-stamped auditing.
G_SCA inh event=SCA defense=SCA_DEF;
SCA_DEF and DST SCA_ALT;
SCA_ALT or SCS TSA;

// Verification failure only matters together with a configuration defect.
G_VFCD and VF CD;

// Any two antenna sites failing together degrade coverage; network
// segmentation contains the blast radius.
G_AS inh event=AS_ANY2 defense=Seg;
AS_ANY2 vot 2 of AS1 AS2 AS3 AS4 AS5;

// Credential theft: password and username capture plus a human error.
// The human error here is a second, independent instance of HE.
G_CRED inh event=CRED defense=MFA;
CRED and Pass Uname HE2;

UU bcf;
COGS bcf;
HE bcf;
Bug bcf;
VF bcf;
CD bcf;
HE2 bcf label="HE";
MITM bas;
DDoS bas;
SCA bas;
IA bas;
Malware bas;
CI bas;
AS1 bas;
AS2 bas;
AS3 bas;
AS4 bas;
AS5 bas;
Pass bas;
Uname bas;
E2E bds;
DP bds;
SCS bds;
DST bds;
TSA bds;
Auth bds;
Seg bds;
MFA bds;
`;

// ----- Fetch stub -----

export interface StubReply {
  status: number;
  json?: unknown;
  text?: string;
}

export interface RecordedRequest {
  method: string;
  url: string;
  body: unknown;
}

interface ScriptedReply {
  method: string;
  pathIncludes: string;
  reply: StubReply | "network";
}

/** Just enough of a Response for the client: status flags, json(), text(). */
export const stubResponse = (reply: StubReply): Response => {
  const body = reply.text ?? JSON.stringify(reply.json ?? null);
  const isJson = reply.text === undefined;
  return {
    ok: reply.status >= 200 && reply.status < 300,
    status: reply.status,
    statusText: String(reply.status),
    json: () =>
      isJson ? Promise.resolve(reply.json) : Promise.reject(new SyntaxError("not json")),
    text: () => Promise.resolve(body),
  } as unknown as Response;
};

const defenseSetKey = (ids: Iterable<string>): string => [...ids].sort().join(",");

/**
 * In-memory stand-in for the analysis service.  Prime `uploads` with
 * model text -> reply, `families` via primeModel, and probability
 * replies via primeProbability; then install `service.fetch` as the
 * global fetch.  Unprimed routes throw, so a test that drifts from the
 * service surface fails loudly instead of silently passing.
 */
export class FakeService {
  uploads = new Map<string, StubReply>();
  private families = new Map<string, Map<string, McsFamily>>();
  private dots = new Map<string, string>();
  private probReplies = new Map<string, Map<string, StubReply>>();
  private scripted: ScriptedReply[] = [];
  requests: RecordedRequest[] = [];

  /** Register a model: its upload reply, cut families, and rendering. */
  primeModel(text: string, upload: UploadResult, families: McsFamily[], dot: string): void {
    this.uploads.set(text, { status: 201, json: upload });
    const byDefense = new Map<string, McsFamily>();
    for (const family of families) {
      byDefense.set(defenseSetKey(family.defense), family);
    }
    this.families.set(upload.token, byDefense);
    this.dots.set(upload.token, dot);
  }

  primeProbability(token: string, defense: string[], reply: StubReply): void {
    let byDefense = this.probReplies.get(token);
    if (byDefense === undefined) {
      byDefense = new Map();
      this.probReplies.set(token, byDefense);
    }
    byDefense.set(defenseSetKey(defense), reply);
  }

  /**
   * Script the next matching request: serve `reply` (or throw fetch's
   * TypeError for "network") instead of the primed route.  Used for
   * injected failures and for endpoints with no standing route.
   */
  respondOnce(method: string, pathIncludes: string, reply: StubReply | "network"): void {
    this.scripted.push({ method, pathIncludes, reply });
  }

  requestCount(pathIncludes: string): number {
    return this.requests.filter((r) => r.url.includes(pathIncludes)).length;
  }

  readonly fetch = async (input: RequestInfo | URL, init?: RequestInit): Promise<Response> => {
    const url = new URL(String(input));
    const method = (init?.method ?? "GET").toUpperCase();
    const rawBody = typeof init?.body === "string" ? init.body : null;
    this.requests.push({ method, url: url.pathname + url.search, body: rawBody });

    const scriptedAt = this.scripted.findIndex(
      (s) => s.method === method && url.pathname.includes(s.pathIncludes),
    );
    if (scriptedAt !== -1) {
      const [script] = this.scripted.splice(scriptedAt, 1);
      if (script === undefined || script.reply === "network") {
        throw new TypeError("fetch failed");
      }
      return stubResponse(script.reply);
    }

    if (method === "POST" && url.pathname === "/models") {
      const reply = this.uploads.get(rawBody ?? "");
      return stubResponse(
        reply ?? { status: 422, json: FX.parseError422 },
      );
    }

    const route = /^\/models\/([^/]+)\/(mcs|dot|probability)$/.exec(url.pathname);
    if (route === null) throw new Error(`unprimed route: ${method} ${url.pathname}`);
    const token = route[1] ?? "";
    const endpoint = route[2] ?? "";

    if (!this.families.has(token)) {
      return stubResponse({ status: 404, json: FX.unknownModel404 });
    }

    if (endpoint === "mcs" && method === "GET") {
      const param = url.searchParams.get("defenses") ?? "";
      const ids = param === "" ? [] : param.split(",");
      const family = this.families.get(token)?.get(defenseSetKey(ids));
      if (family === undefined) {
        throw new Error(`unprimed mcs for token ${token} defenses [${param}]`);
      }
      return stubResponse({ status: 200, json: family });
    }

    if (endpoint === "dot" && method === "GET") {
      return stubResponse({ status: 200, text: this.dots.get(token) ?? "" });
    }

    if (endpoint === "probability" && method === "POST") {
      const payload = JSON.parse(rawBody ?? "{}") as { defenses?: string[] };
      const reply = this.probReplies
        .get(token)
        ?.get(defenseSetKey(payload.defenses ?? []));
      if (reply === undefined) {
        throw new Error(`unprimed probability for token ${token}`);
      }
      return stubResponse(reply);
    }

    throw new Error(`unprimed route: ${method} ${url.pathname}`);
  };
}

/** FakeService preloaded with every fixture model. */
export function fullService(): FakeService {
  const service = new FakeService();
  service.primeModel(GSAAS_TEXT, FX.gsaasUpload, [FX.gsaasMcs, FX.gsaasMcsSeg], FX.gsaasDot);
  service.primeModel(
    FIG4_TEXT,
    FX.fig4Upload,
    [FX.fig4Mcs, FX.fig4McsD1, FX.fig4McsD2, FX.fig4McsD1D2],
    FX.fig4Dot,
  );
  return service;
}

// ----- Manual promise control for race tests -----

export class Deferred<T> {
  resolve!: (value: T) => void;
  reject!: (reason?: unknown) => void;
  readonly promise: Promise<T>;

  constructor() {
    this.promise = new Promise<T>((resolve, reject) => {
      this.resolve = resolve;
      this.reject = reject;
    });
  }
}
