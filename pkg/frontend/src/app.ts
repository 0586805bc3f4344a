/**
 * What-if explorer UI: paste a model, flip defenses, watch the cut
 * family and top-event probability respond.
 *
 * All analysis comes from the service; this module only renders state
 * held in an Explorer and wires DOM events to its operations.  Render
 * functions rebuild whole panels from state, so a failed request (which
 * rolls the state back) just re-renders to where the UI was.
 */

import { ApiError, ModelRejectedError, ServiceClient, riskLeaves } from "./api.js";
import type { CutDiff } from "./diff.js";
import { layoutGraph, parseDot, type Layout, type PlacedNode } from "./dot.js";
import { Explorer } from "./state.js";

// ----- DOM helpers -----

const $ = <T extends HTMLElement>(sel: string, ctx: ParentNode = document): T | null =>
  ctx.querySelector<T>(sel);

const escapeHtml = (value: string): string =>
  value
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");

// ----- Static skeleton -----

const SKELETON = `
  <section class="load-panel">
    <textarea data-role="model-text" rows="12" spellcheck="false"
      placeholder="Paste a model here"></textarea>
    <div class="load-row">
      <button type="button" data-role="load-btn">Load model</button>
      <span data-role="status"></span>
    </div>
    <div data-role="banner" class="banner" hidden></div>
    <div data-role="findings" class="findings" hidden></div>
  </section>
  <section data-role="model-panel" class="model-panel" hidden>
    <div class="toggles-box">
      <h2>Defenses</h2>
      <div data-role="toggles"></div>
    </div>
    <div class="cuts-box">
      <h2>Minimal cut sets</h2>
      <p data-role="cuts-summary"></p>
      <table class="cuts">
        <thead>
          <tr><th>Baseline cut</th><th>Status</th><th>Now requires</th></tr>
        </thead>
        <tbody data-role="cuts"></tbody>
      </table>
    </div>
    <div class="tree-box">
      <h2>Tree</h2>
      <div data-role="tree"></div>
    </div>
    <div class="prob-box">
      <h2>Top-event probability</h2>
      <form data-role="prob-form">
        <div class="fill-row">
          <label>Set all to
            <input data-role="prob-fill" type="text" size="6" value="0.5">
          </label>
          <button type="button" data-role="prob-fill-apply">Apply</button>
        </div>
        <div data-role="prob-fields" class="prob-fields"></div>
        <div class="mc-row">
          <label>
            <input data-role="prob-mc" type="checkbox"> Monte Carlo
          </label>
          <label>samples <input data-role="prob-samples" type="text" size="8" value="10000"></label>
          <label>seed <input data-role="prob-seed" type="text" size="6" value="1"></label>
        </div>
        <button type="submit" data-role="prob-compute">Compute</button>
      </form>
      <div data-role="prob-result" class="prob-result"></div>
    </div>
  </section>
`;

// ----- Render functions -----

function renderBanner(root: HTMLElement, message: string | null): void {
  const banner = $('[data-role="banner"]', root);
  if (banner === null) return;
  if (message === null) {
    banner.hidden = true;
    banner.textContent = "";
  } else {
    banner.hidden = false;
    banner.textContent = message;
  }
}

function renderFindings(root: HTMLElement, err: ModelRejectedError | null): void {
  const box = $('[data-role="findings"]', root);
  if (box === null) return;
  if (err === null) {
    box.hidden = true;
    box.innerHTML = "";
    return;
  }
  const items: string[] = [];
  for (const p of err.parseErrors) {
    items.push(
      `<li class="finding" data-kind="parse">line ${p.line}:${p.column} ` +
        `<code>${escapeHtml(p.code)}</code> ${escapeHtml(p.message)}</li>`,
    );
  }
  for (const v of err.violations) {
    const where = v.node === null ? "" : ` at <code>${escapeHtml(v.node)}</code>`;
    items.push(
      `<li class="finding" data-kind="violation"><code>${escapeHtml(v.code)}</code>` +
        `${where}: ${escapeHtml(v.message)}</li>`,
    );
  }
  if (err.schemaError !== null) {
    items.push(
      `<li class="finding" data-kind="schema"><code>${escapeHtml(err.schemaError.path)}</code>: ` +
        `${escapeHtml(err.schemaError.message)}</li>`,
    );
  }
  box.hidden = false;
  box.innerHTML = `<ul>${items.join("")}</ul>`;
}

function renderToggles(root: HTMLElement, explorer: Explorer): void {
  const box = $('[data-role="toggles"]', root);
  if (box === null) return;
  const rows: string[] = [];
  for (const [id, on] of explorer.defenseToggles) {
    const label = explorer.labels[id] ?? id;
    rows.push(
      `<label class="toggle"><input type="checkbox" data-role="defense-toggle" ` +
        `data-defense="${escapeHtml(id)}"${on ? " checked" : ""}> ` +
        `${escapeHtml(label)}</label>`,
    );
  }
  box.innerHTML = rows.join("");
}

function cutHtml(cut: string[], labels: Record<string, string>): string {
  return cut.map((id) => escapeHtml(labels[id] ?? id)).join(", ");
}

function renderCuts(root: HTMLElement, explorer: Explorer): void {
  const body = $('[data-role="cuts"]', root);
  const summary = $('[data-role="cuts-summary"]', root);
  if (body === null || summary === null) return;
  const diff = explorer.diff();
  const counts = { unchanged: 0, hardened: 0, removed: 0 };
  const rows = diff.map((entry: CutDiff) => {
    counts[entry.kind] += 1;
    const hardened = entry.hardenedTo
      .map((cut) => `{${cutHtml(cut, explorer.labels)}}`)
      .join(" or ");
    return (
      `<tr data-role="cut-row" data-kind="${entry.kind}" ` +
        `data-cut="${escapeHtml(entry.cut.join(" "))}">` +
        `<td>{${cutHtml(entry.cut, explorer.labels)}}</td>` +
        `<td class="kind">${entry.kind}</td>` +
        `<td>${hardened}</td></tr>`
    );
  });
  body.innerHTML = rows.join("");
  summary.textContent =
    `${diff.length} baseline cuts: ${counts.unchanged} unchanged, ` +
    `${counts.hardened} hardened, ${counts.removed} removed ` +
    `(${explorer.current.length} cuts under the current defenses)`;
}

function nodeSvg(node: PlacedNode): string {
  const fill = node.fill ?? "#ffffff";
  const { x, y } = node;
  let shape: string;
  if (node.shape === "ellipse") {
    shape = `<ellipse cx="${x}" cy="${y}" rx="38" ry="20" fill="${fill}" stroke="#333"/>`;
  } else if (node.shape === "octagon") {
    const pts = [
      [x - 24, y - 20], [x + 24, y - 20], [x + 38, y], [x + 24, y + 20],
      [x - 24, y + 20], [x - 38, y],
    ].map((p) => p.join(",")).join(" ");
    shape = `<polygon points="${pts}" fill="${fill}" stroke="#333"/>`;
  } else if (node.shape === "house") {
    const pts = [
      [x - 30, y + 20], [x - 30, y - 8], [x, y - 24], [x + 30, y - 8],
      [x + 30, y + 20],
    ].map((p) => p.join(",")).join(" ");
    shape = `<polygon points="${pts}" fill="${fill}" stroke="#333"/>`;
  } else {
    shape = `<rect x="${x - 38}" y="${y - 20}" width="76" height="40" fill="${fill}" stroke="#333"/>`;
  }
  const dy0 = node.label.length > 1 ? -4 : 4;
  const text = node.label
    .map(
      (line, i) =>
        `<tspan x="${x}" ${i === 0 ? `y="${y + dy0}"` : 'dy="14"'}>${escapeHtml(line)}</tspan>`,
    )
    .join("");
  return `<g data-node="${escapeHtml(node.id)}">${shape}` +
    `<text text-anchor="middle" font-size="12">${text}</text></g>`;
}

const EDGE_DASH: Record<string, string> = { dashed: "6 3", dotted: "2 3" };

function renderTree(root: HTMLElement, dotText: string): void {
  const box = $('[data-role="tree"]', root);
  if (box === null) return;
  if (dotText === "") {
    box.innerHTML = "";
    return;
  }
  const layout: Layout = layoutGraph(parseDot(dotText));
  const at = new Map(layout.nodes.map((n) => [n.id, n]));
  const edges = layout.edges
    .map((edge) => {
      const a = at.get(edge.from);
      const b = at.get(edge.to);
      if (a === undefined || b === undefined) return "";
      const dash = edge.style !== null ? EDGE_DASH[edge.style] : undefined;
      return (
        `<line x1="${a.x}" y1="${a.y}" x2="${b.x}" y2="${b.y}" stroke="#666"` +
        (dash !== undefined ? ` stroke-dasharray="${dash}"` : "") +
        `/>`
      );
    })
    .join("");
  const nodes = layout.nodes.map(nodeSvg).join("");
  box.innerHTML =
    `<svg data-role="tree-svg" viewBox="0 0 ${layout.width} ${layout.height}" ` +
    `width="${layout.width}" height="${layout.height}">${edges}${nodes}</svg>`;
}

function renderProbFields(root: HTMLElement, explorer: Explorer): void {
  const box = $('[data-role="prob-fields"]', root);
  if (box === null) return;
  const fields = riskLeaves(explorer.leaves).map(
    (id) =>
      `<label class="prob-field">${escapeHtml(explorer.labels[id] ?? id)} ` +
        `<input type="text" size="6" data-role="prob-input" ` +
        `data-leaf="${escapeHtml(id)}" value="0.5">` +
        `<span class="field-error" data-role="field-error" ` +
        `data-leaf="${escapeHtml(id)}" hidden></span></label>`,
  );
  box.innerHTML = fields.join("");
}

function formatProb(result: { value: number; method: string; samples?: number; std_error?: number }): string {
  let text = `${result.value.toPrecision(6)} <small>(${escapeHtml(result.method)}`;
  if (result.samples !== undefined) text += `, ${result.samples} samples`;
  if (result.std_error !== undefined) text += `, se ${result.std_error.toPrecision(3)}`;
  return `${text})</small>`;
}

function renderProbResult(
  root: HTMLElement,
  pair: { current: { value: number; method: string }; baseline: { value: number; method: string } } | null,
): void {
  const box = $('[data-role="prob-result"]', root);
  if (box === null) return;
  if (pair === null) {
    box.innerHTML = "";
    return;
  }
  box.innerHTML =
    `<dl><dt>Current defenses</dt><dd data-role="prob-current">${formatProb(pair.current)}</dd>` +
    `<dt>No defenses</dt><dd data-role="prob-baseline">${formatProb(pair.baseline)}</dd></dl>`;
}

// ----- Input validation -----

interface ProbFormValues {
  probs: Record<string, number>;
  mc: { samples: number; seed: number } | null;
}

/**
 * Read the probability form, marking each out-of-range field inline.
 * Returns null when any field is invalid; nothing is sent in that case.
 */
function readProbForm(root: HTMLElement): ProbFormValues | null {
  let ok = true;
  const probs: Record<string, number> = {};
  const errorsByLeaf = new Map<string, HTMLElement>();
  for (const span of root.querySelectorAll<HTMLElement>('[data-role="field-error"]')) {
    errorsByLeaf.set(span.dataset["leaf"] ?? "", span);
  }
  for (const input of root.querySelectorAll<HTMLInputElement>('[data-role="prob-input"]')) {
    const leaf = input.dataset["leaf"] ?? "";
    const error = errorsByLeaf.get(leaf) ?? null;
    const value = Number(input.value.trim());
    const bad = input.value.trim() === "" || !Number.isFinite(value) || value < 0 || value > 1;
    input.classList.toggle("invalid", bad);
    if (error !== null) {
      error.hidden = !bad;
      error.textContent = bad ? "must be between 0 and 1" : "";
    }
    if (bad) ok = false;
    else probs[leaf] = value;
  }

  let mc: ProbFormValues["mc"] = null;
  const mcBox = $<HTMLInputElement>('[data-role="prob-mc"]', root);
  if (mcBox !== null && mcBox.checked) {
    const samplesInput = $<HTMLInputElement>('[data-role="prob-samples"]', root);
    const seedInput = $<HTMLInputElement>('[data-role="prob-seed"]', root);
    const samples = Number(samplesInput?.value.trim() ?? "");
    const seed = Number(seedInput?.value.trim() ?? "");
    const samplesBad = !Number.isInteger(samples) || samples <= 0;
    const seedBad = !Number.isInteger(seed);
    samplesInput?.classList.toggle("invalid", samplesBad);
    seedInput?.classList.toggle("invalid", seedBad);
    if (samplesBad || seedBad) ok = false;
    else mc = { samples, seed };
  }

  return ok ? { probs, mc } : null;
}

// ----- Error presentation -----

function describeError(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  if (err instanceof TypeError) return "Service unreachable. Is it running?";
  if (err instanceof Error) return err.message;
  return String(err);
}

// ----- Wiring -----

/**
 * Build the explorer UI inside `root` and return its state object.
 * Pass a client pointed at a non-default base URL to talk to a service
 * somewhere else.
 */
export function initExplorer(
  root: HTMLElement,
  client: ServiceClient = new ServiceClient(),
): Explorer {
  const explorer = new Explorer(client);
  root.innerHTML = SKELETON;

  const status = $('[data-role="status"]', root);
  const setStatus = (text: string): void => {
    if (status !== null) status.textContent = text;
  };

  const showModel = (): void => {
    const panel = $('[data-role="model-panel"]', root);
    if (panel !== null) panel.hidden = false;
    renderToggles(root, explorer);
    renderCuts(root, explorer);
    renderTree(root, explorer.dot);
    renderProbFields(root, explorer);
    renderProbResult(root, null);
  };

  $('[data-role="load-btn"]', root)?.addEventListener("click", () => {
    const text = $<HTMLTextAreaElement>('[data-role="model-text"]', root)?.value ?? "";
    setStatus("loading…");
    void explorer
      .loadModel(text)
      .then(() => {
        renderBanner(root, null);
        renderFindings(root, null);
        showModel();
        setStatus("loaded");
      })
      .catch((err: unknown) => {
        setStatus("");
        if (err instanceof ModelRejectedError) {
          renderBanner(root, null);
          renderFindings(root, err);
        } else {
          renderFindings(root, null);
          renderBanner(root, describeError(err));
        }
      });
  });

  $('[data-role="toggles"]', root)?.addEventListener("change", (event) => {
    const target = event.target as HTMLElement | null;
    if (target === null || !(target instanceof HTMLInputElement)) return;
    const id = target.dataset["defense"];
    if (id === undefined) return;
    void explorer
      .toggleDefense(id)
      .then(() => {
        renderBanner(root, null);
        renderCuts(root, explorer);
      })
      .catch((err: unknown) => {
        renderToggles(root, explorer);
        renderBanner(root, describeError(err));
      });
  });

  $('[data-role="prob-fill-apply"]', root)?.addEventListener("click", () => {
    const fill = $<HTMLInputElement>('[data-role="prob-fill"]', root)?.value ?? "";
    for (const input of root.querySelectorAll<HTMLInputElement>('[data-role="prob-input"]')) {
      input.value = fill;
    }
  });

  $('[data-role="prob-form"]', root)?.addEventListener("submit", (event) => {
    event.preventDefault();
    const values = readProbForm(root);
    if (values === null) return;
    void explorer
      .probabilityPair(values.probs, values.mc ?? undefined)
      .then((pair) => {
        renderBanner(root, null);
        renderProbResult(root, pair);
      })
      .catch((err: unknown) => {
        renderBanner(root, describeError(err));
      });
  });

  return explorer;
}
