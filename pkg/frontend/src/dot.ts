/**
 * Reader and layout for the service's DOT rendering of a model.
 *
 * The service emits a small, regular subset of DOT (one node or edge
 * statement per line, double-quoted ids, bracketed attribute lists), so a
 * line scanner is enough; this is not a general DOT parser.  Layout is
 * client-side: nodes are layered by distance from the root and spread
 * evenly within each layer, which suits trees and the near-trees that
 * shared subtrees produce.
 */

export interface DotNode {
  id: string;
  /** Multi-line label; the service separates lines with literal \n. */
  label: string[];
  shape: string;
  fill: string | null;
}

export interface DotEdge {
  from: string;
  to: string;
  style: string | null;
}

export interface DotGraph {
  nodes: DotNode[];
  edges: DotEdge[];
}

export interface PlacedNode extends DotNode {
  x: number;
  y: number;
}

export interface Layout {
  nodes: PlacedNode[];
  edges: DotEdge[];
  width: number;
  height: number;
}

const NODE_RE = /^"((?:[^"\\]|\\.)*)"\s*\[(.*)\];$/;
const EDGE_RE = /^"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"(?:\s*\[(.*)\])?;$/;
const ATTR_RE = /(\w+)=(?:"((?:[^"\\]|\\.)*)"|([^,\]\s]+))/g;

const unescape = (raw: string): string =>
  raw.replace(/\\(.)/g, (_, ch: string) => (ch === "n" ? "\n" : ch));

function readAttrs(raw: string): Map<string, string> {
  const attrs = new Map<string, string>();
  for (const m of raw.matchAll(ATTR_RE)) {
    const quoted = m[2];
    const bare = m[3];
    attrs.set(m[1] ?? "", unescape(quoted ?? bare ?? ""));
  }
  return attrs;
}

export function parseDot(text: string): DotGraph {
  const nodes: DotNode[] = [];
  const edges: DotEdge[] = [];
  for (const rawLine of text.split("\n")) {
    const line = rawLine.trim();
    const edge = EDGE_RE.exec(line);
    if (edge !== null) {
      const attrs = readAttrs(edge[3] ?? "");
      edges.push({
        from: unescape(edge[1] ?? ""),
        to: unescape(edge[2] ?? ""),
        style: attrs.get("style") ?? null,
      });
      continue;
    }
    const node = NODE_RE.exec(line);
    if (node !== null) {
      const attrs = readAttrs(node[2] ?? "");
      const id = unescape(node[1] ?? "");
      nodes.push({
        id,
        label: (attrs.get("label") ?? id).split("\n"),
        shape: attrs.get("shape") ?? "box",
        fill: attrs.get("fillcolor") ?? null,
      });
    }
  }
  return { nodes, edges };
}

/** Nodes with no incoming edge, i.e. the top event(s). */
function roots(graph: DotGraph): string[] {
  const targets = new Set(graph.edges.map((e) => e.to));
  return graph.nodes.filter((n) => !targets.has(n.id)).map((n) => n.id);
}

/**
 * Place nodes on a grid: depth (longest distance from a root) picks the
 * row, and each row spreads its nodes evenly across the width.
 */
export function layoutGraph(
  graph: DotGraph,
  opts: { columnWidth?: number; rowHeight?: number } = {},
): Layout {
  const columnWidth = opts.columnWidth ?? 110;
  const rowHeight = opts.rowHeight ?? 90;

  const children = new Map<string, string[]>();
  for (const edge of graph.edges) {
    const kids = children.get(edge.from);
    if (kids === undefined) children.set(edge.from, [edge.to]);
    else kids.push(edge.to);
  }

  const depth = new Map<string, number>();
  const queue = roots(graph).map((id) => ({ id, d: 0 }));
  while (queue.length > 0) {
    const item = queue.shift();
    if (item === undefined) break;
    // Depth can never exceed the node count in an acyclic graph; the cap
    // keeps a malformed (cyclic) input from looping forever.
    if (item.d > graph.nodes.length) continue;
    const known = depth.get(item.id);
    if (known !== undefined && known >= item.d) continue;
    depth.set(item.id, item.d);
    for (const kid of children.get(item.id) ?? []) {
      queue.push({ id: kid, d: item.d + 1 });
    }
  }

  const rows = new Map<number, DotNode[]>();
  let maxDepth = 0;
  for (const node of graph.nodes) {
    const d = depth.get(node.id) ?? 0;
    maxDepth = Math.max(maxDepth, d);
    const row = rows.get(d);
    if (row === undefined) rows.set(d, [node]);
    else row.push(node);
  }

  const widest = Math.max(1, ...[...rows.values()].map((r) => r.length));
  const width = widest * columnWidth;
  const height = (maxDepth + 1) * rowHeight;

  const placed: PlacedNode[] = [];
  for (const [d, row] of rows) {
    const step = width / (row.length + 1);
    row.forEach((node, i) => {
      placed.push({
        ...node,
        x: Math.round(step * (i + 1)),
        y: Math.round(rowHeight * (d + 0.5)),
      });
    });
  }
  placed.sort((a, b) => a.y - b.y || a.x - b.x);
  return { nodes: placed, edges: graph.edges, width, height };
}
