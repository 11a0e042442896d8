// Display-only reader for the service's render_dot text. The service is
// the source of truth for all semantics; this module only recovers the
// edge list (and nothing else) so the SVG renderer can draw it. Lines the
// emitter writes for loop badges are intentionally ignored — badges come
// from the structured `loops` field of the response.

export type Polarity = "positive" | "negative";

export interface EdgeSpec {
  source: string;
  target: string;
  polarity: Polarity;
}

const EDGE_LINE =
  /^\s*"((?:[^"\\]|\\.)*)"\s*->\s*"((?:[^"\\]|\\.)*)"\s*\[\s*arrowhead\s*=\s*(vee|tee)\s*\]\s*;?\s*$/;

function unescapeName(raw: string): string {
  return raw.replace(/\\(.)/g, "$1");
}

/** Edges in emission order; non-edge lines (header, badges, comments) are skipped. */
export function readEdges(renderDot: string | null): EdgeSpec[] {
  if (!renderDot) return [];
  const edges: EdgeSpec[] = [];
  for (const line of renderDot.split("\n")) {
    const match = EDGE_LINE.exec(line);
    if (!match) continue;
    edges.push({
      source: unescapeName(match[1]),
      target: unescapeName(match[2]),
      polarity: match[3] === "vee" ? "positive" : "negative",
    });
  }
  return edges;
}

/** Case/whitespace-insensitive key so raw spellings compare like the service's. */
export function nameKey(name: string): string {
  return name.trim().replace(/\s+/g, " ").toLowerCase();
}

/** NUL cannot survive nameKey's whitespace handling or appear in DOT names,
 *  so it is a collision-free separator between the two endpoint keys. */
export function edgeKey(source: string, target: string): string {
  return `${nameKey(source)}\u0000${nameKey(target)}`;
}
