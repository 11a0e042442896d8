// SVG renderer for causal loop diagrams: circle layout, curved edges with
// hand-drawn arrowheads (vee for positive, tee for negative), loop badges,
// and pan/zoom on the viewport group. No external drawing library — the
// diagrams are small and the explicit SVG keeps the comparison styling and
// the end-to-end assertions straightforward.

import type { ComparisonOverlay } from "./compare";
import { edgeKey, nameKey, type EdgeSpec, type Polarity } from "./dot";
import {
  bezierPoint,
  centroid,
  circleLayout,
  edgeControl,
  type Point,
} from "./layout";
import type { LoopInfo } from "./types";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_RX = 62;
const NODE_RY = 30;

export interface RenderInput {
  variables: string[];
  edges: EdgeSpec[];
  loops: LoopInfo[];
  overlay?: ComparisonOverlay;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

function wrapLabel(text: SVGTextElement, name: string, x: number, y: number): void {
  const words = name.split(" ");
  const lines: string[] = [];
  let current = "";
  for (const word of words) {
    const candidate = current ? `${current} ${word}` : word;
    if (candidate.length > 14 && current) {
      lines.push(current);
      current = word;
    } else {
      current = candidate;
    }
  }
  if (current) lines.push(current);
  const lineHeight = 14;
  const startY = y - ((lines.length - 1) * lineHeight) / 2;
  lines.forEach((line, i) => {
    const tspan = svgEl("tspan", { x: String(x), y: String(startY + i * lineHeight) });
    tspan.textContent = line;
    text.appendChild(tspan);
  });
}

/** Arrowhead drawn as explicit segments so it inherits the edge's styling. */
function arrowhead(tip: Point, approach: Point, polarity: Polarity): SVGGElement {
  const angle = Math.atan2(tip.y - approach.y, tip.x - approach.x);
  const group = svgEl("g", { class: "arrowhead" });
  const size = 11;
  if (polarity === "positive") {
    for (const spread of [-0.45, 0.45]) {
      const back = angle + Math.PI + spread;
      const line = svgEl("line", {
        x1: String(tip.x),
        y1: String(tip.y),
        x2: String(tip.x + size * Math.cos(back)),
        y2: String(tip.y + size * Math.sin(back)),
      });
      group.appendChild(line);
    }
  } else {
    const perp = angle + Math.PI / 2;
    const line = svgEl("line", {
      x1: String(tip.x + size * Math.cos(perp)),
      y1: String(tip.y + size * Math.sin(perp)),
      x2: String(tip.x - size * Math.cos(perp)),
      y2: String(tip.y - size * Math.sin(perp)),
    });
    group.appendChild(line);
  }
  return group;
}

/** Trim the curve so endpoints sit on the node boundary, not the center. */
function boundaryT(from: Point, control: Point, to: Point, atStart: boolean): number {
  // walk t until the point leaves the endpoint's ellipse
  for (let step = 1; step <= 40; step++) {
    const t = atStart ? step / 100 : 1 - step / 100;
    const p = bezierPoint(from, control, to, t);
    const anchor = atStart ? from : to;
    const dx = (p.x - anchor.x) / (NODE_RX + 6);
    const dy = (p.y - anchor.y) / (NODE_RY + 6);
    if (dx * dx + dy * dy >= 1) return t;
  }
  return atStart ? 0.3 : 0.7;
}

function drawEdge(
  parent: SVGGElement,
  edge: EdgeSpec,
  from: Point,
  to: Point,
  cssClass: string,
): void {
  const control = edgeControl(from, to);
  const t0 = boundaryT(from, control, to, true);
  const t1 = boundaryT(from, control, to, false);
  const start = bezierPoint(from, control, to, t0);
  const end = bezierPoint(from, control, to, t1);
  const nearEnd = bezierPoint(from, control, to, Math.max(t0, t1 - 0.05));

  const group = svgEl("g", {
    class: cssClass,
    "data-source": edge.source,
    "data-target": edge.target,
    "data-polarity": edge.polarity,
  });
  const path = svgEl("path", {
    d: `M ${start.x.toFixed(1)} ${start.y.toFixed(1)} Q ${control.x.toFixed(1)} ${control.y.toFixed(1)} ${end.x.toFixed(1)} ${end.y.toFixed(1)}`,
    fill: "none",
  });
  group.appendChild(path);
  group.appendChild(arrowhead(end, nearEnd, edge.polarity));

  const mid = bezierPoint(from, control, to, (t0 + t1) / 2);
  const sign = svgEl("text", {
    class: "edge-sign",
    x: String(mid.x + 10),
    y: String(mid.y - 6),
  });
  sign.textContent = edge.polarity === "positive" ? "+" : "−";
  group.appendChild(sign);
  parent.appendChild(group);
}

function loopBadgeLabels(loops: LoopInfo[]): string[] {
  let reinforcing = 0;
  let balancing = 0;
  return loops.map((loop) =>
    loop.kind === "Reinforcing" ? `R${++reinforcing}` : `B${++balancing}`,
  );
}

export function renderDiagram(container: HTMLElement, input: RenderInput): SVGSVGElement {
  container.textContent = "";

  const overlay = input.overlay;
  const ghostNames = (overlay?.unmatchedTruth ?? []).filter(
    (name) => !input.variables.some((v) => nameKey(v) === nameKey(name)),
  );
  const nodeNames = [...input.variables, ...ghostNames];
  const layout = circleLayout(nodeNames.map(nameKey));
  const positionOf = (name: string): Point =>
    layout.positions.get(nameKey(name)) ?? { x: layout.width / 2, y: layout.height / 2 };

  const svg = svgEl("svg", {
    class: "diagram",
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    role: "img",
  });
  const viewport = svgEl("g", { class: "viewport", transform: "translate(0 0) scale(1)" });
  svg.appendChild(viewport);

  const edgeLayer = svgEl("g", { class: "edges" });
  viewport.appendChild(edgeLayer);

  for (const edge of input.edges) {
    const byOverlay = overlay?.edgeClasses.get(edgeKey(edge.source, edge.target));
    const cssClass = byOverlay ? `edge cmp-${byOverlay}` : "edge";
    drawEdge(edgeLayer, edge, positionOf(edge.source), positionOf(edge.target), cssClass);
  }
  for (const edge of overlay?.missingEdges ?? []) {
    drawEdge(edgeLayer, edge, positionOf(edge.source), positionOf(edge.target), "edge cmp-missing");
  }

  const nodeLayer = svgEl("g", { class: "nodes" });
  viewport.appendChild(nodeLayer);
  for (const name of nodeNames) {
    const ghost = ghostNames.includes(name);
    const unmatched = overlay?.unmatchedGenerated.has(nameKey(name)) ?? false;
    const classes = ["node"];
    if (ghost) classes.push("cmp-ghost");
    if (unmatched) classes.push("cmp-unmatched");
    const { x, y } = positionOf(name);
    const group = svgEl("g", { class: classes.join(" "), "data-name": name });
    group.appendChild(
      svgEl("ellipse", { cx: String(x), cy: String(y), rx: String(NODE_RX), ry: String(NODE_RY) }),
    );
    const label = svgEl("text", { "text-anchor": "middle" });
    wrapLabel(label, name, x, y + 4);
    group.appendChild(label);
    nodeLayer.appendChild(group);
  }

  const badgeLayer = svgEl("g", { class: "badges" });
  viewport.appendChild(badgeLayer);
  const center: Point = { x: layout.width / 2, y: layout.height / 2 };
  const labels = loopBadgeLabels(input.loops);
  input.loops.forEach((loop, i) => {
    const mid = centroid(loop.members.map(positionOf));
    // pull the badge toward the middle so it clears the nodes on the rim
    const x = mid.x + (center.x - mid.x) * 0.35;
    const y = mid.y + (center.y - mid.y) * 0.35;
    const kindClass = loop.kind === "Reinforcing" ? "reinforcing" : "balancing";
    const group = svgEl("g", {
      class: `loop-badge ${kindClass}`,
      "data-members": loop.members.join(" | "),
    });
    group.appendChild(svgEl("circle", { cx: String(x), cy: String(y), r: "16" }));
    const text = svgEl("text", { x: String(x), y: String(y + 5), "text-anchor": "middle" });
    text.textContent = labels[i];
    group.appendChild(text);
    badgeLayer.appendChild(group);
  });

  attachPanZoom(svg, viewport);
  container.appendChild(svg);
  return svg;
}

function attachPanZoom(svg: SVGSVGElement, viewport: SVGGElement): void {
  let scale = 1;
  let tx = 0;
  let ty = 0;
  let dragging = false;
  let lastX = 0;
  let lastY = 0;

  const apply = () => {
    viewport.setAttribute(
      "transform",
      `translate(${tx.toFixed(1)} ${ty.toFixed(1)}) scale(${scale.toFixed(3)})`,
    );
  };

  svg.addEventListener("wheel", (event) => {
    event.preventDefault();
    const factor = Math.exp(-event.deltaY * 0.0012);
    scale = Math.min(8, Math.max(0.2, scale * factor));
    apply();
  });
  svg.addEventListener("pointerdown", (event) => {
    dragging = true;
    lastX = event.clientX;
    lastY = event.clientY;
  });
  svg.addEventListener("pointermove", (event) => {
    if (!dragging) return;
    tx += event.clientX - lastX;
    ty += event.clientY - lastY;
    lastX = event.clientX;
    lastY = event.clientY;
    apply();
  });
  const stop = () => {
    dragging = false;
  };
  svg.addEventListener("pointerup", stop);
  svg.addEventListener("pointerleave", stop);
}
