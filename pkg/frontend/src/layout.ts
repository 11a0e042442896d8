// Circle layout: good enough for the small diagrams this tool works with
// (the bundled corpus tops out at eleven links) and fully deterministic,
// which keeps snapshots and end-to-end assertions stable.

export interface Point {
  x: number;
  y: number;
}

export interface Layout {
  positions: Map<string, Point>;
  width: number;
  height: number;
}

const NODE_SPACING = 150;
const MIN_RADIUS = 120;
const MARGIN = 110;

export function circleLayout(nodeKeys: string[]): Layout {
  const count = nodeKeys.length;
  const positions = new Map<string, Point>();
  if (count === 0) {
    return { positions, width: 2 * MARGIN, height: 2 * MARGIN };
  }
  const radius = Math.max(MIN_RADIUS, (NODE_SPACING * count) / (2 * Math.PI));
  const cx = radius + MARGIN;
  const cy = radius + MARGIN;
  nodeKeys.forEach((key, i) => {
    // start at 12 o'clock, clockwise
    const angle = -Math.PI / 2 + (2 * Math.PI * i) / count;
    positions.set(key, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  return { positions, width: 2 * (radius + MARGIN), height: 2 * (radius + MARGIN) };
}

/**
 * Quadratic-bezier control point for an edge, bowed to one side so that a
 * pair of opposite edges between the same two nodes does not overlap.
 */
export function edgeControl(from: Point, to: Point, bend = 0.18): Point {
  const mx = (from.x + to.x) / 2;
  const my = (from.y + to.y) / 2;
  const dx = to.x - from.x;
  const dy = to.y - from.y;
  return { x: mx - dy * bend, y: my + dx * bend };
}

/** Point at parameter t on the quadratic bezier (from, control, to). */
export function bezierPoint(from: Point, control: Point, to: Point, t: number): Point {
  const u = 1 - t;
  return {
    x: u * u * from.x + 2 * u * t * control.x + t * t * to.x,
    y: u * u * from.y + 2 * u * t * control.y + t * t * to.y,
  };
}

export function centroid(points: Point[]): Point {
  if (points.length === 0) return { x: 0, y: 0 };
  const sx = points.reduce((acc, p) => acc + p.x, 0);
  const sy = points.reduce((acc, p) => acc + p.y, 0);
  return { x: sx / points.length, y: sy / points.length };
}
