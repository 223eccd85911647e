import type { GroupEdge } from "./types.js";

/** Deterministic force-directed layout and size scales for the explorer.
 *
 * Pure functions: same payload in, same positions out, so tests can assert
 * on geometry. The simulation is a plain spring / repulsion / centering
 * loop run for a fixed number of steps.
 */

export interface Point {
  x: number;
  y: number;
}

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  ids: readonly string[],
  edges: readonly GroupEdge[],
  width: number,
  height: number,
  iterations = 250,
  seed = 1,
): Map<string, Point> {
  const rand = mulberry32(seed);
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) * 0.35;
  const pos = new Map<string, Point>();
  ids.forEach((id, i) => {
    // start on a circle with a little jitter so symmetric graphs still split
    const angle = (2 * Math.PI * i) / Math.max(ids.length, 1);
    pos.set(id, {
      x: cx + radius * Math.cos(angle) + (rand() - 0.5) * 10,
      y: cy + radius * Math.sin(angle) + (rand() - 0.5) * 10,
    });
  });
  if (ids.length <= 1) {
    return pos;
  }

  const maxWeight = edges.reduce((m, e) => Math.max(m, e.weight), 0) || 1;
  const springLength = radius;
  const repulsion = (radius * radius) / ids.length;

  for (let step = 0; step < iterations; step += 1) {
    const cool = 1 - step / iterations;
    const force = new Map<string, Point>();
    for (const id of ids) {
      force.set(id, { x: 0, y: 0 });
    }
    // pairwise repulsion
    for (let i = 0; i < ids.length; i += 1) {
      for (let j = i + 1; j < ids.length; j += 1) {
        const a = pos.get(ids[i]!)!;
        const b = pos.get(ids[j]!)!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        const d2 = dx * dx + dy * dy || 1e-6;
        const d = Math.sqrt(d2);
        dx /= d;
        dy /= d;
        const push = repulsion / d;
        const fa = force.get(ids[i]!)!;
        const fb = force.get(ids[j]!)!;
        fa.x += dx * push;
        fa.y += dy * push;
        fb.x -= dx * push;
        fb.y -= dy * push;
      }
    }
    // springs along edges, stiffer for heavier edges
    for (const edge of edges) {
      const a = pos.get(edge.source);
      const b = pos.get(edge.target);
      if (!a || !b) {
        continue;
      }
      let dx = b.x - a.x;
      let dy = b.y - a.y;
      const d = Math.sqrt(dx * dx + dy * dy) || 1e-3;
      dx /= d;
      dy /= d;
      const stiffness = 0.02 + 0.08 * (edge.weight / maxWeight);
      const pull = (d - springLength) * stiffness;
      const fa = force.get(edge.source)!;
      const fb = force.get(edge.target)!;
      fa.x += dx * pull;
      fa.y += dy * pull;
      fb.x -= dx * pull;
      fb.y -= dy * pull;
    }
    // gentle centering plus the cooled step
    for (const id of ids) {
      const p = pos.get(id)!;
      const f = force.get(id)!;
      f.x += (cx - p.x) * 0.01;
      f.y += (cy - p.y) * 0.01;
      const limit = 12 * cool + 0.5;
      const mag = Math.sqrt(f.x * f.x + f.y * f.y) || 1e-9;
      const scale = Math.min(mag, limit) / mag;
      p.x += f.x * scale;
      p.y += f.y * scale;
    }
  }
  // clamp into the viewport with a margin for the node circles
  for (const p of pos.values()) {
    p.x = Math.min(Math.max(p.x, 40), width - 40);
    p.y = Math.min(Math.max(p.y, 40), height - 40);
  }
  return pos;
}

/** Map values to radii in [rMin, rMax], preserving order: bigger value,
 * bigger circle. A constant input maps everything to rMin.
 */
export function radiusScale(
  values: readonly number[],
  rMin = 10,
  rMax = 30,
): (value: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo;
  return (value: number) => (span > 0 ? rMin + ((value - lo) / span) * (rMax - rMin) : rMin);
}

/** Edge stroke widths in [1, wMax], monotone in weight. */
export function strokeScale(weights: readonly number[], wMax = 6): (weight: number) => number {
  const hi = Math.max(...weights, 0);
  return (weight: number) => (hi > 0 ? 1 + (weight / hi) * (wMax - 1) : 1);
}

const PALETTE = [
  "#4e79a7",
  "#f28e2b",
  "#e15759",
  "#76b7b2",
  "#59a14f",
  "#edc948",
  "#b07aa1",
  "#ff9da7",
  "#9c755f",
  "#bab0ac",
];

/** Stable group -> color assignment: sorted group order indexes the palette. */
export function colorFor(groups: readonly string[]): (group: string) => string {
  const ordered = [...groups].sort();
  const index = new Map(ordered.map((g, i) => [g, i]));
  return (group: string) => PALETTE[(index.get(group) ?? 0) % PALETTE.length]!;
}
