// Historiograph canvas rendering.
//
// Scene building is pure: frame + viewport in, drawable primitives out.
// Publications are circles (squares when marked), red-bordered when
// selected, filled with their group color (grey when ungrouped); citation
// relations are quadratic arcs bowing sideways; labels are the first
// author's last name, drawn greedily by descending internal score and
// skipped when they would overlap an already-drawn label, so zooming in
// reveals more of them.

import type { Frame } from "./types.js";

export interface Viewport {
  zoom: number;   // 1 = fit; clamped to [MIN_ZOOM, MAX_ZOOM]
  panX: number;   // world-units offset of the view center
  panY: number;
}

export const MIN_ZOOM = 0.5;
export const MAX_ZOOM = 16;

export interface SceneNode {
  id: string;
  x: number;      // screen coords
  y: number;
  marked: boolean;
  selected: boolean;
  group: number | null;
  score: number;
}

export interface SceneEdge {
  x1: number; y1: number;
  cx: number; cy: number;
  x2: number; y2: number;
}

export interface SceneLabel {
  text: string;
  x: number;
  y: number;
  box: [number, number, number, number]; // left, top, right, bottom
}

export interface YearTick {
  year: number;
  y: number;
}

export interface Scene {
  nodes: SceneNode[];
  edges: SceneEdge[];
  labels: SceneLabel[];
  yearTicks: YearTick[];
}

// Subset of CanvasRenderingContext2D the renderer needs; tests substitute a
// recording implementation, the browser context satisfies it structurally.
export interface Draw2D {
  clearRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  rect(x: number, y: number, w: number, h: number): void;
  moveTo(x: number, y: number): void;
  quadraticCurveTo(cx: number, cy: number, x: number, y: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  font: string;
  textAlign: CanvasTextAlign;
}

export const GROUP_COLORS = [
  "#4e79a7", "#59a14f", "#e15759", "#f28e2b", "#b07aa1",
  "#76b7b2", "#edc948", "#ff9da7", "#9c755f", "#bab0ac",
];
export const UNGROUPED_COLOR = "#bdbdbd";
export const SELECTED_BORDER = "#d62728";
const NODE_RADIUS = 6;
const FONT_SIZE = 11;
const MARGIN = 40;

export function groupColor(group: number | null): string {
  if (group === null) return UNGROUPED_COLOR;
  return GROUP_COLORS[(group - 1) % GROUP_COLORS.length];
}

export function clampZoom(zoom: number): number {
  return Math.min(MAX_ZOOM, Math.max(MIN_ZOOM, zoom));
}

export type TextMeasure = (text: string) => number;

/** Approximate width used when no canvas metrics are available (tests). */
export const approximateMeasure: TextMeasure = (text) => text.length * FONT_SIZE * 0.62;

export function buildScene(
  frame: Frame,
  viewport: Viewport,
  width: number,
  height: number,
  measure: TextMeasure = approximateMeasure,
): Scene {
  const nLayers = frame.layer_years.length;
  const spanX = width - 2 * MARGIN;
  const spanY = height - 2 * MARGIN;
  const zoom = clampZoom(viewport.zoom);

  const sx = (x: number) =>
    width / 2 + zoom * ((MARGIN + x * spanX) - width / 2 - viewport.panX);
  const layerY = (layer: number) =>
    nLayers <= 1 ? MARGIN + spanY / 2 : MARGIN + (layer * spanY) / (nLayers - 1);
  const sy = (layer: number) =>
    height / 2 + zoom * (layerY(layer) - height / 2 - viewport.panY);

  const pos = new Map<string, { x: number; y: number }>();
  const nodes: SceneNode[] = frame.nodes.map((n) => {
    const p = { x: sx(n.x), y: sy(n.layer) };
    pos.set(n.id, p);
    return {
      id: n.id, x: p.x, y: p.y,
      marked: n.marked, selected: n.selected, group: n.group,
      score: n.internal_score,
    };
  });

  const edges: SceneEdge[] = frame.edges.map((e) => {
    const a = pos.get(e.citing)!;
    const b = pos.get(e.cited)!;
    const bow = 0.12 * (a.y - b.y) * (b.x >= a.x ? 1 : -1);
    return {
      x1: a.x, y1: a.y,
      cx: (a.x + b.x) / 2 + bow, cy: (a.y + b.y) / 2,
      x2: b.x, y2: b.y,
    };
  });

  // frame nodes arrive in descending internal-score order; keep that
  // priority for greedy label placement
  const labels: SceneLabel[] = [];
  const taken: [number, number, number, number][] = [];
  for (const n of frame.nodes) {
    const p = pos.get(n.id)!;
    const w = measure(n.label);
    const box: [number, number, number, number] = [
      p.x - w / 2, p.y + NODE_RADIUS + 2, p.x + w / 2, p.y + NODE_RADIUS + 2 + FONT_SIZE,
    ];
    const collides = taken.some(
      (t) => !(box[2] < t[0] || box[0] > t[2] || box[3] < t[1] || box[1] > t[3]),
    );
    if (collides) continue;
    taken.push(box);
    labels.push({ text: n.label, x: p.x, y: box[3] - 2, box });
  }

  const yearTicks: YearTick[] = [];
  const seen = new Set<number>();
  frame.layer_years.forEach((year, layer) => {
    if (seen.has(year)) return;
    seen.add(year);
    yearTicks.push({ year, y: sy(layer) });
  });

  return { nodes, edges, labels, yearTicks };
}

export function drawScene(ctx: Draw2D, scene: Scene, width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);

  ctx.strokeStyle = "#c3cfdb";
  ctx.lineWidth = 1;
  for (const e of scene.edges) {
    ctx.beginPath();
    ctx.moveTo(e.x1, e.y1);
    ctx.quadraticCurveTo(e.cx, e.cy, e.x2, e.y2);
    ctx.stroke();
  }

  for (const n of scene.nodes) {
    ctx.beginPath();
    if (n.marked) {
      ctx.rect(n.x - NODE_RADIUS, n.y - NODE_RADIUS, 2 * NODE_RADIUS, 2 * NODE_RADIUS);
    } else {
      ctx.arc(n.x, n.y, NODE_RADIUS, 0, 2 * Math.PI);
    }
    ctx.fillStyle = groupColor(n.group);
    ctx.fill();
    ctx.strokeStyle = n.selected ? SELECTED_BORDER : "#4d4d4d";
    ctx.lineWidth = n.selected ? 2.5 : 1;
    ctx.stroke();
  }

  ctx.font = `${FONT_SIZE}px sans-serif`;
  ctx.textAlign = "center";
  ctx.fillStyle = "#222222";
  for (const l of scene.labels) {
    ctx.fillText(l.text, l.x, l.y);
  }

  ctx.textAlign = "left";
  ctx.fillStyle = "#888888";
  for (const t of scene.yearTicks) {
    if (t.y > 0 && t.y < height) ctx.fillText(String(t.year), 4, t.y);
  }
}

/** Topmost node whose marker contains the point, or null. */
export function hitTest(scene: Scene, x: number, y: number): string | null {
  for (let i = scene.nodes.length - 1; i >= 0; i--) {
    const n = scene.nodes[i];
    const dx = x - n.x;
    const dy = y - n.y;
    if (n.marked) {
      if (Math.abs(dx) <= NODE_RADIUS && Math.abs(dy) <= NODE_RADIUS) return n.id;
    } else if (dx * dx + dy * dy <= NODE_RADIUS * NODE_RADIUS) {
      return n.id;
    }
  }
  return null;
}
