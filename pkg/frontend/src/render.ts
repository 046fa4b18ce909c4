import { blockFill, classColor, refusedColor } from "./colors.js";
import type { Axis, Rect } from "./scale.js";
import { axisSpan, layoutAxes, panelRects, valueToY } from "./scale.js";
import type {
  BlockPayload,
  DatasetPayload,
  HeatmapResponse,
  QuantilesResponse,
  SessionPayload,
} from "./types.js";

// Above this many polylines the scene switches to the server's segment
// frequencies: one line per distinct adjacent-pair value combination.
export const POLYLINE_BUDGET = 1500;

export const BAND_WIDTH = 10;

/** The 2D-context surface the renderer relies on; tests stub this. */
export interface Scene2D {
  lineWidth: number;
  strokeStyle: string;
  fillStyle: string;
  globalAlpha: number;
  font: string;
  textAlign: string;
  textBaseline: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  closePath(): void;
  stroke(): void;
  fill(): void;
  fillText(text: string, x: number, y: number): void;
  save(): void;
  restore(): void;
}

export interface SceneInput {
  dataset: DatasetPayload;
  session: SessionPayload;
  heatmap: HeatmapResponse | null;
  quantiles: QuantilesResponse[];
  selectedBlocks: number[];
  selectedPoint: number | null;
  showRefused: boolean;
}

export function drawScene(ctx: Scene2D, input: SceneInput, width: number, height: number): void {
  ctx.clearRect(0, 0, width, height);
  const whole: Rect = { x: 0, y: 0, width, height };
  const side = input.session.viewSettings.sideBySide
    .map((id) => input.session.blocks.find((b) => b.id === id))
    .filter((b): b is BlockPayload => b !== undefined);
  if (side.length === 0) {
    drawPanel(ctx, input, whole, null);
    return;
  }
  const rects = panelRects(whole, side.length);
  for (let i = 0; i < side.length; i++) {
    drawPanel(ctx, input, rects[i], side[i]);
  }
}

/** One parallel-coordinates panel; `only` restricts it to a single block. */
export function drawPanel(
  ctx: Scene2D,
  input: SceneInput,
  rect: Rect,
  only: BlockPayload | null,
): void {
  const { dataset, session } = input;
  const axes = layoutAxes(dataset.coordinates, session.activeCoordinates, rect);
  if (axes.length === 0) return;

  drawAxes(ctx, axes, rect, input.heatmap);

  const membership = only === null ? null : new Set(only.members);
  drawPolylines(ctx, input, axes, rect, membership);

  const blocks = only === null ? session.blocks : [only];
  for (const block of blocks) {
    drawBlockOverlay(ctx, block, axes, rect, dataset.classLabels, {
      selected: input.selectedBlocks.includes(block.id),
      refused: false,
    });
  }
  if (only === null && input.showRefused) {
    for (const block of session.refused) {
      drawBlockOverlay(ctx, block, axes, rect, dataset.classLabels, {
        selected: false,
        refused: true,
      });
    }
  }

  for (const q of input.quantiles) {
    const shown = blocks.some((b) => b.id === q.blockId);
    if (shown) drawQuantiles(ctx, q, axes, rect);
  }

  if (only !== null) {
    ctx.save();
    ctx.fillStyle = "#d8d8d8";
    ctx.font = "12px sans-serif";
    ctx.textAlign = "left";
    ctx.fillText(`block ${only.id}`, rect.x + 6, rect.y + 14);
    ctx.restore();
  }
}

export function drawAxes(ctx: Scene2D, axes: Axis[], rect: Rect, heatmap: HeatmapResponse | null): void {
  const { top, bottom } = axisSpan(rect);
  const counts = heatmap?.heatmap.counts ?? null;
  const maxCount = counts ? Math.max(...counts, 1) : 1;
  ctx.save();
  ctx.font = "11px sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "alphabetic";
  for (const axis of axes) {
    // heatmap shading: axes with more pairwise non-overlap draw darker/heavier
    const t = counts ? counts[axis.coordinate] / maxCount : 0;
    ctx.beginPath();
    ctx.strokeStyle = "#aab4bd";
    ctx.globalAlpha = 0.35 + 0.65 * t;
    ctx.lineWidth = 1 + 2 * t;
    ctx.moveTo(axis.x, top);
    ctx.lineTo(axis.x, bottom);
    ctx.stroke();
    ctx.globalAlpha = 1;
    ctx.fillStyle = "#c7ced4";
    ctx.fillText(axis.name, axis.x, rect.y + 16);
  }
  ctx.restore();
}

interface PairFrequencies {
  counts: Map<string, number>;
  max: number;
}

function segmentCounts(dataset: DatasetPayload): Map<number, PairFrequencies> {
  const out = new Map<number, PairFrequencies>();
  for (const group of dataset.segmentFrequencies) {
    const counts = new Map<string, number>();
    let max = 1;
    for (const seg of group.segments) {
      counts.set(`${seg.values[0]},${seg.values[1]}`, seg.count);
      if (seg.count > max) max = seg.count;
    }
    out.set(group.pair[0], { counts, max });
  }
  return out;
}

export function frequencyWidth(count: number, maxCount: number): number {
  if (maxCount <= 0) return 1;
  return 0.6 + 2.8 * (count / maxCount);
}

export function drawPolylines(
  ctx: Scene2D,
  input: SceneInput,
  axes: Axis[],
  rect: Rect,
  membership: Set<number> | null,
): void {
  const { dataset, session } = input;
  const points = membership === null
    ? dataset.points
    : dataset.points.filter((p) => membership.has(p.id));

  if (membership === null && points.length > POLYLINE_BUDGET) {
    drawAggregated(ctx, dataset, axes, rect);
    return;
  }

  const useWidths = session.viewSettings.frequencyWidths;
  const freq = useWidths ? segmentCounts(dataset) : null;
  ctx.save();
  ctx.globalAlpha = 0.45;
  for (const point of points) {
    const color = classColor(point.label, dataset.classLabels);
    if (point.id === input.selectedPoint) continue; // drawn on top below
    strokePolyline(ctx, point.values, point.raw, axes, rect, color, 1, freq);
  }
  if (input.selectedPoint !== null) {
    const hit = dataset.points.find((p) => p.id === input.selectedPoint);
    if (hit && (membership === null || membership.has(hit.id))) {
      ctx.globalAlpha = 1;
      strokePolyline(ctx, hit.values, hit.raw, axes, rect, "#ffffff", 2.5, null);
    }
  }
  ctx.restore();
}

function strokePolyline(
  ctx: Scene2D,
  values: number[],
  raw: number[],
  axes: Axis[],
  rect: Rect,
  color: string,
  baseWidth: number,
  freq: Map<number, PairFrequencies> | null,
): void {
  ctx.strokeStyle = color;
  if (freq === null) {
    ctx.lineWidth = baseWidth;
    ctx.beginPath();
    for (let k = 0; k < axes.length; k++) {
      const x = axes[k].x;
      const y = valueToY(values[axes[k].coordinate], rect);
      if (k === 0) ctx.moveTo(x, y);
      else ctx.lineTo(x, y);
    }
    ctx.stroke();
    return;
  }
  // frequency widths are defined per schema-adjacent pair; segments that
  // skip toggled-off coordinates fall back to width 1
  for (let k = 0; k + 1 < axes.length; k++) {
    const a = axes[k];
    const b = axes[k + 1];
    let width = 1;
    const pair = b.coordinate === a.coordinate + 1 ? freq.get(a.coordinate) : undefined;
    if (pair) {
      const count = pair.counts.get(`${raw[a.coordinate]},${raw[b.coordinate]}`) ?? 0;
      width = frequencyWidth(count, pair.max);
    }
    ctx.lineWidth = width;
    ctx.beginPath();
    ctx.moveTo(a.x, valueToY(values[a.coordinate], rect));
    ctx.lineTo(b.x, valueToY(values[b.coordinate], rect));
    ctx.stroke();
  }
}

/**
 * Over-budget fallback: draw one line per distinct adjacent-pair raw value
 * combination, weighted by the server's segment counts. Class identity is
 * not drawn in this mode; it is a density view.
 */
export function drawAggregated(ctx: Scene2D, dataset: DatasetPayload, axes: Axis[], rect: Rect): void {
  ctx.save();
  ctx.strokeStyle = "#88a0b0";
  for (let k = 0; k + 1 < axes.length; k++) {
    const a = axes[k];
    const b = axes[k + 1];
    if (b.coordinate !== a.coordinate + 1) continue;
    const group = dataset.segmentFrequencies[a.coordinate];
    if (!group) continue;
    const max = Math.max(...group.segments.map((s) => s.count), 1);
    for (const seg of group.segments) {
      const va = normalizeRaw(seg.values[0], a.coordinate, dataset);
      const vb = normalizeRaw(seg.values[1], b.coordinate, dataset);
      ctx.globalAlpha = 0.2 + 0.5 * (seg.count / max);
      ctx.lineWidth = frequencyWidth(seg.count, max);
      ctx.beginPath();
      ctx.moveTo(a.x, valueToY(va, rect));
      ctx.lineTo(b.x, valueToY(vb, rect));
      ctx.stroke();
    }
  }
  ctx.restore();
}

function normalizeRaw(raw: number, coordinate: number, dataset: DatasetPayload): number {
  const lo = dataset.rawMin[coordinate];
  const hi = dataset.rawMax[coordinate];
  const span = hi - lo;
  return span === 0 ? 0.5 : (raw - lo) / span;
}

export function drawBlockOverlay(
  ctx: Scene2D,
  block: BlockPayload,
  axes: Axis[],
  rect: Rect,
  classLabels: string[],
  opts: { selected: boolean; refused: boolean },
): void {
  const fill = opts.refused
    ? blockFill(block.dominant, classLabels, 0.1)
    : blockFill(block.dominant, classLabels, opts.selected ? 0.3 : 0.18);
  const edge = opts.refused
    ? refusedColor(block.dominant, classLabels)
    : classColor(block.dominant, classLabels);

  ctx.save();
  // connecting quads between adjacent axes
  ctx.fillStyle = fill;
  for (let k = 0; k + 1 < axes.length; k++) {
    const a = axes[k];
    const b = axes[k + 1];
    const [aLo, aHi] = block.bounds[a.coordinate];
    const [bLo, bHi] = block.bounds[b.coordinate];
    ctx.beginPath();
    ctx.moveTo(a.x, valueToY(aHi, rect));
    ctx.lineTo(b.x, valueToY(bHi, rect));
    ctx.lineTo(b.x, valueToY(bLo, rect));
    ctx.lineTo(a.x, valueToY(aLo, rect));
    ctx.closePath();
    ctx.fill();
  }
  // per-axis interval bands carry the exact [lo, hi] span
  ctx.fillStyle = fill;
  for (const axis of axes) {
    const [lo, hi] = block.bounds[axis.coordinate];
    const yHi = valueToY(hi, rect);
    const yLo = valueToY(lo, rect);
    ctx.fillRect(axis.x - BAND_WIDTH / 2, yHi, BAND_WIDTH, yLo - yHi);
  }
  if (opts.selected) {
    ctx.strokeStyle = edge;
    ctx.lineWidth = 1.5;
    for (const axis of axes) {
      const [lo, hi] = block.bounds[axis.coordinate];
      ctx.beginPath();
      ctx.moveTo(axis.x - BAND_WIDTH / 2, valueToY(hi, rect));
      ctx.lineTo(axis.x + BAND_WIDTH / 2, valueToY(hi, rect));
      ctx.moveTo(axis.x - BAND_WIDTH / 2, valueToY(lo, rect));
      ctx.lineTo(axis.x + BAND_WIDTH / 2, valueToY(lo, rect));
      ctx.stroke();
    }
  }
  ctx.restore();
}

/** Quantile bins as translucent side bars plus a mean tick (bins + mean line). */
export function drawQuantiles(ctx: Scene2D, q: QuantilesResponse, axes: Axis[], rect: Rect): void {
  const axis = axes.find((a) => a.name === q.coordinate);
  if (!axis) return;
  const { edges, counts, mean } = q.quantiles;
  const maxCount = Math.max(...counts, 1);
  ctx.save();
  ctx.fillStyle = "rgba(255, 255, 255, 0.30)";
  for (let k = 0; k < counts.length; k++) {
    const yTop = valueToY(edges[k + 1], rect);
    const yBot = valueToY(edges[k], rect);
    const w = 4 + 22 * (counts[k] / maxCount);
    ctx.fillRect(axis.x + BAND_WIDTH / 2 + 2, yTop, w, Math.max(yBot - yTop, 1));
  }
  ctx.strokeStyle = "#ffffff";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  ctx.moveTo(axis.x - BAND_WIDTH, valueToY(mean, rect));
  ctx.lineTo(axis.x + BAND_WIDTH, valueToY(mean, rect));
  ctx.stroke();
  ctx.restore();
}
