// Axis layout and pixel mapping for the parallel-coordinates scene. All
// functions are pure so the geometry is testable without a canvas.

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface Axis {
  /** Position in the dataset schema; stable across toggling. */
  coordinate: number;
  name: string;
  x: number;
}

export const MARGIN = { top: 28, right: 36, bottom: 16, left: 36 };

/**
 * Axes for the active coordinates, in schema order. Toggling a coordinate
 * only removes or inserts an axis; the relative order never changes.
 */
export function layoutAxes(names: string[], mask: boolean[], rect: Rect): Axis[] {
  const active: { coordinate: number; name: string }[] = [];
  for (let i = 0; i < names.length; i++) {
    if (mask[i]) active.push({ coordinate: i, name: names[i] });
  }
  const innerLeft = rect.x + MARGIN.left;
  const innerWidth = Math.max(rect.width - MARGIN.left - MARGIN.right, 1);
  if (active.length === 1) {
    return [{ ...active[0], x: innerLeft + innerWidth / 2 }];
  }
  return active.map((a, k) => ({
    ...a,
    x: innerLeft + (innerWidth * k) / (active.length - 1),
  }));
}

/** Top and bottom pixel of the value span on every axis. */
export function axisSpan(rect: Rect): { top: number; bottom: number } {
  return { top: rect.y + MARGIN.top, bottom: rect.y + rect.height - MARGIN.bottom };
}

/** Normalized value in [0, 1] to a y pixel; 1 maps to the top. */
export function valueToY(value: number, rect: Rect): number {
  const { top, bottom } = axisSpan(rect);
  return bottom - value * (bottom - top);
}

/**
 * Split a drawing area into n horizontal panels for side-by-side views.
 * n = 0 yields the whole area as a single panel.
 */
export function panelRects(rect: Rect, n: number): Rect[] {
  if (n <= 1) return [rect];
  const gap = 12;
  const width = (rect.width - gap * (n - 1)) / n;
  const out: Rect[] = [];
  for (let i = 0; i < n; i++) {
    out.push({ x: rect.x + i * (width + gap), y: rect.y, width, height: rect.height });
  }
  return out;
}

/**
 * Nearest point vertex to (px, py) within `tolerance` pixels, or null.
 * Distance is measured to polyline vertices, which is where users aim.
 */
export function nearestPoint(
  values: number[][],
  axes: Axis[],
  rect: Rect,
  px: number,
  py: number,
  tolerance = 8,
): number | null {
  let best: number | null = null;
  let bestDist = tolerance;
  for (let p = 0; p < values.length; p++) {
    for (const axis of axes) {
      const dx = px - axis.x;
      const dy = py - valueToY(values[p][axis.coordinate], rect);
      const dist = Math.hypot(dx, dy);
      if (dist < bestDist) {
        bestDist = dist;
        best = p;
      }
    }
  }
  return best;
}
