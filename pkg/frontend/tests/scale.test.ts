import { describe, expect, it } from "vitest";

import {
  MARGIN,
  axisSpan,
  layoutAxes,
  nearestPoint,
  panelRects,
  valueToY,
  type Rect,
} from "../src/scale.js";
import { COORDS } from "./stubs.js";

const RECT: Rect = { x: 0, y: 0, width: 900, height: 500 };

describe("layoutAxes", () => {
  it("spreads all active axes across the inner width in schema order", () => {
    const axes = layoutAxes(COORDS, COORDS.map(() => true), RECT);
    expect(axes.map((a) => a.name)).toEqual(COORDS);
    expect(axes.map((a) => a.coordinate)).toEqual([0, 1, 2, 3, 4, 5, 6, 7, 8]);
    expect(axes[0].x).toBe(MARGIN.left);
    expect(axes[8].x).toBe(900 - MARGIN.right);
    for (let i = 1; i < axes.length; i++) {
      expect(axes[i].x).toBeGreaterThan(axes[i - 1].x);
    }
  });

  it("keeps schema order when coordinates are toggled off", () => {
    const mask = COORDS.map((_, i) => i !== 0 && i !== 4);
    const axes = layoutAxes(COORDS, mask, RECT);
    expect(axes.map((a) => a.name)).toEqual(["X2", "X3", "X4", "X6", "X7", "X8", "X9"]);
    expect(axes.map((a) => a.coordinate)).toEqual([1, 2, 3, 5, 6, 7, 8]);
  });

  it("centers a single remaining axis", () => {
    const mask = COORDS.map((_, i) => i === 3);
    const axes = layoutAxes(COORDS, mask, RECT);
    expect(axes).toHaveLength(1);
    const innerWidth = 900 - MARGIN.left - MARGIN.right;
    expect(axes[0].x).toBeCloseTo(MARGIN.left + innerWidth / 2, 6);
  });

  it("returns nothing when every coordinate is off", () => {
    expect(layoutAxes(COORDS, COORDS.map(() => false), RECT)).toEqual([]);
  });
});

describe("valueToY", () => {
  it("maps 1 to the top of the span and 0 to the bottom", () => {
    const { top, bottom } = axisSpan(RECT);
    expect(valueToY(1, RECT)).toBe(top);
    expect(valueToY(0, RECT)).toBe(bottom);
    expect(valueToY(0.5, RECT)).toBeCloseTo((top + bottom) / 2, 6);
  });
});

describe("panelRects", () => {
  it("returns the whole area for a single panel", () => {
    expect(panelRects(RECT, 1)).toEqual([RECT]);
    expect(panelRects(RECT, 0)).toEqual([RECT]);
  });

  it("splits into equal non-overlapping panels", () => {
    const [a, b, c] = panelRects(RECT, 3);
    expect(a.width).toBeCloseTo(b.width, 6);
    expect(b.width).toBeCloseTo(c.width, 6);
    expect(a.x + a.width).toBeLessThan(b.x);
    expect(b.x + b.width).toBeLessThan(c.x);
    expect(c.x + c.width).toBeCloseTo(900, 6);
  });
});

describe("nearestPoint", () => {
  const values = [
    [0.0, 0.5, 1.0],
    [1.0, 0.5, 0.0],
  ];
  const names = ["a", "b", "c"];
  const axes = layoutAxes(names, [true, true, true], RECT);

  it("picks the point whose vertex is under the cursor", () => {
    const y = valueToY(1.0, RECT);
    expect(nearestPoint(values, axes, RECT, axes[0].x, y)).toBe(1);
    expect(nearestPoint(values, axes, RECT, axes[2].x, y)).toBe(0);
  });

  it("respects the pixel tolerance", () => {
    const y = valueToY(0.5, RECT);
    expect(nearestPoint(values, axes, RECT, axes[1].x + 5, y)).not.toBeNull();
    expect(nearestPoint(values, axes, RECT, axes[1].x + 60, y + 60)).toBeNull();
  });

  it("prefers the closer vertex when two points share an axis region", () => {
    const y0 = valueToY(0.0, RECT);
    expect(nearestPoint(values, axes, RECT, axes[0].x, y0 - 2)).toBe(0);
  });
});
