import type { Curve, PrototypeResponse, ResolveResult } from "./types.js";

// Chart geometry is plain SVG path strings computed here, free of any DOM
// or chart library, so rendering is testable as data in, string out.

export interface Box {
  width: number;
  height: number;
  pad: number;
}

export const DEFAULT_BOX: Box = { width: 320, height: 120, pad: 8 };

function round2(x: number): number {
  return Math.round(x * 100) / 100;
}

/** Path through (xs[i], ys[i]) in user units already scaled to pixels. */
export function polylinePath(xs: number[], ys: number[]): string {
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    parts.push(`${i === 0 ? "M" : "L"}${round2(xs[i])} ${round2(ys[i])}`);
  }
  return parts.join(" ");
}

function spanOf(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!isFinite(lo)) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}

/** values[i] plotted at x = i over the full width, y scaled to [lo, hi]. */
export function seriesPath(
  values: number[],
  box: Box,
  lo: number,
  hi: number,
): string {
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  const denom = Math.max(values.length - 1, 1);
  const xs = values.map((_, i) => box.pad + (i / denom) * innerW);
  const ys = values.map((v) => box.pad + (1 - (v - lo) / (hi - lo)) * innerH);
  return polylinePath(xs, ys);
}

export interface PrototypeChart {
  key: string;
  classLabel: number;
  segmentCount: number;
  caption: string;
  solid: string;
  dotted: string | null;
  coincident: boolean;
}

export interface PrototypePanel {
  empty: boolean;
  charts: PrototypeChart[];
}

/**
 * One chart per prototype, grouped class by class. The solid line is the
 * reconstruction from the kept points; the original shows as a dotted
 * overlay when toggled. Both share one y-scale so coinciding data yields
 * byte-equal paths.
 */
export function prototypePanel(
  resp: PrototypeResponse | null,
  showOriginal: boolean,
  box: Box = DEFAULT_BOX,
): PrototypePanel {
  if (!resp || resp.classes.every((c) => c.prototypes.length === 0)) {
    return { empty: true, charts: [] };
  }
  const charts: PrototypeChart[] = [];
  for (const cls of resp.classes) {
    for (const p of cls.prototypes) {
      const [lo, hi] = spanOf(p.raw.concat(p.reconstruction));
      const solid = seriesPath(p.reconstruction, box, lo, hi);
      const dotted = showOriginal ? seriesPath(p.raw, box, lo, hi) : null;
      charts.push({
        key: `${cls.label}:${p.instance_id}`,
        classLabel: cls.label,
        segmentCount: p.segment_count,
        caption: `class ${cls.label}, ${p.segment_count} segments`,
        solid,
        dotted,
        coincident: dotted !== null && dotted === solid,
      });
    }
  }
  return { empty: false, charts };
}

export interface HoverEntry {
  x: number;
  y: number;
  alpha_c: number;
  loyalty: number;
  kappa: number;
  mean_segments: number;
}

export interface TradeoffChart {
  hidden: boolean;
  path: string;
  marker: { x: number; y: number } | null;
  hover: HoverEntry[];
}

/**
 * Kappa versus mean complexity. Complexity spans a fixed [0, 1] domain so
 * the identity point always lands at the right edge; the resolved operating
 * point is marked when it lies on the curve.
 */
export function tradeoffChart(
  curve: Curve | null,
  resolved: ResolveResult | null,
  box: Box = DEFAULT_BOX,
): TradeoffChart {
  if (!curve || curve.points.length === 0) {
    return { hidden: true, path: "", marker: null, hover: [] };
  }
  const innerW = box.width - 2 * box.pad;
  const innerH = box.height - 2 * box.pad;
  let yLo = 0;
  for (const p of curve.points) if (p.kappa < yLo) yLo = p.kappa;
  const sx = (c: number) => box.pad + c * innerW;
  const sy = (k: number) => box.pad + (1 - (k - yLo) / (1 - yLo)) * innerH;

  const hover = curve.points.map((p) => ({
    x: round2(sx(p.mean_complexity)),
    y: round2(sy(p.kappa)),
    alpha_c: p.alpha_c,
    loyalty: p.loyalty,
    kappa: p.kappa,
    mean_segments: p.mean_segments,
  }));
  const path = polylinePath(
    curve.points.map((p) => sx(p.mean_complexity)),
    curve.points.map((p) => sy(p.kappa)),
  );
  let marker: { x: number; y: number } | null = null;
  if (resolved) {
    const hit = curve.points.find((p) => p.alpha_c === resolved.alpha_c);
    if (hit) marker = { x: round2(sx(hit.mean_complexity)), y: round2(sy(hit.kappa)) };
  }
  return { hidden: false, path, marker, hover };
}
