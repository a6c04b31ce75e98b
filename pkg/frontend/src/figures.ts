/**
 * The two figure kinds.
 *
 * relative-bars: one SVG per metric, a bar per method of the mean relative
 * distance over that method's seed rows, with error bars of one standard
 * deviation over seeds.
 *
 * metric-vs-size: one SVG per metric, a line per method of the mean raw
 * metric value against the size target, a shaded band of one standard
 * deviation, and a dashed horizontal reference at the original graph's
 * value (recovered from the value/relative-distance column pair). When
 * every selected method is the threshold variant the x axis is labeled as
 * the threshold, since its sweep parameter is the distance cutoff, not a
 * size multiplier.
 */

import { MetricName, METRICS, SeedRow } from "./csv";
import {
  metricByMethodAndSize,
  methodsInOrder,
  recoverOriginal,
  relByMethod,
  sizesInOrder,
} from "./aggregate";
import { HEIGHT, MARGIN, PALETTE, Scene, WIDTH, fmtTick, niceTicks } from "./svg";

export type FigureKind = "relative-bars" | "metric-vs-size";

export interface FigureSpec {
  rows: SeedRow[];
  dataset: string;
  kind: FigureKind;
  metric?: MetricName; // default: all five
}

export interface RenderedFigure {
  filename: string;
  svg: string;
}

const PLOT_W = WIDTH - MARGIN.left - MARGIN.right;
const PLOT_H = HEIGHT - MARGIN.top - MARGIN.bottom;

function selectRows(spec: FigureSpec): SeedRow[] {
  const rows = spec.rows.filter((r) => r.dataset === spec.dataset);
  if (rows.length === 0) {
    throw new Error(`dataset ${spec.dataset!} has no rows in the CSV`);
  }
  return rows;
}

function metricsToRender(spec: FigureSpec): MetricName[] {
  if (spec.metric === undefined) return [...METRICS];
  if (!METRICS.includes(spec.metric)) {
    throw new Error(`unknown metric ${spec.metric}`);
  }
  return [spec.metric];
}

function yScale(lo: number, hi: number): (v: number) => number {
  const span = hi - lo || 1;
  return (v) => MARGIN.top + PLOT_H - ((v - lo) / span) * PLOT_H;
}

function drawFrame(scene: Scene, title: string, yLabel: string,
                   ticks: number[], toY: (v: number) => number): void {
  scene.text(WIDTH / 2, 20, title, 14);
  for (const t of ticks) {
    const y = toY(t);
    scene.line(MARGIN.left, y, WIDTH - MARGIN.right, y, "#dddddd", 1);
    scene.text(MARGIN.left - 8, y + 4, fmtTick(t), 11, "end");
  }
  scene.line(MARGIN.left, MARGIN.top, MARGIN.left, MARGIN.top + PLOT_H, "#333333", 1);
  scene.line(MARGIN.left, MARGIN.top + PLOT_H, WIDTH - MARGIN.right,
             MARGIN.top + PLOT_H, "#333333", 1);
  scene.text(16, HEIGHT / 2, yLabel, 12, "middle", -90);
}

export function renderRelativeBars(spec: FigureSpec): RenderedFigure[] {
  const rows = selectRows(spec);
  const out: RenderedFigure[] = [];
  for (const metric of metricsToRender(spec)) {
    const byMethod = relByMethod(rows, metric);
    const methods = methodsInOrder(rows);
    const tops = methods.map((m) => {
      const s = byMethod.get(m)!;
      return s.mean === null ? 0 : s.mean + (s.std ?? 0);
    });
    const hi = Math.max(...tops, 1e-9);
    const ticks = niceTicks(0, hi * 1.08);
    const toY = yScale(0, ticks[ticks.length - 1] ?? hi);

    const scene = new Scene();
    drawFrame(scene, `${spec.dataset}: relative distance of ${metric}`,
              `relative distance (${metric})`, ticks, toY);
    const slot = PLOT_W / methods.length;
    const barWidth = Math.min(slot * 0.6, 72);
    methods.forEach((method, i) => {
      const stats = byMethod.get(method)!;
      const cx = MARGIN.left + slot * (i + 0.5);
      if (stats.mean !== null) {
        const y = toY(stats.mean);
        scene.rect(cx - barWidth / 2, y, barWidth, MARGIN.top + PLOT_H - y,
                   PALETTE[i % PALETTE.length]);
        const std = stats.std ?? 0;
        if (std > 0) {
          scene.line(cx, toY(stats.mean - std), cx, toY(stats.mean + std), "#222222", 1.5);
          scene.line(cx - 6, toY(stats.mean - std), cx + 6, toY(stats.mean - std), "#222222", 1.5);
          scene.line(cx - 6, toY(stats.mean + std), cx + 6, toY(stats.mean + std), "#222222", 1.5);
        }
      } else {
        scene.text(cx, MARGIN.top + PLOT_H - 8, "undefined", 10);
      }
      scene.text(cx, MARGIN.top + PLOT_H + 18, method, 11);
    });
    out.push({
      filename: `${spec.dataset}_${metric}_relbars.svg`,
      svg: scene.render(),
    });
  }
  return out;
}

export function renderMetricVsSize(spec: FigureSpec): RenderedFigure[] {
  const rows = selectRows(spec);
  const anyTwoSizes = methodsInOrder(rows).some(
    (m) => sizesInOrder(rows.filter((r) => r.method === m)).length >= 2,
  );
  if (!anyTwoSizes) {
    throw new Error("metric-vs-size needs at least two size targets for some method");
  }
  const thresholdOnly = methodsInOrder(rows).every((m) => m === "lgsg-threshold");
  const xLabel = thresholdOnly ? "distance threshold" : "target size (x input nodes)";

  const out: RenderedFigure[] = [];
  for (const metric of metricsToRender(spec)) {
    const byMethod = metricByMethodAndSize(rows, metric);
    const original = recoverOriginal(rows, metric);
    const methods = methodsInOrder(rows);
    const sizes = sizesInOrder(rows);

    let lo = Infinity;
    let hi = -Infinity;
    for (const inner of byMethod.values()) {
      for (const s of inner.values()) {
        if (s.mean === null) continue;
        lo = Math.min(lo, s.mean - (s.std ?? 0));
        hi = Math.max(hi, s.mean + (s.std ?? 0));
      }
    }
    if (original !== null) {
      lo = Math.min(lo, original);
      hi = Math.max(hi, original);
    }
    if (!Number.isFinite(lo)) {
      lo = 0;
      hi = 1;
    }
    const pad = (hi - lo || 1) * 0.08;
    const ticks = niceTicks(lo - pad, hi + pad);
    const yLo = Math.min(lo - pad, ticks[0] ?? lo);
    const yHi = Math.max(hi + pad, ticks[ticks.length - 1] ?? hi);
    const toY = yScale(yLo, yHi);
    const xLo = sizes[0];
    const xHi = sizes[sizes.length - 1];
    const toX = (v: number) =>
      MARGIN.left + ((v - xLo) / (xHi - xLo || 1)) * PLOT_W;

    const scene = new Scene();
    drawFrame(scene, `${spec.dataset}: ${metric} vs ${xLabel}`, metric, ticks, toY);
    for (const s of sizes) {
      scene.text(toX(s), MARGIN.top + PLOT_H + 18, fmtTick(s), 11);
    }
    scene.text(WIDTH / 2, HEIGHT - 12, xLabel, 12);

    if (original !== null) {
      scene.line(MARGIN.left, toY(original), WIDTH - MARGIN.right, toY(original),
                 "#555555", 1.2, "6,4");
      scene.text(WIDTH - MARGIN.right, toY(original) - 6, "original", 10, "end");
    }

    methods.forEach((method, i) => {
      const inner = byMethod.get(method)!;
      const pts: Array<[number, number, number]> = [];
      for (const [size, s] of inner) {
        if (s.mean !== null) pts.push([size, s.mean, s.std ?? 0]);
      }
      if (pts.length === 0) return;
      pts.sort((a, b) => a[0] - b[0]);
      const color = PALETTE[i % PALETTE.length];
      if (pts.length >= 2) {
        const upper = pts.map(([x, m, s]) => [toX(x), toY(m + s)] as [number, number]);
        const lower = pts
          .map(([x, m, s]) => [toX(x), toY(m - s)] as [number, number])
          .reverse();
        scene.polygon([...upper, ...lower], color, 0.18);
        scene.path(pts.map(([x, m]) => [toX(x), toY(m)]), color, 2);
      }
      for (const [x, m] of pts) scene.circle(toX(x), toY(m), 3, color);
      scene.text(MARGIN.left + 10 + i * 120, MARGIN.top - 6, method, 11, "start");
      scene.rect(MARGIN.left + i * 120, MARGIN.top - 14, 8, 8, color);
    });

    out.push({
      filename: `${spec.dataset}_${metric}_vs_size.svg`,
      svg: scene.render(),
    });
  }
  return out;
}

export function renderFigures(spec: FigureSpec): RenderedFigure[] {
  if (spec.kind === "relative-bars") return renderRelativeBars(spec);
  if (spec.kind === "metric-vs-size") return renderMetricVsSize(spec);
  throw new Error(`unknown figure kind ${(spec as { kind: string }).kind}`);
}
