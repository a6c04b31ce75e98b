/**
 * Aggregations over seed rows. Means and population standard deviations
 * (divide by n, so a single seed gives std 0 rather than NaN). Null values
 * are excluded; a group with no defined values aggregates to null.
 */

import { MetricName, SeedRow } from "./csv";

export interface Stats {
  mean: number | null;
  std: number | null;
  count: number;
}

export function statsOf(values: Array<number | null>): Stats {
  const defined = values.filter((v): v is number => v !== null);
  if (defined.length === 0) return { mean: null, std: null, count: 0 };
  const mean = defined.reduce((a, b) => a + b, 0) / defined.length;
  const varSum = defined.reduce((a, b) => a + (b - mean) * (b - mean), 0);
  return { mean, std: Math.sqrt(varSum / defined.length), count: defined.length };
}

export function methodsInOrder(rows: SeedRow[]): string[] {
  const seen: string[] = [];
  for (const r of rows) if (!seen.includes(r.method)) seen.push(r.method);
  return seen;
}

export function sizesInOrder(rows: SeedRow[]): number[] {
  const seen: number[] = [];
  for (const r of rows) if (!seen.includes(r.sizeTarget)) seen.push(r.sizeTarget);
  return seen.sort((a, b) => a - b);
}

/** Mean/std of a relative-distance column per method, over all sizes and seeds. */
export function relByMethod(rows: SeedRow[], metric: MetricName): Map<string, Stats> {
  const out = new Map<string, Stats>();
  for (const method of methodsInOrder(rows)) {
    const values = rows.filter((r) => r.method === method).map((r) => r.rel[metric]);
    out.set(method, statsOf(values));
  }
  return out;
}

/** Mean/std of a raw metric per (method, size). */
export function metricByMethodAndSize(
  rows: SeedRow[],
  metric: MetricName,
): Map<string, Map<number, Stats>> {
  const out = new Map<string, Map<number, Stats>>();
  for (const method of methodsInOrder(rows)) {
    const inner = new Map<number, Stats>();
    for (const size of sizesInOrder(rows.filter((r) => r.method === method))) {
      const values = rows
        .filter((r) => r.method === method && r.sizeTarget === size)
        .map((r) => r.metrics[metric]);
      inner.set(size, statsOf(values));
    }
    out.set(method, inner);
  }
  return out;
}

/**
 * Recover the original graph's metric value from (value, relative distance)
 * pairs. Each row constrains |v - o| = rel * |o| (assortativity uses
 * max(|o|, 0.01) as the denominator), which leaves two candidates per row;
 * the candidate consistent with every row is the original.
 */
export function recoverOriginal(rows: SeedRow[], metric: MetricName): number | null {
  const pairs = rows
    .map((r) => ({ v: r.metrics[metric], rel: r.rel[metric] }))
    .filter((p): p is { v: number; rel: number } => p.v !== null && p.rel !== null);
  if (pairs.length === 0) return null;

  const candidatesFor = (v: number, rel: number): number[] => {
    const out: number[] = [];
    if (metric === "assortativity") {
      // |v - o| = rel * max(|o|, 0.01)
      out.push(v - rel * 0.01, v + rel * 0.01); // floored branch
      if (1 + rel !== 0) out.push(v / (1 + rel));
      if (1 - rel !== 0) out.push(v / (1 - rel));
    } else {
      if (1 + rel !== 0) out.push(v / (1 + rel));
      if (1 - rel !== 0) out.push(v / (1 - rel));
    }
    return out;
  };

  const residual = (o: number, v: number, rel: number): number => {
    const denom = metric === "assortativity" ? Math.max(Math.abs(o), 0.01) : Math.abs(o);
    if (denom === 0) return Math.abs(v - o);
    return Math.abs(Math.abs(v - o) - rel * denom);
  };

  let best: number | null = null;
  let bestScore = Infinity;
  for (const c of candidatesFor(pairs[0].v, pairs[0].rel)) {
    if (!Number.isFinite(c)) continue;
    const score = pairs.reduce((acc, p) => acc + residual(c, p.v, p.rel), 0);
    if (score < bestScore) {
      bestScore = score;
      best = c;
    }
  }
  if (best === null) return null;
  const scale = Math.max(Math.abs(best), 1e-9);
  return bestScore / pairs.length <= 1e-6 * Math.max(scale, 1) ? best : null;
}
