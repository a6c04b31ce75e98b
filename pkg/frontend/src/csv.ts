/**
 * Benchmark CSV parsing.
 *
 * The harness writes a fixed header; per-seed rows carry an integer seed
 * while aggregate rows carry "mean" and are skipped here so every figure
 * aggregates the raw seed rows itself. "null" encodes undefined values
 * (degenerate assortativity, error rows).
 */

export const CSV_COLUMNS = [
  "dataset", "method", "size_target", "seed", "n_nodes", "n_edges",
  "avg_degree", "ede", "gini", "clustering", "assortativity",
  "rel_avg_degree", "rel_ede", "rel_gini", "rel_clustering",
  "rel_assortativity", "wall_time_s",
] as const;

export const METRICS = ["avg_degree", "ede", "gini", "clustering", "assortativity"] as const;
export type MetricName = (typeof METRICS)[number];

export interface SeedRow {
  dataset: string;
  method: string;
  sizeTarget: number;
  seed: number;
  metrics: Record<MetricName, number | null>;
  rel: Record<MetricName, number | null>;
}

function parseCell(raw: string): number | null {
  if (raw === "null" || raw === "") return null;
  const value = Number(raw);
  if (Number.isNaN(value)) throw new Error(`unparseable numeric cell: ${raw}`);
  return value;
}

export function parseBenchmarkCsv(text: string): SeedRow[] {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty CSV");
  const header = lines[0].split(",");
  if (header.length !== CSV_COLUMNS.length ||
      !CSV_COLUMNS.every((c, i) => header[i] === c)) {
    throw new Error(`unexpected CSV header: ${lines[0]}`);
  }
  const rows: SeedRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== CSV_COLUMNS.length) {
      throw new Error(`row has ${cells.length} cells, expected ${CSV_COLUMNS.length}`);
    }
    if (cells[3] === "mean") continue; // aggregate rows are derived data
    const metrics = {} as Record<MetricName, number | null>;
    const rel = {} as Record<MetricName, number | null>;
    METRICS.forEach((name, i) => {
      metrics[name] = parseCell(cells[6 + i]);
      rel[name] = parseCell(cells[11 + i]);
    });
    rows.push({
      dataset: cells[0],
      method: cells[1],
      sizeTarget: Number(cells[2]),
      seed: Number(cells[3]),
      metrics,
      rel,
    });
  }
  if (rows.length === 0) throw new Error("CSV has no seed rows");
  return rows;
}
