#!/usr/bin/env node
/**
 * figures --csv <path> --dataset <name> --kind <relative-bars|metric-vs-size>
 *         --out <dir> [--metric <name>]
 *
 * Reads a benchmark CSV and writes one SVG per metric into the output
 * directory with deterministic names <dataset>_<metric>_relbars.svg or
 * <dataset>_<metric>_vs_size.svg. Exits non-zero without writing anything
 * if the CSV is malformed or the selection is empty.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { MetricName, parseBenchmarkCsv } from "./csv";
import { FigureKind, renderFigures } from "./figures";

interface Args {
  csv: string;
  dataset: string;
  kind: FigureKind;
  out: string;
  metric?: MetricName;
}

function parseArgs(argv: string[]): Args {
  const values: Record<string, string> = {};
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    if (!flag.startsWith("--") || i + 1 >= argv.length) {
      throw new Error(`malformed arguments near ${flag}`);
    }
    values[flag.slice(2)] = argv[i + 1];
  }
  for (const required of ["csv", "dataset", "kind", "out"]) {
    if (!(required in values)) throw new Error(`missing --${required}`);
  }
  if (values.kind !== "relative-bars" && values.kind !== "metric-vs-size") {
    throw new Error(`unknown kind ${values.kind}`);
  }
  return {
    csv: values.csv,
    dataset: values.dataset,
    kind: values.kind as FigureKind,
    out: values.out,
    metric: values.metric as MetricName | undefined,
  };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n`);
    process.stderr.write(
      "usage: figures --csv <path> --dataset <name> " +
      "--kind <relative-bars|metric-vs-size> --out <dir> [--metric <name>]\n",
    );
    return 2;
  }
  try {
    const text = fs.readFileSync(args.csv, "utf-8");
    const rows = parseBenchmarkCsv(text);
    const figures = renderFigures({
      rows,
      dataset: args.dataset,
      kind: args.kind,
      metric: args.metric,
    });
    fs.mkdirSync(args.out, { recursive: true });
    for (const fig of figures) {
      fs.writeFileSync(path.join(args.out, fig.filename), fig.svg);
      process.stdout.write(`wrote ${path.join(args.out, fig.filename)}\n`);
    }
    return 0;
  } catch (err) {
    process.stderr.write(`figures: ${(err as Error).message}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
