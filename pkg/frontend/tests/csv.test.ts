import { describe, expect, it } from "vitest";
import * as fs from "node:fs";
import * as path from "node:path";

import { CSV_COLUMNS, parseBenchmarkCsv } from "../src/csv";

const FIXTURE = path.join(__dirname, "fixtures", "bench_fixture.csv");

describe("parseBenchmarkCsv", () => {
  it("reads seed rows and skips aggregate rows", () => {
    const rows = parseBenchmarkCsv(fs.readFileSync(FIXTURE, "utf-8"));
    expect(rows.length).toBe(45); // 3 methods x 3 sizes x 5 seeds
    expect(rows.every((r) => Number.isInteger(r.seed))).toBe(true);
    expect(new Set(rows.map((r) => r.method))).toEqual(
      new Set(["er", "ba", "lgsg-node-agg"]),
    );
  });

  it("parses null cells as null", () => {
    const header = CSV_COLUMNS.join(",");
    const row = "d,er,1.0,0,10,5,1.0,0.5,0.1,0.2,null,0.1,0.1,0.1,0.1,null,0.0";
    const rows = parseBenchmarkCsv(`${header}\n${row}\n`);
    expect(rows[0].metrics.assortativity).toBeNull();
    expect(rows[0].rel.assortativity).toBeNull();
    expect(rows[0].metrics.avg_degree).toBe(1.0);
  });

  it("rejects an empty file", () => {
    expect(() => parseBenchmarkCsv("")).toThrow(/empty/);
  });

  it("rejects a wrong header", () => {
    expect(() => parseBenchmarkCsv("a,b,c\n1,2,3\n")).toThrow(/header/);
  });

  it("rejects rows with missing columns", () => {
    const header = CSV_COLUMNS.join(",");
    expect(() => parseBenchmarkCsv(`${header}\nd,er,1.0\n`)).toThrow(/cells/);
  });

  it("rejects a header-only file", () => {
    const header = CSV_COLUMNS.join(",");
    expect(() => parseBenchmarkCsv(`${header}\n`)).toThrow(/no seed rows/);
  });
});
