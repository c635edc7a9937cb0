/**
 * Parser for the scan-engine CSV dialect:
 *   - `#`-prefixed metadata lines (one carries a `config:` JSON echo)
 *   - a comma-separated header row
 *   - numeric cells with `inf` / `-inf` / `nan` sentinels; label columns stay strings
 */

import { readFileSync } from "fs";

export type Cell = number | string;

export interface ScanTable {
  meta: Record<string, unknown>;
  columns: string[];
  rows: Cell[][];
}

export class CsvError extends Error {}

function parseCell(raw: string): Cell {
  switch (raw) {
    case "inf":
      return Infinity;
    case "-inf":
      return -Infinity;
    case "nan":
      return NaN;
  }
  if (raw === "") return "";
  const num = Number(raw);
  return Number.isNaN(num) ? raw : num;
}

export function parseScanCsv(text: string): ScanTable {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  let meta: Record<string, unknown> = {};
  let headerIndex = -1;
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i];
    if (!line.startsWith("#")) {
      headerIndex = i;
      break;
    }
    const match = line.match(/^#\s*config:\s*(\{.*\})\s*$/);
    if (match) {
      try {
        meta = JSON.parse(match[1]) as Record<string, unknown>;
      } catch {
        throw new CsvError("config metadata line is not valid JSON");
      }
    }
  }
  if (headerIndex < 0) throw new CsvError("no header row found");
  const columns = lines[headerIndex].split(",");
  if (columns.length < 2) throw new CsvError(`suspicious header row: ${lines[headerIndex]}`);

  const rows: Cell[][] = [];
  for (const line of lines.slice(headerIndex + 1)) {
    const cells = line.split(",").map(parseCell);
    if (cells.length !== columns.length) {
      throw new CsvError(`row has ${cells.length} cells, expected ${columns.length}: ${line}`);
    }
    rows.push(cells);
  }
  return { meta, columns, rows };
}

export function readScanCsv(path: string): ScanTable {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read CSV file: ${path}`);
  }
  return parseScanCsv(text);
}

export function columnIndex(table: ScanTable, name: string): number {
  return table.columns.indexOf(name);
}

/** Numeric values of one column (strings and NaN filtered out). */
export function numericColumn(table: ScanTable, name: string): number[] {
  const idx = columnIndex(table, name);
  const out: number[] = [];
  for (const row of table.rows) {
    const v = row[idx];
    if (typeof v === "number" && Number.isFinite(v)) out.push(v);
  }
  return out;
}

/** Distinct values of one column, in first-appearance order. */
export function distinctValues(table: ScanTable, name: string): Cell[] {
  const idx = columnIndex(table, name);
  const seen = new Set<Cell>();
  const out: Cell[] = [];
  for (const row of table.rows) {
    const v = row[idx];
    if (!seen.has(v)) {
      seen.add(v);
      out.push(v);
    }
  }
  return out;
}
