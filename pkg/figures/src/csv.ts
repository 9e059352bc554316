/** Strict reader for the solver's numeric CSV outputs. */

import { readFileSync } from "node:fs";

export class SchemaError extends Error {}

export interface Table {
  columns: string[];
  /** column name -> numeric values (strings parsed as floats) */
  data: Map<string, number[]>;
  /** raw string values, for label-like columns */
  raw: Map<string, string[]>;
  rows: number;
}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.trim().length > 0);
  if (lines.length === 0) throw new SchemaError("empty CSV");
  const columns = lines[0].split(",").map((c) => c.trim());
  const data = new Map<string, number[]>(columns.map((c) => [c, []]));
  const raw = new Map<string, string[]>(columns.map((c) => [c, []]));
  for (let i = 1; i < lines.length; i++) {
    const parts = lines[i].split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `row ${i} has ${parts.length} fields, expected ${columns.length}`,
      );
    }
    for (let j = 0; j < columns.length; j++) {
      const cell = parts[j].trim();
      raw.get(columns[j])!.push(cell);
      data.get(columns[j])!.push(cell === "" ? NaN : Number(cell));
    }
  }
  return { columns, data, raw, rows: lines.length - 1 };
}

export function readCsv(path: string): Table {
  return parseCsv(readFileSync(path, "utf-8"));
}

/** Validate that every required column exists; reports all missing at once. */
export function requireColumns(table: Table, required: string[], context: string): void {
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${context}: missing column(s) ${missing.join(", ")} ` +
        `(found: ${table.columns.join(", ")})`,
    );
  }
}

export function column(table: Table, name: string): number[] {
  const values = table.data.get(name);
  if (!values) throw new SchemaError(`no column named '${name}'`);
  return values;
}
