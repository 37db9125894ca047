/**
 * Minimal CSV reader for the simulator's output contract.
 *
 * The files are UTF-8, LF-terminated, comma-separated, with quoting only
 * where a field contains a comma or quote (robustness notes can).
 */

import * as fs from "node:fs";

export class ContractError extends Error {}

export function parseCsv(text: string): string[][] {
  const rows: string[][] = [];
  let row: string[] = [];
  let field = "";
  let inQuotes = false;
  for (let i = 0; i < text.length; i++) {
    const ch = text[i];
    if (inQuotes) {
      if (ch === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      inQuotes = true;
    } else if (ch === ",") {
      row.push(field);
      field = "";
    } else if (ch === "\n") {
      row.push(field);
      rows.push(row);
      row = [];
      field = "";
    } else if (ch !== "\r") {
      field += ch;
    }
  }
  if (field.length > 0 || row.length > 0) {
    row.push(field);
    rows.push(row);
  }
  return rows;
}

export interface Table {
  header: string[];
  rows: string[][];
  path: string;
}

export function readTable(path: string, requiredColumns: string[]): Table {
  if (!fs.existsSync(path)) {
    throw new ContractError(`missing input file: ${path}`);
  }
  const rows = parseCsv(fs.readFileSync(path, "utf8"));
  if (rows.length === 0) {
    throw new ContractError(`empty input file: ${path}`);
  }
  const header = rows[0];
  for (const column of requiredColumns) {
    if (!header.includes(column)) {
      throw new ContractError(`${path}: missing column '${column}' (header: ${header.join(",")})`);
    }
  }
  const body = rows.slice(1);
  if (body.length === 0) {
    throw new ContractError(`no data rows in ${path}`);
  }
  return { header, rows: body, path };
}

/** Access rows as objects keyed by header name. */
export function asRecords(table: Table): Record<string, string>[] {
  return table.rows.map((row) => {
    const record: Record<string, string> = {};
    table.header.forEach((name, i) => {
      record[name] = row[i] ?? "";
    });
    return record;
  });
}

export function toNumber(value: string, context: string): number {
  const x = Number(value);
  if (!Number.isFinite(x)) {
    throw new ContractError(`expected a finite number, got '${value}' in ${context}`);
  }
  return x;
}
