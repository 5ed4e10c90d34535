/**
 * Schema-versioned CSV reading.
 *
 * Every wnrqc CSV begins with `# schema: wnrqc.<kind>.v<version>`; anything
 * else (missing line, wrong kind, wrong version) is rejected so plots never
 * silently render stale or foreign data.
 */

import { readFileSync } from "node:fs";

export const SUPPORTED_SCHEMAS: Record<string, number> = {
  "cg-sweep": 1,
  coupled: 1,
  walk: 1,
};

export class SchemaError extends Error {}

export interface Table {
  kind: string;
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string, expectedKind: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV: no schema line");
  }
  const m = lines[0].match(/^# schema: wnrqc\.([a-z0-9-]+)\.v(\d+)$/);
  if (!m) {
    throw new SchemaError(`missing or malformed schema line: ${lines[0]}`);
  }
  const [, kind, versionStr] = m;
  const version = Number(versionStr);
  if (kind !== expectedKind) {
    throw new SchemaError(`expected schema kind ${expectedKind}, found ${kind}`);
  }
  if (SUPPORTED_SCHEMAS[kind] !== version) {
    throw new SchemaError(
      `unsupported ${kind} schema version v${version} (supported: v${SUPPORTED_SCHEMAS[kind]})`,
    );
  }
  if (lines.length < 2) {
    throw new SchemaError("CSV has a schema line but no header");
  }
  const header = lines[1].split(",");
  const rows = lines.slice(2).map((l) => l.split(","));
  if (rows.length === 0) {
    throw new SchemaError("CSV has no data rows");
  }
  return { kind, header, rows };
}

export function readTable(path: string, expectedKind: string): Table {
  return parseCsv(readFileSync(path, "utf8"), expectedKind);
}

/** Numeric column by name; blank cells become NaN. */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`column ${name} not in header [${table.header.join(", ")}]`);
  }
  return table.rows.map((r) => (r[idx] === "" ? NaN : Number(r[idx])));
}
