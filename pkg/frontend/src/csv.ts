/**
 * Reader for the toolkit's report CSVs.
 *
 * The reports are machine-written in a strict dialect: comma separator,
 * one header row, UNIX newlines, no quoting or embedded separators, so a
 * split-based parser is exact for them.
 */

export interface Table {
  header: string[];
  rows: string[][];
}

export function parseCsv(text: string): Table {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new Error("empty CSV");
  }
  const header = lines[0].split(",");
  const rows = lines.slice(1).map((l, i) => {
    const cells = l.split(",");
    if (cells.length !== header.length) {
      throw new Error(`row ${i + 2}: expected ${header.length} cells, got ${cells.length}`);
    }
    return cells;
  });
  return { header, rows };
}

export function column(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`missing column ${name!}; have: ${table.header.join(", ")}`);
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string): number[] {
  return column(table, name).map((v, i) => {
    const x = Number(v);
    if (!Number.isFinite(x)) {
      throw new Error(`column ${name}, row ${i + 2}: not a number: ${v}`);
    }
    return x;
  });
}

/** Split rows into series keyed by the given column. */
export function groupBy(table: Table, name: string): Map<string, Table> {
  const keys = column(table, name);
  const out = new Map<string, Table>();
  keys.forEach((k, i) => {
    if (!out.has(k)) {
      out.set(k, { header: table.header, rows: [] });
    }
    out.get(k)!.rows.push(table.rows[i]);
  });
  return out;
}
