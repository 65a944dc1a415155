#!/usr/bin/env node
/** plots --in <dir> --kind <k> --out <file>: render one figure as SVG. */

import { readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import { parseArgs } from "node:util";
import { parseCsv, Table } from "./csv.js";
import { FigureInputs, FigureKind, render } from "./figures.js";

const KINDS: FigureKind[] = ["energy", "decay", "convergence", "comparison"];

function maybeTable(dir: string, name: string): Table | undefined {
  try {
    return parseCsv(readFileSync(join(dir, name), "utf-8"));
  } catch (err) {
    if ((err as NodeJS.ErrnoException).code === "ENOENT") return undefined;
    throw err;
  }
}

export function loadInputs(dir: string, kind: FigureKind): FigureInputs {
  const inputs: FigureInputs = {
    energies: maybeTable(dir, "energies.csv"),
    fits: maybeTable(dir, "fits.csv"),
    decay: maybeTable(dir, "decay.csv"),
    convergence: maybeTable(dir, "convergence.csv"),
    timeseries: maybeTable(dir, "timeseries.csv"),
  };
  const needed: Record<FigureKind, keyof FigureInputs> = {
    energy: "energies",
    decay: "decay",
    convergence: "convergence",
    comparison: "timeseries",
  };
  if (!inputs[needed[kind]]) {
    throw new Error(`figure kind ${kind} needs ${String(needed[kind])}.csv in ${dir}`);
  }
  return inputs;
}

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      options: {
        in: { type: "string" },
        kind: { type: "string" },
        out: { type: "string" },
      },
    });
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 2;
  }
  const { in: dir, kind, out } = parsed.values;
  if (!dir || !kind || !out) {
    process.stderr.write("usage: plots --in <dir> --kind <energy|decay|convergence|comparison> --out <file.svg>\n");
    return 2;
  }
  if (!KINDS.includes(kind as FigureKind)) {
    process.stderr.write(`error: unknown kind ${kind}; choose from ${KINDS.join(", ")}\n`);
    return 2;
  }
  try {
    const svg = render(kind as FigureKind, loadInputs(dir, kind as FigureKind));
    writeFileSync(out, svg);
  } catch (err) {
    process.stderr.write(`error: ${(err as Error).message}\n`);
    return 1;
  }
  return 0;
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
