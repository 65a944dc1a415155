import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";
import { parseCsv } from "../src/csv.js";
import { FigureInputs, FigureKind, render } from "../src/figures.js";
import { loadInputs, main } from "../src/cli.js";

const FIXTURES = join(__dirname, "..", "fixtures");
const GOLDEN = join(__dirname, "..", "golden");

function fixtureInputs(): FigureInputs {
  const read = (name: string) => parseCsv(readFileSync(join(FIXTURES, name), "utf-8"));
  return {
    energies: read("energies.csv"),
    fits: read("fits.csv"),
    decay: read("decay.csv"),
    convergence: read("convergence.csv"),
    timeseries: read("timeseries.csv"),
  };
}

const KINDS: FigureKind[] = ["energy", "decay", "convergence", "comparison"];

describe("figure rendering", () => {
  it("is a pure function: identical inputs give identical bytes", () => {
    const inputs = fixtureInputs();
    for (const kind of KINDS) {
      expect(render(kind, inputs)).toEqual(render(kind, inputs));
    }
  });

  it.each(KINDS)("%s matches its golden file byte for byte", (kind) => {
    const got = render(kind, fixtureInputs());
    const want = readFileSync(join(GOLDEN, `${kind}.svg`), "utf-8");
    expect(got).toEqual(want);
  });

  it("energy figure carries the growth-budget guide and fit overlay", () => {
    const svg = render("energy", fixtureInputs());
    expect(svg).toContain("s^(1/6) budget");
    expect(svg).toContain("fit s^0.03");
  });

  it("comparison figure marks the stopped series", () => {
    const svg = render("comparison", fixtureInputs());
    expect(svg).toContain("stopped at t=");
    expect(svg).toContain("nonull_probe");
    expect(svg).toContain("null_twin");
  });

  it("rejects missing inputs and empty series", () => {
    expect(() => render("energy", {})).toThrow(/needs energies/);
    const empty = parseCsv("s,component,multi_index,E_m,E_G\n");
    expect(() => render("energy", { energies: empty })).toThrow(/no positive series/);
  });

  it("rejects malformed tables", () => {
    expect(() => parseCsv("")).toThrow(/empty/);
    expect(() => parseCsv("a,b\n1\n")).toThrow(/row 2/);
    const t = parseCsv("a,b\n1,x\n");
    expect(() => render("decay", { decay: t })).toThrow(/missing column/);
  });
});

describe("command line", () => {
  it("renders a figure end to end", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    const out = join(dir, "fig.svg");
    const rc = main(["--in", FIXTURES, "--kind", "decay", "--out", out]);
    expect(rc).toBe(0);
    const svg = readFileSync(out, "utf-8");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg).toContain("c0.value.t32");
  });

  it("reports usage and bad kinds", () => {
    expect(main([])).toBe(2);
    expect(main(["--in", FIXTURES, "--kind", "pie", "--out", "x.svg"])).toBe(2);
    expect(main(["--in", FIXTURES, "--kind", "energy"])).toBe(2);
  });

  it("fails cleanly when the needed CSV is absent", () => {
    const dir = mkdtempSync(join(tmpdir(), "plots-"));
    writeFileSync(join(dir, "decay.csv"), "s,quantity,weighted_sup\n");
    expect(main(["--in", dir, "--kind", "convergence", "--out", join(dir, "x.svg")])).toBe(1);
  });

  it("loadInputs picks up optional fit overlays", () => {
    const inputs = loadInputs(FIXTURES, "energy");
    expect(inputs.fits).toBeDefined();
  });
});
