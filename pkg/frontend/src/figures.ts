/**
 * The four figure kinds rendered from the report CSVs.
 *
 * Rendering is a pure function of the parsed tables: no smoothing, no
 * resampling, no randomness.
 */

import { Table, column, groupBy, numericColumn } from "./csv.js";
import { Scale, extent, linearScale, logExtent, logScale } from "./scale.js";
import { PALETTE, Svg, plotArea } from "./svg.js";

export type FigureKind = "energy" | "decay" | "convergence" | "comparison";

export interface FigureInputs {
  energies?: Table;
  fits?: Table;
  decay?: Table;
  convergence?: Table;
  timeseries?: Table;
}

const GUIDE_EXPONENT = 1 / 6; // growth budget for the root-energy series

function seriesPlot(
  svg: Svg,
  xs: Scale,
  ys: Scale,
  series: Array<{ label: string; x: number[]; y: number[] }>,
): Array<[string, string]> {
  const legend: Array<[string, string]> = [];
  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const pts: Array<[number, number]> = [];
    s.x.forEach((xv, j) => {
      const yv = s.y[j];
      if (ys.log && yv <= 0) return;
      pts.push([xs(xv), ys(yv)]);
    });
    if (pts.length > 1) {
      svg.polyline(pts, color);
    }
    for (const [px, py] of pts) {
      svg.circle(px, py, 1.6, color);
    }
    legend.push([s.label, color]);
  });
  return legend;
}

export function renderEnergy(inputs: FigureInputs): string {
  const table = inputs.energies;
  if (!table) throw new Error("energy figure needs energies.csv");
  const s = numericColumn(table, "s");
  const em = numericColumn(table, "E_m");
  const comp = column(table, "component");
  const word = column(table, "multi_index");
  const series: Array<{ label: string; x: number[]; y: number[] }> = [];
  const keys = [...new Set(comp.map((c, i) => `${c}|${word[i]}`))].filter((k) =>
    k.endsWith("|1"),
  );
  keys.sort();
  for (const key of keys) {
    const [c] = key.split("|");
    const x: number[] = [];
    const y: number[] = [];
    s.forEach((sv, i) => {
      if (comp[i] === c && word[i] === "1" && em[i] > 0) {
        x.push(sv);
        y.push(Math.sqrt(em[i]));
      }
    });
    if (x.length) series.push({ label: `component ${c}`, x, y });
  }
  if (!series.length) throw new Error("energy figure: no positive series");

  const area = plotArea();
  const xsAll = series.flatMap((t) => t.x);
  const ysAll = series.flatMap((t) => t.y);
  const xs = logScale(logExtent(xsAll, 1.05), area.x);
  const ys = logScale(logExtent(ysAll, 2.0), area.y);
  const svg = new Svg("root slice energy against slice radius");
  svg.axes(xs, ys, "s", "sqrt(E_m)");
  const legend = seriesPlot(svg, xs, ys, series);

  // growth-budget guide line through the first point of the first series
  const s0 = series[0].x[0];
  const e0 = series[0].y[0];
  const sEnd = xs.domain[1];
  svg.polyline(
    [
      [xs(s0), ys(e0)],
      [xs(sEnd), ys(e0 * (sEnd / s0) ** GUIDE_EXPONENT)],
    ],
    "#999999",
    1,
    "5,4",
  );
  legend.push(["s^(1/6) budget", "#999999"]);

  if (inputs.fits) {
    const ids = column(inputs.fits, "series_id");
    const slopes = numericColumn(inputs.fits, "slope");
    ids.forEach((id, i) => {
      if (id.includes("energy")) {
        const slope = slopes[i];
        svg.polyline(
          [
            [xs(s0), ys(e0)],
            [xs(sEnd), ys(e0 * (sEnd / s0) ** slope)],
          ],
          "#444444",
          1,
          "2,3",
        );
        legend.push([`fit s^${slope.toFixed(2)}`, "#444444"]);
      }
    });
  }
  svg.legend(legend, xs, ys);
  return svg.render();
}

export function renderDecay(inputs: FigureInputs): string {
  const table = inputs.decay;
  if (!table) throw new Error("decay figure needs decay.csv");
  const groups = groupBy(table, "quantity");
  const series = [...groups.keys()].sort().map((q) => {
    const t = groups.get(q)!;
    return { label: q, x: numericColumn(t, "s"), y: numericColumn(t, "weighted_sup") };
  });
  const filtered = series.filter((s) => s.y.some((v) => v > 0));
  if (!filtered.length) throw new Error("decay figure: no positive series");
  const area = plotArea();
  const xs = logScale(logExtent(filtered.flatMap((s) => s.x), 1.05), area.x);
  const ys = logScale(logExtent(filtered.flatMap((s) => s.y.filter((v) => v > 0))), area.y);
  const svg = new Svg("weighted sup norms against slice radius");
  svg.axes(xs, ys, "s", "weighted sup");
  const legend = seriesPlot(svg, xs, ys, filtered);
  svg.legend(legend, xs, ys);
  return svg.render();
}

export function renderConvergence(inputs: FigureInputs): string {
  const table = inputs.convergence;
  if (!table) throw new Error("convergence figure needs convergence.csv");
  const groups = groupBy(table, "case");
  const series: Array<{ label: string; x: number[]; y: number[] }> = [];
  for (const key of [...groups.keys()].sort()) {
    const t = groups.get(key)!;
    const h = numericColumn(t, "h");
    const err = numericColumn(t, "error");
    const x: number[] = [];
    const y: number[] = [];
    h.forEach((hv, i) => {
      if (err[i] > 0) {
        x.push(hv);
        y.push(err[i]);
      }
    });
    if (x.length > 1) series.push({ label: key, x, y });
  }
  if (!series.length) throw new Error("convergence figure: no usable series");
  const area = plotArea();
  const xs = logScale(logExtent(series.flatMap((s) => s.x), 1.2), area.x);
  const ys = logScale(logExtent(series.flatMap((s) => s.y)), area.y);
  const svg = new Svg("self-convergence and closed-form error against spacing");
  svg.axes(xs, ys, "h", "error");
  const legend = seriesPlot(svg, xs, ys, series);
  // 4th-order reference through the first series' coarsest point
  const sx = series[0].x[0];
  const sy = series[0].y[0];
  const hEnd = xs.domain[0];
  svg.polyline(
    [
      [xs(sx), ys(sy)],
      [xs(hEnd), ys(sy * (hEnd / sx) ** 4)],
    ],
    "#999999",
    1,
    "5,4",
  );
  legend.push(["4th order", "#999999"]);
  svg.legend(legend, xs, ys);
  return svg.render();
}

export function renderComparison(inputs: FigureInputs): string {
  const table = inputs.timeseries;
  if (!table) throw new Error("comparison figure needs timeseries.csv");
  const groups = groupBy(table, "series");
  const series = [...groups.keys()].sort().map((name) => {
    const t = groups.get(name)!;
    return { label: name, x: numericColumn(t, "t"), y: numericColumn(t, "sup_abs") };
  });
  const area = plotArea();
  const xs = linearScale(extent(series.flatMap((s) => s.x), 0.02), area.x);
  const ys = logScale(
    logExtent(series.flatMap((s) => s.y.filter((v) => v > 0))),
    area.y,
  );
  const svg = new Svg("sup amplitude: quadratic probe against its null twin");
  svg.axes(xs, ys, "t", "sup |w|");
  const legend = seriesPlot(svg, xs, ys, series);
  // mark the end of any series that stops early (the blow-up cut)
  const tEnd = Math.max(...series.map((s) => s.x[s.x.length - 1]));
  for (const s of series) {
    const last = s.x[s.x.length - 1];
    if (last < tEnd * 0.999) {
      svg.line(xs(last), ys.range[0], xs(last), ys.range[1], "#d62728", 1, "3,3");
      svg.text(xs(last) + 4, ys.range[1] + 12, `stopped at t=${last.toFixed(2)}`, {
        size: 10,
        fill: "#d62728",
      });
    }
  }
  svg.legend(legend, xs, ys);
  return svg.render();
}

export function render(kind: FigureKind, inputs: FigureInputs): string {
  switch (kind) {
    case "energy":
      return renderEnergy(inputs);
    case "decay":
      return renderDecay(inputs);
    case "convergence":
      return renderConvergence(inputs);
    case "comparison":
      return renderComparison(inputs);
    default:
      throw new Error(`unknown figure kind ${kind as string}`);
  }
}
