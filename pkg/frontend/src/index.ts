export { parseCsv, column, numericColumn, groupBy } from "./csv.js";
export { linearScale, logScale, extent, logExtent, fmtTick } from "./scale.js";
export { Svg, plotArea } from "./svg.js";
export { render, renderEnergy, renderDecay, renderConvergence, renderComparison } from "./figures.js";
export { loadInputs, main } from "./cli.js";
