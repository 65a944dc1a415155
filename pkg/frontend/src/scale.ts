/** Axis scales and tick generation for deterministic figures. */

export interface Scale {
  (v: number): number;
  ticks(): number[];
  domain: [number, number];
  range: [number, number];
  log: boolean;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    const s = v.toPrecision(4);
    return s.includes(".") ? s.replace(/\.?0+$/, "") : s;
  }
  const e = Math.floor(Math.log10(a));
  const m = v / 10 ** e;
  const ms = m.toPrecision(3).replace(/\.?0+$/, "");
  return `${ms}e${e}`;
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.log = false;
  fn.ticks = () => {
    const step = niceStep(span / 5);
    const start = Math.ceil(d0 / step) * step;
    const out: number[] = [];
    for (let v = start; v <= d1 + 1e-9 * Math.abs(step); v += step) {
      out.push(Math.abs(v) < 1e-12 * Math.abs(step) ? 0 : v);
    }
    return out;
  };
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error("log scale needs a positive domain");
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const [r0, r1] = range;
  const fn = ((v: number) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  fn.log = true;
  fn.ticks = () => {
    const out: number[] = [];
    const e0 = Math.floor(l0);
    const e1 = Math.ceil(l1);
    const sparse = e1 - e0 > 6 ? 2 : 1;
    for (let e = e0; e <= e1; e += sparse) {
      const v = 10 ** e;
      if (v >= d0 * 0.999 && v <= d1 * 1.001) out.push(v);
    }
    if (out.length < 2) {
      return [d0, d1];
    }
    return out;
  };
  return fn;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  const step = norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10;
  return step * mag;
}

export function extent(values: number[], padFraction = 0.05): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) {
    throw new Error("empty series");
  }
  if (lo === hi) {
    return [lo - Math.abs(lo) * 0.5 - 1, hi + Math.abs(hi) * 0.5 + 1];
  }
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

export function logExtent(values: number[], padFactor = 1.3): [number, number] {
  const positive = values.filter((v) => v > 0);
  if (positive.length === 0) {
    throw new Error("empty series");
  }
  const lo = Math.min(...positive);
  const hi = Math.max(...positive);
  return [lo / padFactor, hi * padFactor];
}
