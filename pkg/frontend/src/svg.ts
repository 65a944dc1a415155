/**
 * Minimal deterministic SVG writer: fixed float formatting, no timestamps,
 * no generated ids, so equal inputs give byte-equal files.
 */

import { Scale, fmtTick } from "./scale.js";

export const WIDTH = 720;
export const HEIGHT = 480;
export const MARGIN = { left: 64, right: 16, top: 36, bottom: 44 };

export const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2",
];

export function num(v: number): string {
  if (!Number.isFinite(v)) throw new Error(`non-finite coordinate: ${v}`);
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export class Svg {
  private parts: string[] = [];

  constructor(title: string) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
    );
    this.parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
    this.text(WIDTH / 2, 20, esc(title), { anchor: "middle", size: 14, bold: true });
  }

  text(
    x: number,
    y: number,
    content: string,
    opts: { anchor?: string; size?: number; bold?: boolean; fill?: string; rotate?: number } = {},
  ): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? 11;
    const fill = opts.fill ?? "#333333";
    const weight = opts.bold ? ' font-weight="bold"' : "";
    const rot = opts.rotate ? ` transform="rotate(${opts.rotate} ${num(x)} ${num(y)})"` : "";
    this.parts.push(
      `<text x="${num(x)}" y="${num(y)}" text-anchor="${anchor}" font-size="${size}" fill="${fill}"${weight}${rot}>${esc(content)}</text>`,
    );
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1, dash = ""): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<line x1="${num(x1)}" y1="${num(y1)}" x2="${num(x2)}" y2="${num(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  polyline(points: Array<[number, number]>, stroke: string, width = 1.5, dash = ""): void {
    const pts = points.map(([x, y]) => `${num(x)},${num(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="${width}"${d}/>`,
    );
  }

  circle(x: number, y: number, r: number, fill: string): void {
    this.parts.push(`<circle cx="${num(x)}" cy="${num(y)}" r="${r}" fill="${fill}"/>`);
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string): void {
    const [x0, x1] = xs.range;
    const [y0, y1] = ys.range;
    this.line(x0, y0, x1, y0, "#222222", 1);
    this.line(x0, y0, x0, y1, "#222222", 1);
    for (const t of xs.ticks()) {
      const x = xs(t);
      this.line(x, y0, x, y0 + 4, "#222222", 1);
      this.line(x, y0, x, y1, "#dddddd", 0.5);
      this.text(x, y0 + 16, fmtTick(t), { anchor: "middle", size: 10 });
    }
    for (const t of ys.ticks()) {
      const y = ys(t);
      this.line(x0 - 4, y, x0, y, "#222222", 1);
      this.line(x0, y, x1, y, "#dddddd", 0.5);
      this.text(x0 - 7, y + 3, fmtTick(t), { anchor: "end", size: 10 });
    }
    this.text((x0 + x1) / 2, HEIGHT - 8, xLabel, { anchor: "middle", size: 12 });
    this.text(14, (y0 + y1) / 2, yLabel, { anchor: "middle", size: 12, rotate: -90 });
  }

  legend(entries: Array<[string, string]>, xs: Scale, ys: Scale): void {
    const x = xs.range[1] - 12;
    let y = ys.range[1] + 14;
    for (const [label, color] of entries) {
      this.line(x - 150, y - 3, x - 130, y - 3, color, 2);
      this.text(x - 124, y, label, { size: 10 });
      y += 14;
    }
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

export function plotArea(): { x: [number, number]; y: [number, number] } {
  return {
    x: [MARGIN.left, WIDTH - MARGIN.right],
    y: [HEIGHT - MARGIN.bottom, MARGIN.top],
  };
}
