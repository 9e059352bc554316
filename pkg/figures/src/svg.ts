/** Minimal deterministic SVG chart primitives: scales, axes, lines, cells. */

export interface Scale {
  (v: number): number;
  ticks: number[];
  domain: [number, number];
}

const fmt = (x: number): string => {
  if (!Number.isFinite(x)) return "0";
  return Math.abs(x) < 1e-12 ? "0" : String(Math.round(x * 100) / 100);
};

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(step0)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((s) => span / s <= count) ?? candidates[4];
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + 1e-9 * span; v += step) ticks.push(v);
  return ticks;
}

export function linearScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const span = hi > lo ? hi - lo : 1;
  const s = ((v: number) => out0 + ((v - lo) / span) * (out1 - out0)) as Scale;
  s.ticks = niceTicks(lo, hi);
  s.domain = [lo, hi];
  return s;
}

export function logScale(lo: number, hi: number, out0: number, out1: number): Scale {
  const llo = Math.log10(Math.max(lo, 1e-300));
  const lhi = Math.log10(Math.max(hi, lo * 10));
  const span = lhi > llo ? lhi - llo : 1;
  const s = ((v: number) =>
    out0 + ((Math.log10(Math.max(v, 1e-300)) - llo) / span) * (out1 - out0)) as Scale;
  const ticks: number[] = [];
  for (let e = Math.ceil(llo); e <= Math.floor(lhi); e++) ticks.push(Math.pow(10, e));
  s.ticks = ticks.length > 0 ? ticks : [lo, hi];
  s.domain = [lo, hi];
  return s;
}

export const COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];
export const GREY = "#999999";

export class Panel {
  parts: string[] = [];

  constructor(
    readonly x0: number, readonly y0: number,
    readonly width: number, readonly height: number,
    readonly xscale: Scale, readonly yscale: Scale,
  ) {}

  px(v: number): number { return this.x0 + this.xscale(v); }
  py(v: number): number { return this.y0 + this.height - this.yscale(v); }

  axes(xlabel: string, ylabel: string, logY = false): void {
    const b = `${this.x0},${this.y0} ${this.x0},${this.y0 + this.height} ` +
      `${this.x0 + this.width},${this.y0 + this.height} ${this.x0 + this.width},${this.y0}`;
    this.parts.push(
      `<polyline points="${b}" fill="none" stroke="#333" stroke-width="1"/>`,
    );
    for (const t of this.xscale.ticks) {
      const x = this.px(t);
      const yb = this.y0 + this.height;
      this.parts.push(`<line x1="${fmt(x)}" y1="${fmt(yb)}" x2="${fmt(x)}" y2="${fmt(yb + 4)}" stroke="#333"/>`);
      this.parts.push(`<text x="${fmt(x)}" y="${fmt(yb + 16)}" font-size="10" text-anchor="middle">${formatTick(t)}</text>`);
    }
    for (const t of this.yscale.ticks) {
      const y = this.py(t);
      this.parts.push(`<line x1="${fmt(this.x0 - 4)}" y1="${fmt(y)}" x2="${fmt(this.x0)}" y2="${fmt(y)}" stroke="#333"/>`);
      this.parts.push(`<text x="${fmt(this.x0 - 6)}" y="${fmt(y + 3)}" font-size="10" text-anchor="end">${logY ? formatLogTick(t) : formatTick(t)}</text>`);
    }
    this.parts.push(
      `<text x="${fmt(this.x0 + this.width / 2)}" y="${fmt(this.y0 + this.height + 32)}" font-size="11" text-anchor="middle">${escapeXml(xlabel)}</text>`,
    );
    this.parts.push(
      `<text x="${fmt(this.x0 - 42)}" y="${fmt(this.y0 + this.height / 2)}" font-size="11" text-anchor="middle" transform="rotate(-90 ${fmt(this.x0 - 42)} ${fmt(this.y0 + this.height / 2)})">${escapeXml(ylabel)}</text>`,
    );
  }

  line(xs: number[], ys: number[], color: string, width = 1.5, dash = ""): void {
    const pts: string[] = [];
    for (let i = 0; i < xs.length; i++) {
      if (!Number.isFinite(xs[i]) || !Number.isFinite(ys[i])) continue;
      pts.push(`${fmt(this.px(xs[i]))},${fmt(this.py(ys[i]))}`);
    }
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="${width}"${dashAttr}/>`,
    );
  }

  cell(x0: number, x1: number, y0v: number, y1v: number, color: string): void {
    const x = this.px(x0);
    const y = this.py(y1v);
    const w = this.px(x1) - x;
    const h = this.py(y0v) - y;
    this.parts.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" fill="${color}" stroke="none"/>`,
    );
  }

  text(x: number, y: number, content: string, color = "#333", size = 10): void {
    this.parts.push(
      `<text x="${fmt(this.px(x))}" y="${fmt(this.py(y))}" font-size="${size}" fill="${color}">${escapeXml(content)}</text>`,
    );
  }
}

function formatTick(t: number): string {
  if (t === 0) return "0";
  const a = Math.abs(t);
  if (a >= 0.01 && a < 10000) return String(Math.round(t * 1000) / 1000);
  return t.toExponential(0).replace("e+", "e").replace("e-", "e-");
}

function formatLogTick(t: number): string {
  const e = Math.round(Math.log10(t));
  return `1e${e}`;
}

export function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface LegendEntry { label: string; color: string; dash?: string }

export function document(width: number, height: number, body: string[], title: string,
  legend: LegendEntry[] = []): string {
  const head =
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    (title ? `<text x="${width / 2}" y="18" font-size="13" text-anchor="middle">${escapeXml(title)}</text>\n` : "");
  const leg: string[] = [];
  legend.forEach((entry, i) => {
    const y = 30 + 14 * i;
    const dashAttr = entry.dash ? ` stroke-dasharray="${entry.dash}"` : "";
    leg.push(`<line x1="${width - 150}" y1="${y}" x2="${width - 126}" y2="${y}" stroke="${entry.color}" stroke-width="2"${dashAttr}/>`);
    leg.push(`<text x="${width - 120}" y="${y + 3}" font-size="10">${escapeXml(entry.label)}</text>`);
  });
  return head + body.join("\n") + "\n" + leg.join("\n") + "\n</svg>\n";
}

/** Blue-to-red diverging-ish ramp on [0, 1], used by the energy maps. */
export function heatColor(v: number): string {
  const x = Math.min(Math.max(v, 0), 1);
  const r = Math.round(255 * Math.min(1, 1.6 * x));
  const g = Math.round(255 * Math.min(1, 1.8 * x * (1 - x) * 2));
  const b = Math.round(255 * Math.min(1, 1.6 * (1 - x)));
  return `rgb(${r},${g},${b})`;
}
