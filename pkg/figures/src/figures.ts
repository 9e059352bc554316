/** The six figure builders, each mapping validated CSV tables to one SVG. */

import { column, requireColumns, Table } from "./csv.js";
import { isoSegments } from "./marching.js";
import { FigureSpec } from "./spec.js";
import {
  COLORS, GREY, LegendEntry, Panel, document as svgDocument,
  heatColor, linearScale, logScale,
} from "./svg.js";

const W = 640;
const H = 420;
const MARGIN = { left: 70, right: 160, top: 30, bottom: 50 };

function panel(xlo: number, xhi: number, ylo: number, yhi: number,
  log = false): Panel {
  const width = W - MARGIN.left - MARGIN.right;
  const height = H - MARGIN.top - MARGIN.bottom;
  const xs = linearScale(xlo, xhi, 0, width);
  const ys = log ? logScale(ylo, yhi, 0, height) : linearScale(ylo, yhi, 0, height);
  return new Panel(MARGIN.left, MARGIN.top, width, height, xs, ys);
}

const TIMESERIES_COLUMNS = ["step", "t", "dt", "energy", "div_surface", "div_volume"];

export function energyCompare(spec: FigureSpec, tables: Table[]): string {
  tables.forEach((t, i) => requireColumns(t, TIMESERIES_COLUMNS, spec.inputs[i]));
  let ymin = Infinity, ymax = -Infinity, tmax = 0;
  const series = tables.map((t) => {
    const time = column(t, "t");
    let energy = column(t, "energy");
    if (spec.normalize && energy[0] !== 0) energy = energy.map((e) => e / energy[0]);
    tmax = Math.max(tmax, ...time);
    ymin = Math.min(ymin, ...energy);
    ymax = Math.max(ymax, ...energy);
    return { time, energy };
  });
  const pad = 0.05 * (ymax - ymin || 1);
  const p = panel(0, tmax, ymin - pad, ymax + pad);
  p.axes("t", spec.normalize ? "E(t) / E(0)" : "magnetic energy");
  const legend: LegendEntry[] = [];
  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    p.line(s.time, s.energy, color);
    legend.push({ label: spec.labels[i], color });
  });
  return svgDocument(W, H, p.parts, spec.title || "Magnetic energy", legend);
}

export function divCompare(spec: FigureSpec, tables: Table[]): string {
  tables.forEach((t, i) => requireColumns(t, TIMESERIES_COLUMNS, spec.inputs[i]));
  let ymin = Infinity, ymax = -Infinity, tmax = 0;
  const floor = 1e-18;
  const series = tables.map((t) => {
    const time = column(t, "t");
    const surface = column(t, "div_surface").map((v) => Math.max(v, floor));
    const volume = column(t, "div_volume").map((v) => Math.max(v, floor));
    tmax = Math.max(tmax, ...time);
    ymin = Math.min(ymin, ...surface, ...volume);
    ymax = Math.max(ymax, ...surface, ...volume);
    return { time, surface, volume };
  });
  const p = panel(0, tmax, Math.max(ymin / 10, floor), ymax * 10 || 1, true);
  p.axes("t", "divergence norm terms", true);
  const legend: LegendEntry[] = [];
  series.forEach((s, i) => {
    const color = COLORS[i % COLORS.length];
    p.line(s.time, s.surface, color);
    p.line(s.time, s.volume, color, 1.5, "5,3");
    legend.push({ label: `${spec.labels[i]} surface`, color });
    legend.push({ label: `${spec.labels[i]} volume`, color, dash: "5,3" });
  });
  return svgDocument(W, H, p.parts, spec.title || "Divergence errors", legend);
}

export function dispersion(spec: FigureSpec, tables: Table[]): string {
  tables.forEach((t, i) => requireColumns(t, ["n", "k", "re_omega", "im_omega"], spec.inputs[i]));
  // group rows by degree across all inputs
  const groups = new Map<string, { k: number[]; re: number[]; im: number[] }>();
  for (const t of tables) {
    const n = t.raw.get("n")!;
    const k = column(t, "k");
    const re = column(t, "re_omega");
    const im = column(t, "im_omega");
    for (let i = 0; i < t.rows; i++) {
      if (!groups.has(n[i])) groups.set(n[i], { k: [], re: [], im: [] });
      const g = groups.get(n[i])!;
      g.k.push(k[i]); g.re.push(re[i]); g.im.push(im[i]);
    }
  }
  let kmax = 0, reMax = 0, imMin = 0;
  for (const g of groups.values()) {
    kmax = Math.max(kmax, ...g.k);
    reMax = Math.max(reMax, ...g.re.map(Math.abs));
    imMin = Math.min(imMin, ...g.im);
  }
  const width = (W - MARGIN.left - MARGIN.right - 40) / 2;
  const height = H - MARGIN.top - MARGIN.bottom;
  const left = new Panel(MARGIN.left, MARGIN.top, width, height,
    linearScale(0, kmax, 0, width), linearScale(0, Math.max(reMax, spec.velocity * kmax), 0, height));
  const right = new Panel(MARGIN.left + width + 40, MARGIN.top, width, height,
    linearScale(0, kmax, 0, width), linearScale(imMin * 1.05 || -1, 0.05 * Math.abs(imMin) || 1, 0, height));
  left.axes("k", "Re w");
  right.axes("k", "Im w");
  // exact references in grey: Re w = v k and Im w = 0
  left.line([0, kmax], [0, spec.velocity * kmax], GREY, 2);
  right.line([0, kmax], [0, 0], GREY, 2);
  const legend: LegendEntry[] = [{ label: "exact", color: GREY }];
  let ci = 0;
  for (const [n, g] of [...groups.entries()].sort((a, b) => Number(a[0]) - Number(b[0]))) {
    const color = COLORS[ci % COLORS.length];
    left.line(g.k, g.re, color);
    right.line(g.k, g.im, color);
    legend.push({ label: `n = ${n}`, color });
    ci += 1;
  }
  return svgDocument(W, H, [...left.parts, ...right.parts],
    spec.title || "Dispersion and diffusion", legend);
}

export function stabilityRegion(spec: FigureSpec, tables: Table[]): string {
  tables.forEach((t, i) => requireColumns(t, ["n", "re_z", "im_z", "abs_p"], spec.inputs[i]));
  const p = panelFromExtents(tables);
  p.axes("Re z", "Im z");
  const legend: LegendEntry[] = [];
  let ci = 0;
  for (const t of tables) {
    const byN = new Map<string, { re: number[]; im: number[]; abs: number[] }>();
    const ns = t.raw.get("n")!;
    const re = column(t, "re_z"), im = column(t, "im_z"), ap = column(t, "abs_p");
    for (let i = 0; i < t.rows; i++) {
      if (!byN.has(ns[i])) byN.set(ns[i], { re: [], im: [], abs: [] });
      const g = byN.get(ns[i])!;
      g.re.push(re[i]); g.im.push(im[i]); g.abs.push(ap[i]);
    }
    for (const [n, g] of [...byN.entries()].sort((a, b) => Number(a[0]) - Number(b[0]))) {
      const xs = [...new Set(g.re)].sort((a, b) => a - b);
      const ys = [...new Set(g.im)].sort((a, b) => a - b);
      const grid: number[][] = xs.map(() => ys.map(() => NaN));
      const xi = new Map(xs.map((v, i) => [v, i]));
      const yi = new Map(ys.map((v, i) => [v, i]));
      for (let i = 0; i < g.re.length; i++) {
        grid[xi.get(g.re[i])!][yi.get(g.im[i])!] = g.abs[i];
      }
      const color = COLORS[ci % COLORS.length];
      ci += 1;
      for (const s of isoSegments(xs, ys, grid, 1.0)) {
        p.parts.push(
          `<line x1="${p.px(s.x0).toFixed(2)}" y1="${p.py(s.y0).toFixed(2)}" ` +
          `x2="${p.px(s.x1).toFixed(2)}" y2="${p.py(s.y1).toFixed(2)}" ` +
          `stroke="${color}" stroke-width="1.5"/>`,
        );
      }
      legend.push({ label: `n = ${n}`, color });
    }
  }
  return svgDocument(W, H, p.parts, spec.title || "|P| = 1 stability boundaries", legend);
}

function panelFromExtents(tables: Table[]): Panel {
  let xlo = Infinity, xhi = -Infinity, ylo = Infinity, yhi = -Infinity;
  for (const t of tables) {
    const re = column(t, "re_z"), im = column(t, "im_z");
    xlo = Math.min(xlo, ...re); xhi = Math.max(xhi, ...re);
    ylo = Math.min(ylo, ...im); yhi = Math.max(yhi, ...im);
  }
  return panel(xlo, xhi, ylo, yhi);
}

export function fieldmap(spec: FigureSpec, tables: Table[]): string {
  const t = tables[0];
  requireColumns(t, ["i", "j", "x_center", "y_center", "energy_density_normalized"], spec.inputs[0]);
  const xs = column(t, "x_center"), ys = column(t, "y_center");
  const vals = column(t, "energy_density_normalized");
  const xu = [...new Set(xs)].sort((a, b) => a - b);
  const yu = [...new Set(ys)].sort((a, b) => a - b);
  const size = H - MARGIN.top - MARGIN.bottom;
  const p = new Panel(MARGIN.left, MARGIN.top, size, size,
    linearScale(0, 1, 0, size), linearScale(0, 1, 0, size));
  const xEdges = cellEdges(xu), yEdges = cellEdges(yu);
  const xi = new Map(xu.map((v, i) => [v, i]));
  const yi = new Map(yu.map((v, i) => [v, i]));
  for (let r = 0; r < t.rows; r++) {
    const a = xi.get(xs[r])!, b = yi.get(ys[r])!;
    // fixed [0, 1] scale so artefact amplitudes compare across schemes
    p.cell(xEdges[a], xEdges[a + 1], yEdges[b], yEdges[b + 1], heatColor(vals[r]));
  }
  p.axes("x", "y");
  return svgDocument(W, H, p.parts, spec.title || "Normalised magnetic energy density");
}

function cellEdges(centers: number[]): number[] {
  const edges = [Math.max(0, centers[0] - (centers[1] - centers[0]) / 2)];
  for (let i = 0; i + 1 < centers.length; i++) edges.push((centers[i] + centers[i + 1]) / 2);
  const last = centers[centers.length - 1];
  edges.push(Math.min(1, last + (last - centers[centers.length - 2]) / 2));
  return edges;
}

export function convergence(spec: FigureSpec, tables: Table[]): string {
  const t = tables[0];
  requireColumns(t, ["n", "N", "dx", "l1_bx", "l1_by", "order_bx", "order_by"], spec.inputs[0]);
  const ns = t.raw.get("n")!;
  const N = column(t, "N"), l1 = column(t, "l1_bx"), orders = t.raw.get("order_bx")!;
  let lmin = Infinity, lmax = -Infinity, nmin = Infinity, nmax = -Infinity;
  for (let i = 0; i < t.rows; i++) {
    lmin = Math.min(lmin, l1[i]); lmax = Math.max(lmax, l1[i]);
    nmin = Math.min(nmin, N[i]); nmax = Math.max(nmax, N[i]);
  }
  const width = W - MARGIN.left - MARGIN.right;
  const height = H - MARGIN.top - MARGIN.bottom;
  const p = new Panel(MARGIN.left, MARGIN.top, width, height,
    logScale(nmin / 1.2, nmax * 1.2, 0, width), logScale(lmin / 10, lmax * 10, 0, height));
  p.axes("N (elements per side)", "L1 error of Bx", true);
  const legend: LegendEntry[] = [];
  const groups = new Map<string, { N: number[]; l1: number[]; lastOrder: string }>();
  for (let i = 0; i < t.rows; i++) {
    if (!groups.has(ns[i])) groups.set(ns[i], { N: [], l1: [], lastOrder: "" });
    const g = groups.get(ns[i])!;
    g.N.push(N[i]); g.l1.push(l1[i]);
    if (orders[i] !== "") g.lastOrder = Number(orders[i]).toFixed(2);
  }
  let ci = 0;
  for (const [n, g] of [...groups.entries()].sort((a, b) => Number(a[0]) - Number(b[0]))) {
    const color = COLORS[ci % COLORS.length];
    ci += 1;
    p.line(g.N, g.l1, color);
    legend.push({ label: `n = ${n} (order ${g.lastOrder || "-"})`, color });
  }
  return svgDocument(W, H, p.parts, spec.title || "Smooth-advection convergence", legend);
}
