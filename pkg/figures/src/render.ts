/** Spec-driven rendering: read the input CSVs, build the SVG, write it. */

import { mkdirSync, writeFileSync } from "node:fs";
import { dirname } from "node:path";

import { readCsv, Table } from "./csv.js";
import {
  convergence, dispersion, divCompare, energyCompare, fieldmap, stabilityRegion,
} from "./figures.js";
import { FigureSpec } from "./spec.js";

const BUILDERS: Record<FigureSpec["figure"], (s: FigureSpec, t: Table[]) => string> = {
  energy_compare: energyCompare,
  div_compare: divCompare,
  dispersion,
  stability_region: stabilityRegion,
  fieldmap,
  convergence,
};

export function renderToString(spec: FigureSpec): string {
  const tables = spec.inputs.map(readCsv);
  return BUILDERS[spec.figure](spec, tables);
}

export function render(spec: FigureSpec): string {
  const svg = renderToString(spec);
  mkdirSync(dirname(spec.output) || ".", { recursive: true });
  writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}
