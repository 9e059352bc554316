/** Figure specs in the same flat `key = value` format the solver CLI uses. */

import { readFileSync } from "node:fs";

export const FIGURE_IDS = [
  "energy_compare",
  "div_compare",
  "dispersion",
  "stability_region",
  "fieldmap",
  "convergence",
] as const;

export type FigureId = (typeof FIGURE_IDS)[number];

export interface FigureSpec {
  figure: FigureId;
  inputs: string[];
  labels: string[];
  output: string;
  normalize: boolean;
  velocity: number;
  title: string;
}

export class SpecError extends Error {}

export function parseKeyValues(text: string, context = "spec"): Map<string, string> {
  const values = new Map<string, string>();
  const lines = text.split(/\r?\n/);
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].split("#", 1)[0].trim();
    if (line.length === 0) continue;
    const eq = line.indexOf("=");
    if (eq < 0) throw new SpecError(`${context}:${i + 1}: expected 'key = value'`);
    values.set(line.slice(0, eq).trim(), line.slice(eq + 1).trim());
  }
  return values;
}

function basename(path: string): string {
  const file = path.split("/").pop() ?? path;
  return file.replace(/\.csv$/, "");
}

export function specFromValues(values: Map<string, string>): FigureSpec {
  const figure = values.get("figure");
  if (!figure || !(FIGURE_IDS as readonly string[]).includes(figure)) {
    throw new SpecError(
      `figure must be one of ${FIGURE_IDS.join(", ")}, got '${figure ?? ""}'`,
    );
  }
  const inputsRaw = values.get("inputs");
  if (!inputsRaw) throw new SpecError("spec needs 'inputs = path[,path...]'");
  const inputs = inputsRaw.split(",").map((p) => p.trim()).filter((p) => p.length > 0);
  if (inputs.length === 0) throw new SpecError("'inputs' lists no paths");
  const output = values.get("output");
  if (!output) throw new SpecError("spec needs 'output = <image path>'");
  const labels = values.has("labels")
    ? values.get("labels")!.split(",").map((s) => s.trim())
    : inputs.map(basename);
  if (labels.length !== inputs.length) {
    throw new SpecError("'labels' must list one entry per input");
  }
  const normalize = (values.get("normalize") ?? "true").toLowerCase() !== "false";
  const velocity = Number(values.get("velocity") ?? "1.0");
  if (!Number.isFinite(velocity)) throw new SpecError("'velocity' must be a number");
  return {
    figure: figure as FigureId,
    inputs,
    labels,
    output,
    normalize,
    velocity,
    title: values.get("title") ?? "",
  };
}

export function loadSpec(path: string): FigureSpec {
  return specFromValues(parseKeyValues(readFileSync(path, "utf-8"), path));
}
