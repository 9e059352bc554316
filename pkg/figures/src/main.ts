#!/usr/bin/env node
/** CLI: `render --spec <path>` regenerates one figure from solver CSVs. */

import { parseArgs } from "node:util";

import { SchemaError } from "./csv.js";
import { render } from "./render.js";
import { loadSpec, SpecError } from "./spec.js";

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  if (command !== "render") {
    console.error("usage: induction2d-figures render --spec <path>");
    return 2;
  }
  let specPath: string | undefined;
  try {
    const { values } = parseArgs({
      args: rest,
      options: { spec: { type: "string" } },
    });
    specPath = values.spec;
  } catch (err) {
    console.error(String(err));
    return 2;
  }
  if (!specPath) {
    console.error("render needs --spec <path>");
    return 2;
  }
  try {
    const out = render(loadSpec(specPath));
    console.log(`wrote ${out}`);
    return 0;
  } catch (err) {
    if (err instanceof SpecError || err instanceof SchemaError) {
      console.error(`spec error: ${err.message}`);
      return 2;
    }
    console.error(String(err));
    return 1;
  }
}

import { pathToFileURL } from "node:url";

if (process.argv[1] && import.meta.url === pathToFileURL(process.argv[1]).href) {
  process.exit(main(process.argv.slice(2)));
}
