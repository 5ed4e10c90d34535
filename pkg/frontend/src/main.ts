/** Shared entry-point plumbing for the per-figure scripts. */

import { writeFileSync } from "node:fs";
import { parseArgs } from "node:util";

import { SchemaError } from "./csv.js";

export function runFigure(
  kind: string,
  argv: string[],
  render: (inputs: string[], markers: number[]) => string,
): number {
  const { values } = parseArgs({
    args: argv,
    options: {
      input: { type: "string", multiple: true },
      out: { type: "string" },
      marker: { type: "string", multiple: true },
    },
  });
  const inputs = values.input ?? [];
  if (inputs.length === 0 || !values.out) {
    console.error(`usage: ${kind} --input data.csv [--input more.csv] --out figure.svg [--marker s]`);
    return 2;
  }
  const markers = (values.marker ?? []).map(Number);
  try {
    const svg = render(inputs, markers);
    writeFileSync(values.out, svg, "utf8");
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 3;
    }
    throw err;
  }
  console.log(`wrote ${values.out}`);
  return 0;
}
