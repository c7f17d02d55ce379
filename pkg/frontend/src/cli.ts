#!/usr/bin/env node
/**
 * percolab-render: turn a percolab result CSV into an SVG figure.
 *
 *   render --kind KIND --in results.csv --out figure.svg
 *
 * On any error (bad arguments, unknown schema, empty data) the process exits
 * nonzero and the output file is not written.
 */

import { readFileSync, writeFileSync } from "node:fs";
import { CsvError, parseCsv } from "./csv.js";
import { PLOT_KINDS, PlotKind, render } from "./plots.js";

const USAGE =
  "usage: percolab-render render --kind " +
  `{${PLOT_KINDS.join("|")}} --in FILE --out FILE.svg`;

export function main(argv: string[]): number {
  let args: { kind: PlotKind; input: string; output: string };
  try {
    args = parseArgs(argv);
  } catch (err) {
    process.stderr.write(`${(err as Error).message}\n${USAGE}\n`);
    return 2;
  }

  let csvText: string;
  try {
    csvText = readFileSync(args.input, "utf8");
  } catch (err) {
    process.stderr.write(`cannot read ${args.input}: ${(err as Error).message}\n`);
    return 1;
  }

  let svg: string;
  try {
    svg = render(args.kind, parseCsv(csvText));
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`${err.message}\n`);
      return 1;
    }
    throw err;
  }

  writeFileSync(args.output, svg, "utf8");
  return 0;
}

function parseArgs(argv: string[]): {
  kind: PlotKind; input: string; output: string;
} {
  if (argv[0] !== "render") {
    throw new Error(`expected the 'render' command, got '${argv[0] ?? ""}'`);
  }
  const opts = new Map<string, string>();
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`bad argument: ${flag}`);
    }
    opts.set(flag.slice(2), value);
  }
  const kind = opts.get("kind");
  const input = opts.get("in");
  const output = opts.get("out");
  if (kind === undefined || input === undefined || output === undefined) {
    throw new Error("--kind, --in, and --out are all required");
  }
  if (!(PLOT_KINDS as string[]).includes(kind)) {
    throw new Error(`unknown plot kind: ${kind}`);
  }
  return { kind: kind as PlotKind, input, output };
}

const isDirect = process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (isDirect) {
  process.exit(main(process.argv.slice(2)));
}
