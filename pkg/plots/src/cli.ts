#!/usr/bin/env node
/**
 * ubukit-plots: render an experiment CSV to an SVG figure.
 *
 * Usage:
 *   ubukit-plots --input runs/order.csv --kind order --output order.svg
 *                [--manifest runs/order.json] [--width 880] [--height 620]
 *
 * The manifest defaults to the CSV's sibling .json; its seed and config hash
 * are stamped into the figure subtitle.
 */

import { pathToFileURL } from "node:url";
import { FIGURE_KINDS } from "./figures.js";
import { isFigureKind, renderFigure } from "./render.js";

const USAGE =
  "usage: ubukit-plots --input CSV --kind " +
  `{${FIGURE_KINDS.join("|")}}` +
  " --output SVG [--manifest JSON] [--width N] [--height N]";

function parseArgs(argv: string[]): Map<string, string> {
  const out = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (!flag.startsWith("--") || value === undefined) {
      throw new Error(`bad argument '${flag}'`);
    }
    out.set(flag.slice(2), value);
  }
  return out;
}

export function main(argv: string[]): number {
  let args: Map<string, string>;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    console.error(USAGE);
    return 1;
  }
  const input = args.get("input");
  const kind = args.get("kind");
  const output = args.get("output");
  if (!input || !kind || !output) {
    console.error("missing required flag(s): --input, --kind, --output");
    console.error(USAGE);
    return 1;
  }
  if (!isFigureKind(kind)) {
    console.error(`unknown kind '${kind}' (want one of ${FIGURE_KINDS.join(", ")})`);
    return 1;
  }
  try {
    const path = renderFigure({
      input,
      kind,
      output,
      manifest: args.get("manifest"),
      width: args.has("width") ? Number(args.get("width")) : undefined,
      height: args.has("height") ? Number(args.get("height")) : undefined,
    });
    console.log(`wrote ${path}`);
    return 0;
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url === pathToFileURL(process.argv[1]).href;
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
