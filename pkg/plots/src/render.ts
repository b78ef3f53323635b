/** Headless SVG rendering of experiment figures via the echarts SSR mode. */

import { writeFileSync } from "node:fs";
import * as echarts from "echarts";
import { buildFigure, type FigureKind, type FigureSpec } from "./figures.js";
import { loadManifest, manifestPathFor, parseResultsCsv } from "./schema.js";

/** Render one CSV to an SVG string (input files are never modified). */
export function renderToSvg(spec: FigureSpec): string {
  const rows = parseResultsCsv(spec.input);
  const kindsInFile = new Set(rows.map((r) => r.kind));
  if (!kindsInFile.has(spec.kind)) {
    throw new Error(
      `${spec.input}: holds kind(s) [${[...kindsInFile].join(", ")}], not '${spec.kind}'`,
    );
  }
  const manifest = loadManifest(spec.manifest ?? manifestPathFor(spec.input));
  const option = buildFigure(rows, spec.kind, manifest);
  const chart = echarts.init(null, null, {
    renderer: "svg",
    ssr: true,
    width: spec.width ?? 880,
    height: spec.height ?? 620,
  });
  try {
    chart.setOption(option);
    // zrender bakes process-global counters into CSS class names; remap them
    // to first-occurrence order so identical input yields byte-identical SVG
    return canonicalizeClassNames(chart.renderToSVGString());
  } finally {
    chart.dispose();
  }
}

function canonicalizeClassNames(svg: string): string {
  // instance prefix (zr7-...) appears in clip-path ids and class names
  const stripped = svg.replace(/zr\d+-/g, "zr-");
  const seen = new Map<string, string>();
  return stripped.replace(/zr-cls-\d+/g, (name) => {
    let canon = seen.get(name);
    if (canon === undefined) {
      canon = `zr-cls-${seen.size}`;
      seen.set(name, canon);
    }
    return canon;
  });
}

/** Render and persist; returns the output path. */
export function renderFigure(spec: FigureSpec): string {
  const svg = renderToSvg(spec);
  writeFileSync(spec.output, svg, "utf-8");
  return spec.output;
}

export function isFigureKind(value: string): value is FigureKind {
  return ["order", "local-order", "contract", "bias", "dims", "bound"].includes(value);
}
