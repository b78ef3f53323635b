/**
 * Figure builders: one echarts option per experiment kind.
 *
 * Log-log figures carry dashed guide lines at slopes 2, 2.5, and 0.5 anchored
 * to the first data point; the footer always echoes the run seed and config
 * hash so a figure stays traceable to the run that produced it.
 */

import type { EChartsOption, SeriesOption } from "echarts";
import type { ManifestInfo, ResultRow } from "./schema.js";

export const FIGURE_KINDS = ["order", "local-order", "contract", "bias", "dims", "bound"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  input: string;
  kind: FigureKind;
  output: string;
  manifest?: string;
  width?: number;
  height?: number;
}

interface KindLayout {
  pointStatistic: string;
  slopeStatistic: string | null;
  x: (row: ResultRow) => number | null;
  xLabel: string;
  yLabel: string;
  logX: boolean;
  guides: number[];
}

const LAYOUTS: Record<FigureKind, KindLayout> = {
  order: {
    pointStatistic: "endpoint_error",
    slopeStatistic: "strong_order_slope",
    x: (row) => row.h,
    xLabel: "step size h",
    yLabel: "endpoint error (P-norm, L2)",
    logX: true,
    guides: [2, 2.5, 0.5],
  },
  "local-order": {
    pointStatistic: "one_step_error",
    slopeStatistic: "local_order_slope",
    x: (row) => row.h,
    xLabel: "step size h",
    yLabel: "one-step error (P-norm, L2)",
    logX: true,
    guides: [2, 2.5, 0.5],
  },
  bias: {
    pointStatistic: "plateau_distance",
    slopeStatistic: "slope_vs_h",
    x: (row) => row.h,
    xLabel: "step size h",
    yLabel: "plateau coupling distance",
    logX: true,
    guides: [2, 2.5, 0.5],
  },
  dims: {
    pointStatistic: "plateau_distance",
    slopeStatistic: "slope_vs_d",
    x: (row) => row.d,
    xLabel: "dimension d",
    yLabel: "plateau coupling distance",
    logX: true,
    guides: [2, 2.5, 0.5],
  },
  contract: {
    pointStatistic: "pnorm_distance",
    slopeStatistic: "rate_fit",
    x: (row) => row.n,
    xLabel: "step n",
    yLabel: "coupled-chain P-distance",
    logX: false,
    guides: [],
  },
  bound: {
    pointStatistic: "coupling_distance",
    slopeStatistic: null,
    x: (row) => row.n,
    xLabel: "step n",
    yLabel: "distance to stationarity",
    logX: false,
    guides: [],
  },
};

export interface SlopeAnnotation {
  statistic: string;
  value: number;
  stderr: number | null;
  theory: number | null;
}

/** The fitted-slope summary row for a kind, if the CSV carries one. */
export function slopeAnnotation(rows: ResultRow[], kind: FigureKind): SlopeAnnotation | null {
  const layout = LAYOUTS[kind];
  if (!layout.slopeStatistic) return null;
  const row = rows.find((r) => r.statistic === layout.slopeStatistic);
  if (!row) return null;
  return {
    statistic: row.statistic,
    value: row.value,
    stderr: row.std_error,
    theory: row.theory,
  };
}

function guideSeries(points: [number, number][], slope: number): SeriesOption {
  const [x0, y0] = points[0];
  const xs = points.map(([x]) => x);
  const lo = Math.min(...xs);
  const hi = Math.max(...xs);
  return {
    name: `slope ${slope}`,
    type: "line",
    showSymbol: false,
    lineStyle: { type: "dashed", width: 1, opacity: 0.6 },
    data: [lo, hi].map((x) => [x, y0 * Math.pow(x / x0, slope)]),
    silent: true,
  };
}

/** Assemble the echarts option for one parsed CSV. */
export function buildFigure(rows: ResultRow[], kind: FigureKind, manifest: ManifestInfo): EChartsOption {
  const layout = LAYOUTS[kind];
  const pointRows = rows.filter((r) => r.statistic === layout.pointStatistic && layout.x(r) !== null);
  if (pointRows.length === 0) {
    throw new Error(`no '${layout.pointStatistic}' rows for kind '${kind}'`);
  }
  const points = pointRows
    .map((r) => [layout.x(r) as number, r.value] as [number, number])
    .sort((a, b) => a[0] - b[0]);

  const series: SeriesOption[] = [
    {
      name: layout.pointStatistic,
      type: "line",
      data: points,
      symbolSize: 7,
    },
  ];
  if (layout.logX) {
    for (const slope of layout.guides) {
      series.push(guideSeries(points, slope));
    }
  }
  const theoryPoints = pointRows
    .filter((r) => r.theory !== null)
    .map((r) => [layout.x(r) as number, r.theory as number] as [number, number])
    .sort((a, b) => a[0] - b[0]);
  if (theoryPoints.length === points.length) {
    series.push({
      name: "theory",
      type: "line",
      data: theoryPoints,
      showSymbol: false,
      lineStyle: { type: "dotted", width: 2 },
    });
  }

  const annotation = slopeAnnotation(rows, kind);
  const pieces: string[] = [];
  if (annotation) {
    let label = `${annotation.statistic} = ${annotation.value.toFixed(3)}`;
    if (annotation.stderr !== null) label += ` ± ${annotation.stderr.toFixed(3)}`;
    if (annotation.theory !== null) label += ` (ref ${annotation.theory})`;
    pieces.push(label);
  }
  pieces.push(`seed ${manifest.seed ?? "?"}`, `cfg ${manifest.configHash ?? "?"}`);

  const model = pointRows[0].model;
  // log axes cannot hold zeros (e.g. a coupling distance starting at 0)
  const allPositive = points.every(([, y]) => y > 0) && theoryPoints.every(([, y]) => y > 0);
  return {
    animation: false,
    backgroundColor: "#ffffff",
    title: {
      text: `${kind}: ${model}`,
      subtext: pieces.join("  |  "),
      left: "center",
    },
    grid: { left: 70, right: 30, top: 80, bottom: 55 },
    legend: { bottom: 0 },
    xAxis: {
      type: layout.logX ? "log" : "value",
      name: layout.xLabel,
      nameLocation: "middle",
      nameGap: 28,
    },
    yAxis: {
      type: allPositive ? "log" : "value",
      name: layout.yLabel,
      nameLocation: "middle",
      nameGap: 55,
    },
    series,
  };
}
