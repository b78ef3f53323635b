/**
 * Parsing and validation of ubukit experiment CSVs and their JSON manifests.
 *
 * Every experiment CSV shares one documented header; rows carry per-point
 * statistics (with standard errors) and summary rows (fitted slopes with the
 * reference exponent in `theory`).
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export const CSV_COLUMNS = [
  "kind",
  "statistic",
  "model",
  "d",
  "gamma",
  "cbar",
  "c",
  "h",
  "n",
  "n_replicas",
  "value",
  "std_error",
  "theory",
  "seed",
  "wall_clock_s",
] as const;

export interface ResultRow {
  kind: string;
  statistic: string;
  model: string;
  d: number;
  gamma: number;
  cbar: number;
  c: number;
  h: number | null;
  n: number | null;
  n_replicas: number;
  value: number;
  std_error: number | null;
  theory: number | null;
  seed: number;
  wall_clock_s: number;
}

export interface ManifestInfo {
  seed: number | null;
  configHash: string | null;
}

function toNumber(raw: string | undefined, column: string, line: number): number {
  if (raw === undefined || raw.trim() === "") {
    throw new Error(`line ${line}: missing value in column '${column}'`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new Error(`line ${line}: non-numeric value '${raw}' in column '${column}'`);
  }
  return value;
}

function toOptional(raw: string | undefined): number | null {
  if (raw === undefined || raw.trim() === "") return null;
  const value = Number(raw);
  if (!Number.isFinite(value)) return null;
  return value;
}

/** Read and validate one experiment CSV; throws naming the file or column. */
export function parseResultsCsv(path: string): ResultRow[] {
  const text = readFileSync(path, "utf-8");
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new Error(`${path}: malformed CSV (${first.message})`);
  }
  const fields = parsed.meta.fields ?? [];
  for (const column of CSV_COLUMNS) {
    if (!fields.includes(column)) {
      throw new Error(`${path}: missing column '${column}'`);
    }
  }
  if (parsed.data.length === 0) {
    throw new Error(`${path}: no data rows`);
  }
  return parsed.data.map((raw, idx) => {
    const line = idx + 2;
    return {
      kind: raw.kind ?? "",
      statistic: raw.statistic ?? "",
      model: raw.model ?? "",
      d: toNumber(raw.d, "d", line),
      gamma: toNumber(raw.gamma, "gamma", line),
      cbar: toNumber(raw.cbar, "cbar", line),
      c: toNumber(raw.c, "c", line),
      h: toOptional(raw.h),
      n: toOptional(raw.n),
      n_replicas: toNumber(raw.n_replicas, "n_replicas", line),
      value: toNumber(raw.value, "value", line),
      std_error: toOptional(raw.std_error),
      theory: toOptional(raw.theory),
      seed: toNumber(raw.seed, "seed", line),
      wall_clock_s: toNumber(raw.wall_clock_s, "wall_clock_s", line),
    };
  });
}

/** Pull the seed and config hash out of a run manifest, if one exists. */
export function loadManifest(path: string): ManifestInfo {
  let text: string;
  try {
    text = readFileSync(path, "utf-8");
  } catch {
    return { seed: null, configHash: null };
  }
  const data = JSON.parse(text) as { seed?: number; config_hash?: string };
  return {
    seed: typeof data.seed === "number" ? data.seed : null,
    configHash: typeof data.config_hash === "string" ? data.config_hash : null,
  };
}

/** Default manifest path: the CSV's sibling `<stem>.json`. */
export function manifestPathFor(csvPath: string): string {
  return csvPath.replace(/\.csv$/i, ".json");
}
