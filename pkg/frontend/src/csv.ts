/**
 * Reading and validation of experiment CSVs (shared schema).
 *
 * Rows keep their string cells; numeric access goes through `num`, which
 * distinguishes empty cells (null) from parse failures (error).
 */

import { readFileSync } from "fs";
import Papa from "papaparse";

export const BASE_COLUMNS = [
  "experiment",
  "architecture",
  "distance_km",
  "n_segments",
  "channels",
  "eta_c",
  "eps_g",
  "xi",
  "t2_s",
  "rule",
  "f_th",
  "schedule",
  "skr_per_burst",
  "skr_per_channel_use",
  "fidelity",
  "secret_fraction",
  "expected_pairs",
  "repeaters",
  "qubits",
  "gates",
  "measurements",
  "qubits_per_key",
  "gates_per_key",
  "measurements_per_key",
] as const;

export type Row = Record<string, string>;

export class SchemaError extends Error {}

export function parseCsvText(text: string, source = "<string>"): Row[] {
  const parsed = Papa.parse<Row>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const first = parsed.errors[0];
    throw new SchemaError(`${source}: malformed CSV (${first.message})`);
  }
  const header = parsed.meta.fields ?? [];
  for (const column of BASE_COLUMNS) {
    if (!header.includes(column)) {
      throw new SchemaError(`${source}: missing column '${column}'`);
    }
  }
  return parsed.data;
}

export function readCsv(path: string): Row[] {
  return parseCsvText(readFileSync(path, "utf-8"), path);
}

/** Numeric cell value; empty cells become null. */
export function num(row: Row, column: string): number | null {
  const cell = row[column];
  if (cell === undefined || cell === "") return null;
  const value = Number(cell);
  if (Number.isNaN(value)) {
    throw new SchemaError(`cell '${cell}' in column '${column}' is not numeric`);
  }
  return value;
}

/** The single experiment name carried by the rows. */
export function experimentOf(rows: Row[], source = "<rows>"): string {
  const names = new Set(rows.map((r) => r.experiment));
  if (names.size !== 1) {
    throw new SchemaError(
      `${source}: expected exactly one experiment, found [${[...names].join(", ")}]`
    );
  }
  return rows[0].experiment;
}
