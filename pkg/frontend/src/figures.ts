/**
 * Figure assembly: experiment rows -> plot panels.
 *
 * One series per configuration group: relay curves keyed by
 * (channels, segment count) with one dashed M*pi0 bound line per channel
 * count, sweep curves keyed by segment count, envelope and cost curves
 * keyed by architecture label.  All numbers come straight from the CSV;
 * nothing is recomputed here beyond plotting transforms.
 */

import { num, Row, SchemaError } from "./csv";
import { Panel, Series } from "./svg";

export const FIGURE_KINDS = [
  "relay-expectation",
  "mtp-sweep",
  "envelope-compare",
  "cost-compare",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  rows: Row[];
  source?: string;
}

function byNumericThenText(a: string, b: string): number {
  // natural order so N=2 sorts before N=16
  const split = (s: string) => s.split(/(\d+)/).filter((part) => part !== "");
  const pa = split(a);
  const pb = split(b);
  for (let i = 0; i < Math.min(pa.length, pb.length); i++) {
    const na = Number(pa[i]);
    const nb = Number(pb[i]);
    if (!Number.isNaN(na) && !Number.isNaN(nb)) {
      if (na !== nb) return na - nb;
    } else if (pa[i] !== pb[i]) {
      return pa[i] < pb[i] ? -1 : 1;
    }
  }
  return pa.length - pb.length;
}

function groupSeries(
  rows: Row[],
  keyOf: (row: Row) => string,
  xColumn: string,
  yColumn: string,
  kind: "series" | "bound" = "series"
): Series[] {
  const groups = new Map<string, Array<[number, number]>>();
  for (const row of rows) {
    const x = num(row, xColumn);
    const y = num(row, yColumn);
    if (x === null || y === null) continue;
    const key = keyOf(row);
    if (!groups.has(key)) groups.set(key, []);
    groups.get(key)!.push([x, y]);
  }
  return [...groups.keys()].sort(byNumericThenText).map((label) => ({
    label,
    kind,
    points: groups.get(label)!.sort((p, q) => p[0] - q[0]),
  }));
}

function relayPanels(rows: Row[]): Panel[] {
  const relay = rows.filter((r) => r.architecture === "relay");
  const bound = rows.filter((r) => r.architecture === "bound");
  const series = [
    ...groupSeries(
      relay,
      (r) => `M=${r.channels} N=${r.n_segments}`,
      "distance_km",
      "expected_pairs"
    ),
    ...groupSeries(
      bound,
      (r) => `M*pi0 bound (M=${r.channels})`,
      "distance_km",
      "expected_pairs",
      "bound"
    ),
  ];
  return [
    {
      title: "Expected delivered pairs per burst",
      x: { label: "inter-repeater distance [km]", scale: "linear" },
      y: { label: "expected pairs", scale: "linear" },
      series,
    },
  ];
}

function sweepPanels(rows: Row[]): Panel[] {
  return [
    {
      title: "Two-way secret-key rate vs distance",
      x: { label: "total distance [km]", scale: "log" },
      y: { label: "SKR per channel use per burst", scale: "log" },
      series: groupSeries(
        rows,
        (r) => `N=${r.n_segments}`,
        "distance_km",
        "skr_per_channel_use"
      ),
    },
  ];
}

function envelopePanels(rows: Row[]): Panel[] {
  return [
    {
      title: "Best-configuration secret-key rates",
      x: { label: "total distance [km]", scale: "log" },
      y: { label: "SKR per channel use per burst", scale: "log" },
      series: groupSeries(
        rows,
        (r) => r.architecture,
        "distance_km",
        "skr_per_channel_use"
      ),
    },
  ];
}

function costPanels(rows: Row[]): Panel[] {
  const metric = (column: string, title: string, yLabel: string): Panel => ({
    title,
    x: { label: "total distance [km]", scale: "log" },
    y: { label: yLabel, scale: "log" },
    series: groupSeries(rows, (r) => r.architecture, "distance_km", column),
  });
  return [
    metric("repeaters", "Repeater stations", "repeaters"),
    metric("qubits_per_key", "Qubits per unit secret key", "qubits / key"),
    metric("gates_per_key", "Two-qubit gates per unit secret key", "gates / key"),
    metric("measurements_per_key", "Measurements per unit secret key", "measurements / key"),
  ];
}

export function buildPanels(spec: FigureSpec): Panel[] {
  const source = spec.source ?? "<rows>";
  if (spec.rows.length === 0) {
    throw new SchemaError(`${source}: no data rows`);
  }
  const experiment = spec.rows[0].experiment;
  if (experiment !== spec.kind) {
    throw new SchemaError(
      `${source}: experiment column says '${experiment}', not '${spec.kind}'`
    );
  }
  switch (spec.kind) {
    case "relay-expectation":
      return relayPanels(spec.rows);
    case "mtp-sweep":
      return sweepPanels(spec.rows);
    case "envelope-compare":
      return envelopePanels(spec.rows);
    case "cost-compare":
      return costPanels(spec.rows);
  }
}
