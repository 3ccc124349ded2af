#!/usr/bin/env node
/**
 * render_figures --in <dir> --out <dir> [--kind <figure kind>]
 *
 * Reads every experiment CSV found under --in (recognized by file name),
 * renders one SVG per figure kind into --out.  Exit codes: 0 all figures
 * written, 1 schema mismatch or no renderable data, 2 usage error.
 */

import { mkdirSync, readdirSync, statSync, writeFileSync } from "fs";
import { join } from "path";

import { experimentOf, readCsv, SchemaError } from "./csv";
import { buildPanels, FIGURE_KINDS, FigureKind } from "./figures";
import { renderFigure } from "./svg";

interface Args {
  inDir: string;
  outDir: string;
  kind?: FigureKind;
}

function parseArgs(argv: string[]): Args {
  let inDir: string | undefined;
  let outDir: string | undefined;
  let kind: FigureKind | undefined;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--in") inDir = argv[++i];
    else if (arg === "--out") outDir = argv[++i];
    else if (arg === "--kind") {
      const value = argv[++i] as FigureKind;
      if (!FIGURE_KINDS.includes(value)) {
        throw new UsageError(`unknown figure kind '${value}'`);
      }
      kind = value;
    } else throw new UsageError(`unknown argument '${arg}'`);
  }
  if (!inDir || !outDir) throw new UsageError("both --in and --out are required");
  return { inDir, outDir, kind };
}

class UsageError extends Error {}

function findCsvFiles(root: string): string[] {
  const out: string[] = [];
  const walk = (dir: string) => {
    for (const entry of readdirSync(dir).sort()) {
      const path = join(dir, entry);
      if (statSync(path).isDirectory()) walk(path);
      else if (entry.endsWith(".csv")) out.push(path);
    }
  };
  walk(root);
  return out;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (error) {
    console.error(`usage error: ${(error as Error).message}`);
    return 2;
  }

  const candidates = findCsvFiles(args.inDir).filter((path) =>
    FIGURE_KINDS.some((kind) => path.endsWith(`${kind}.csv`))
  );
  if (candidates.length === 0) {
    console.error(`no experiment CSVs found under ${args.inDir}`);
    return 1;
  }

  mkdirSync(args.outDir, { recursive: true });
  let status = 0;
  let rendered = 0;
  for (const path of candidates) {
    const kind = FIGURE_KINDS.find((k) => path.endsWith(`${k}.csv`))!;
    if (args.kind && kind !== args.kind) continue;
    try {
      const rows = readCsv(path);
      experimentOf(rows, path);
      const panels = buildPanels({ kind, rows, source: path });
      const svg = renderFigure(panels);
      const target = join(args.outDir, `${kind}.svg`);
      writeFileSync(target, svg, "utf-8");
      console.log(`wrote ${target}`);
      rendered++;
    } catch (error) {
      // SchemaError messages already carry their source path
      const message = (error as Error).message;
      console.error(
        error instanceof SchemaError && message.startsWith(path)
          ? message
          : `${path}: ${message}`
      );
      status = 1;
    }
  }
  if (rendered === 0 && status === 0) {
    console.error("nothing rendered (kind filter matched no files)");
    return 1;
  }
  return status;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
