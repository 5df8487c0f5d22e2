/**
 * pffrac-plots: offline figures from solver CSV traces.
 *
 *   plots <csv-or-dir>... -o <figdir> [--kind <k>]
 *
 * Kinds: energy_balance, slope_identity (per trace CSV),
 * arc_length_vs_delta (per sweep CSV), reparam_compare (overlay of the
 * pair-distance CSVs found together). Figures are pure functions of the
 * CSV contents; output names derive from the input names. Exit codes:
 * 0 success, 2 schema/usage error.
 */

import * as fs from "fs";
import * as path from "path";

import {
  PAIR_HEADER,
  SchemaError,
  SWEEP_HEADER,
  TRACE_HEADER,
  parsePair,
  parseSweep,
  parseTrace,
  sniffHeader,
} from "./csv";
import {
  arcLengthVsDelta,
  energyBalance,
  reparamCompare,
  slopeIdentity,
} from "./figures";
import { renderSVG } from "./svg";

export const KINDS = [
  "energy_balance",
  "slope_identity",
  "arc_length_vs_delta",
  "reparam_compare",
] as const;
export type Kind = (typeof KINDS)[number];

interface Args {
  inputs: string[];
  outDir: string;
  kinds: Set<Kind>;
}

function parseArgs(argv: string[]): Args {
  const inputs: string[] = [];
  let outDir = ".";
  const kinds = new Set<Kind>(KINDS);
  let kindGiven = false;
  for (let i = 0; i < argv.length; i++) {
    const a = argv[i];
    if (a === "-o" || a === "--output") {
      outDir = argv[++i];
      if (outDir === undefined) throw new SchemaError("missing value after -o");
    } else if (a === "--kind") {
      const k = argv[++i] as Kind;
      if (!KINDS.includes(k)) {
        throw new SchemaError(`unknown kind "${k}"; expected one of ${KINDS.join(", ")}`);
      }
      if (!kindGiven) {
        kinds.clear();
        kindGiven = true;
      }
      kinds.add(k);
    } else if (a === "-h" || a === "--help") {
      console.log("usage: plots <csv-or-dir>... -o <figdir> [--kind <k>]");
      process.exit(0);
    } else if (a.startsWith("-")) {
      throw new SchemaError(`unknown flag "${a}"`);
    } else {
      inputs.push(a);
    }
  }
  if (inputs.length === 0) throw new SchemaError("no inputs given");
  return { inputs, outDir, kinds };
}

interface Discovered {
  traces: string[];
  sweeps: string[];
  pairGroups: Map<string, string[]>; // directory -> pair csvs
}

function discover(inputs: string[]): Discovered {
  const out: Discovered = { traces: [], sweeps: [], pairGroups: new Map() };

  const classify = (file: string) => {
    const head = sniffHeader(fs.readFileSync(file, "utf8"));
    if (head === TRACE_HEADER) out.traces.push(file);
    else if (head === SWEEP_HEADER) out.sweeps.push(file);
    else if (head === PAIR_HEADER) {
      const dir = path.dirname(file);
      if (!out.pairGroups.has(dir)) out.pairGroups.set(dir, []);
      out.pairGroups.get(dir)!.push(file);
    } else {
      // explicit file with a wrong header is a hard schema error
      parseTrace(fs.readFileSync(file, "utf8"), file);
    }
  };

  for (const input of inputs) {
    const st = fs.statSync(input);
    if (st.isDirectory()) {
      for (const name of fs.readdirSync(input).sort()) {
        if (!name.endsWith(".csv")) continue;
        const file = path.join(input, name);
        const head = sniffHeader(fs.readFileSync(file, "utf8"));
        if (head === TRACE_HEADER) out.traces.push(file);
        else if (head === SWEEP_HEADER) out.sweeps.push(file);
        else if (head === PAIR_HEADER) {
          if (!out.pairGroups.has(input)) out.pairGroups.set(input, []);
          out.pairGroups.get(input)!.push(file);
        } // other CSVs in a directory (e.g. states.csv) are not plot inputs
      }
    } else {
      classify(input);
    }
  }
  return out;
}

function stem(file: string): string {
  return path.basename(file).replace(/\.csv$/, "");
}

export function run(argv: string[]): number {
  const args = parseArgs(argv);
  const found = discover(args.inputs);
  fs.mkdirSync(args.outDir, { recursive: true });

  const written: string[] = [];
  const emit = (name: string, fig: ReturnType<typeof energyBalance>) => {
    const target = path.join(args.outDir, name);
    fs.writeFileSync(target, renderSVG(fig));
    written.push(target);
  };

  for (const file of found.traces) {
    const cols = parseTrace(fs.readFileSync(file, "utf8"), file);
    if (args.kinds.has("energy_balance")) {
      emit(`${stem(file)}_energy_balance.svg`, energyBalance(cols));
    }
    if (args.kinds.has("slope_identity")) {
      emit(`${stem(file)}_slope_identity.svg`, slopeIdentity(cols));
    }
  }
  if (args.kinds.has("arc_length_vs_delta")) {
    for (const file of found.sweeps) {
      emit(`${stem(file)}_arc_length_vs_delta.svg`,
        arcLengthVsDelta(parseSweep(fs.readFileSync(file, "utf8"), file)));
    }
  }
  if (args.kinds.has("reparam_compare")) {
    for (const [dir, files] of [...found.pairGroups.entries()].sort()) {
      const pairs = files.sort().map((f) => ({
        label: stem(f).replace(/^reparam_dist_/, ""),
        cols: parsePair(fs.readFileSync(f, "utf8"), f),
      }));
      const base = path.basename(path.resolve(dir));
      emit(`${base}_reparam_compare.svg`, reparamCompare(pairs));
    }
  }

  if (written.length === 0) {
    throw new SchemaError("no figures produced: no matching inputs for the requested kinds");
  }
  for (const w of written) console.log(w);
  return 0;
}

if (require.main === module) {
  try {
    process.exit(run(process.argv.slice(2)));
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      process.exit(2);
    }
    const msg = err instanceof Error ? err.message : String(err);
    console.error(`error: ${msg}`);
    process.exit(2);
  }
}
