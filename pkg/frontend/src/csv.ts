/**
 * Strict CSV parsing for the solver's output contracts.
 *
 * The trace header is matched byte-for-byte; any deviation is a schema
 * error naming the offending column. Nothing here recomputes physics:
 * the parsers hand back columns exactly as written.
 */

export const TRACE_HEADER =
  "step,t,F,E,D,slope,rate_L2,rate_H1,power,inner_iters," +
  "slope_id_rel_err,align_rel_err,cum_arc_len";

export const SWEEP_HEADER =
  "delta,S,max_norm_residual,max_advancing_slope,pairwise_distance_to_next";

export const PAIR_HEADER = "s,dist_L2";

export class SchemaError extends Error {}

export type Columns = Map<string, number[]>;

function splitLines(text: string): string[] {
  return text
    .split(/\r?\n/)
    .map((ln) => ln.trim())
    .filter((ln) => ln.length > 0);
}

/** Parse a CSV whose header must equal `expected` exactly. */
export function parseStrict(text: string, expected: string, origin: string): Columns {
  const lines = splitLines(text);
  if (lines.length === 0) {
    throw new SchemaError(`${origin}: empty file`);
  }
  if (lines[0] !== expected) {
    const got = lines[0].split(",");
    const want = expected.split(",");
    for (let i = 0; i < want.length; i++) {
      if (i >= got.length || got[i] !== want[i]) {
        const bad = i < got.length ? got[i] : "<missing>";
        throw new SchemaError(
          `${origin}: header mismatch at column ${i + 1}: expected "${want[i]}", found "${bad}"`,
        );
      }
    }
    throw new SchemaError(
      `${origin}: header has ${got.length} columns, expected ${want.length}`,
    );
  }
  const names = expected.split(",");
  const cols: Columns = new Map(names.map((n) => [n, []]));
  for (let r = 1; r < lines.length; r++) {
    const parts = lines[r].split(",");
    if (parts.length !== names.length) {
      throw new SchemaError(
        `${origin}:${r + 1}: expected ${names.length} fields, got ${parts.length}`,
      );
    }
    for (let c = 0; c < names.length; c++) {
      const v = Number(parts[c]);
      if (!Number.isFinite(v) && parts[c] !== "nan") {
        throw new SchemaError(`${origin}:${r + 1}: bad value "${parts[c]}" for ${names[c]}`);
      }
      cols.get(names[c])!.push(v);
    }
  }
  return cols;
}

export function parseTrace(text: string, origin: string): Columns {
  return parseStrict(text, TRACE_HEADER, origin);
}

export function parseSweep(text: string, origin: string): Columns {
  return parseStrict(text, SWEEP_HEADER, origin);
}

export function parsePair(text: string, origin: string): Columns {
  return parseStrict(text, PAIR_HEADER, origin);
}

/** Header-only sniff used for directory discovery. */
export function sniffHeader(text: string): string {
  const nl = text.indexOf("\n");
  return (nl < 0 ? text : text.slice(0, nl)).replace(/\r$/, "").trim();
}
