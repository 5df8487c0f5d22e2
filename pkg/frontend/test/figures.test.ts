import assert from "node:assert/strict";
import { test } from "node:test";

import { parseSweep, parseTrace } from "../src/csv";
import {
  arcLengthVsDelta,
  energyBalance,
  impliedViscosity,
  reparamCompare,
  slopeIdentity,
} from "../src/figures";
import { renderSVG } from "../src/svg";
import { makePair, makeSweep, makeTrace } from "./helpers";
import { parsePair } from "../src/csv";

test("implied viscosity is recovered from the rate/slope identity", () => {
  const cols = parseTrace(makeTrace({ steps: 20, delta: 0.05, loaded: true }), "t");
  assert.ok(Math.abs(impliedViscosity(cols) - 0.05) < 1e-12);
});

test("implied viscosity falls back to 1 on a motionless trace", () => {
  const cols = parseTrace(makeTrace({ steps: 5, delta: 0.05, loaded: false }), "t");
  assert.equal(impliedViscosity(cols), 1.0);
});

test("zero-load trace yields a flat F and an exactly zero gap", () => {
  const cols = parseTrace(makeTrace({ steps: 8, delta: 0.05, loaded: false }), "t");
  const fig = energyBalance(cols);
  const F = fig.series[0];
  const gap = fig.series[2];
  assert.equal(gap.label, "gap");
  assert.ok(F.y.every((v) => v === F.y[0]));
  assert.ok(gap.y.every((v) => v === 0));
});

test("budget-consistent loaded trace keeps the gap at round-off", () => {
  const cols = parseTrace(makeTrace({ steps: 40, delta: 0.05, loaded: true }), "t");
  const gap = energyBalance(cols).series[2];
  const worst = Math.max(...gap.y.map(Math.abs));
  assert.ok(worst < 1e-12, `gap ${worst}`);
});

test("slope identity residuals vanish on consistent data", () => {
  const cols = parseTrace(makeTrace({ steps: 20, delta: 0.05, loaded: true }), "t");
  const fig = slopeIdentity(cols);
  const recomputed = fig.series[0];
  assert.ok(Math.max(...recomputed.y.map(Math.abs)) < 1e-12);
});

test("slope identity flags an inconsistent row", () => {
  const text = makeTrace({ steps: 10, delta: 0.05, loaded: true });
  const lines = text.trim().split("\n");
  const parts = lines[4].split(",");
  parts[5] = String(Number(parts[5]) + 0.5); // corrupt the slope column
  lines[4] = parts.join(",");
  const fig = slopeIdentity(parseTrace(lines.join("\n"), "t"));
  const y = fig.series[0].y;
  assert.ok(y[3] > 0.1 && y.filter((v) => v > 0.1).length === 1);
});

test("arc length figure uses a log x axis over the sweep rows", () => {
  const fig = arcLengthVsDelta(parseSweep(makeSweep(), "s"));
  assert.equal(fig.logX, true);
  assert.deepEqual(fig.series[0].x, [0.1, 0.05, 0.025]);
});

test("reparam overlay keeps one series per pair file", () => {
  const pairs = [
    { label: "a_vs_b", cols: parsePair(makePair(1e-3), "a") },
    { label: "b_vs_c", cols: parsePair(makePair(5e-4), "b") },
  ];
  const fig = reparamCompare(pairs);
  assert.equal(fig.series.length, 2);
  assert.ok(fig.series[0].x.every((v, i) => i === 0 || v > fig.series[0].x[i - 1]));
});

test("renderer emits one polyline per series and a valid document", () => {
  const cols = parseTrace(makeTrace({ steps: 10, delta: 0.05, loaded: true }), "t");
  const svg = renderSVG(energyBalance(cols));
  assert.ok(svg.startsWith("<svg"));
  assert.ok(svg.trimEnd().endsWith("</svg>"));
  assert.equal((svg.match(/<polyline/g) ?? []).length, 3);
  assert.ok(svg.includes("energy balance"));
});
