/**
 * Figure data builders: pure functions from parsed CSV columns to plot
 * series. The energy-balance reconstruction recomputes the rectangle-rule
 * sums from the columns, so the figure doubles as an independent audit of
 * the solver's bookkeeping.
 */

import { Columns } from "./csv";

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface FigureData {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  logX?: boolean;
}

function col(tr: Columns, name: string): number[] {
  return tr.get(name)!;
}

/**
 * Viscosity recovered from the trace itself: on every step where the phase
 * field moved, the scheme satisfies slope = delta * rate_L2, so the median
 * ratio reproduces delta without side information. Falls back to 1 when
 * nothing moved (the dissipation terms then vanish anyway).
 */
export function impliedViscosity(tr: Columns): number {
  const slope = col(tr, "slope");
  const rate = col(tr, "rate_L2");
  const ratios: number[] = [];
  const scale = Math.max(...rate, 0);
  for (let i = 1; i < rate.length; i++) {
    if (rate[i] > 1e-9 * (1 + scale) && slope[i] > 0) {
      ratios.push(slope[i] / rate[i]);
    }
  }
  if (ratios.length === 0) return 1.0;
  ratios.sort((a, b) => a - b);
  return ratios[Math.floor(ratios.length / 2)];
}

/** F(t) against its reconstructed energy budget, plus the gap. */
export function energyBalance(tr: Columns): FigureData {
  const t = col(tr, "t");
  const F = col(tr, "F");
  const slope = col(tr, "slope");
  const rate = col(tr, "rate_L2");
  const power = col(tr, "power");
  const delta = impliedViscosity(tr);

  const rhs: number[] = [F[0]];
  const gap: number[] = [0];
  let dissip = 0;
  let work = 0;
  for (let i = 1; i < t.length; i++) {
    const tau = t[i] - t[i - 1];
    dissip += tau * ((slope[i] * slope[i]) / (2 * delta) + (delta / 2) * rate[i] * rate[i]);
    work += tau * power[i];
    rhs.push(F[0] - dissip + work);
    gap.push(rhs[i] - F[i]);
  }
  return {
    title: `energy balance (implied viscosity ${delta.toPrecision(3)})`,
    xLabel: "t",
    yLabel: "energy",
    series: [
      { label: "F(t)", x: t, y: F },
      { label: "F(0) - dissipation + work", x: t, y: rhs },
      { label: "gap", x: t, y: gap },
    ],
  };
}

/** Per-step identity residuals: recomputed and as recorded by the solver. */
export function slopeIdentity(tr: Columns): FigureData {
  const t = col(tr, "t");
  const slope = col(tr, "slope");
  const rate = col(tr, "rate_L2");
  const recorded = col(tr, "slope_id_rel_err");
  const delta = impliedViscosity(tr);
  const recomputed: number[] = t.map(
    (_, i) => Math.abs(delta * rate[i] - slope[i]) / (1 + slope[i]),
  );
  return {
    title: "slope identity residual per step",
    xLabel: "t",
    yLabel: "relative error",
    series: [
      { label: "|delta*rate - slope|/(1+slope)", x: t, y: recomputed },
      { label: "recorded", x: t, y: recorded },
    ],
  };
}

/** Arc length S against viscosity, from a sweep summary. */
export function arcLengthVsDelta(sw: Columns): FigureData {
  return {
    title: "reparametrized arc length vs viscosity",
    xLabel: "delta",
    yLabel: "S",
    logX: true,
    series: [{ label: "S(delta)", x: col(sw, "delta"), y: col(sw, "S") }],
  };
}

/** Overlay of pairwise reparametrized-distance curves. */
export function reparamCompare(pairs: { label: string; cols: Columns }[]): FigureData {
  return {
    title: "distance between reparametrized runs",
    xLabel: "s",
    yLabel: "L2 distance",
    series: pairs.map((p) => ({
      label: p.label,
      x: p.cols.get("s")!,
      y: p.cols.get("dist_L2")!,
    })),
  };
}
