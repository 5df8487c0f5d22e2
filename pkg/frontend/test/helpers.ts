/** Synthetic CSV fixtures consistent with the solver's identities. */

import { TRACE_HEADER, SWEEP_HEADER, PAIR_HEADER } from "../src/csv";

export function makeTrace(opts: { steps: number; delta: number; loaded: boolean }): string {
  const { steps, delta, loaded } = opts;
  const rows = [TRACE_HEADER];
  const tau = 1.0 / steps;
  let F = loaded ? 0.3 : 0.0;
  let cum = 0;
  rows.push(`0,0,${F},${F},0,0,0,0,0,0,0,0,0`);
  for (let i = 1; i <= steps; i++) {
    const t = i * tau;
    const rate = loaded ? 0.02 * Math.sin((3 * i) / steps + 0.4) ** 2 : 0;
    const rateH1 = 1.5 * rate;
    const slope = delta * rate;
    const power = loaded ? 0.05 : 0;
    // keep F consistent with the budget so the gap stays near zero
    F += tau * (power - (slope * slope) / (2 * delta) - (delta / 2) * rate * rate);
    cum += tau * rateH1;
    rows.push(
      `${i},${t},${F},${F * 0.8},${F * 0.2},${slope},${rate},${rateH1},${power},2,1e-9,1e-10,${cum}`,
    );
  }
  return rows.join("\n") + "\n";
}

export function makeSweep(): string {
  const rows = [SWEEP_HEADER];
  rows.push(`0.1,1.21,2e-15,6e-3,4e-4`);
  rows.push(`0.05,1.22,3e-15,3e-3,2e-4`);
  rows.push(`0.025,1.225,2e-15,1.5e-3,nan`);
  return rows.join("\n") + "\n";
}

export function makePair(scale: number): string {
  const rows = [PAIR_HEADER];
  for (let i = 0; i <= 50; i++) {
    const s = i * 0.025;
    rows.push(`${s},${scale * Math.abs(Math.sin(2 * s))}`);
  }
  return rows.join("\n") + "\n";
}
