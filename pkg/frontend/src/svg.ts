/** Minimal deterministic SVG line-chart renderer (no dependencies). */

import { FigureData } from "./figures";

const W = 840;
const H = 520;
const M = { left: 78, right: 24, top: 42, bottom: 52 };
const COLORS = ["#1f6feb", "#d1242f", "#1a7f37", "#9a6700", "#8250df", "#57606a"];

function niceTicks(lo: number, hi: number, n = 5): number[] {
  if (!Number.isFinite(lo) || !Number.isFinite(hi)) return [];
  if (lo === hi) {
    const pad = lo === 0 ? 1 : Math.abs(lo) * 0.1;
    lo -= pad;
    hi += pad;
  }
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step0;
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

function fmt(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderSVG(fig: FigureData): string {
  const xs = fig.series.flatMap((s) => s.x).filter(Number.isFinite);
  const ys = fig.series.flatMap((s) => s.y).filter(Number.isFinite);
  const xlo0 = Math.min(...xs);
  const xhi0 = Math.max(...xs);
  const ylo0 = Math.min(...ys, 0);
  const yhi0 = Math.max(...ys);
  const tx = (v: number) => (fig.logX ? Math.log10(v) : v);
  const xlo = tx(xlo0);
  const xhi = tx(xhi0);
  const yPad = (yhi0 - ylo0 || 1) * 0.05;
  const ylo = ylo0 - yPad;
  const yhi = yhi0 + yPad;

  const sx = (v: number) =>
    M.left + ((tx(v) - xlo) / (xhi - xlo || 1)) * (W - M.left - M.right);
  const sy = (v: number) =>
    H - M.bottom - ((v - ylo) / (yhi - ylo || 1)) * (H - M.top - M.bottom);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${W}" height="${H}" viewBox="0 0 ${W} ${H}" font-family="sans-serif" font-size="13">`,
    `<rect width="${W}" height="${H}" fill="white"/>`,
    `<text x="${W / 2}" y="24" text-anchor="middle" font-size="16">${esc(fig.title)}</text>`,
  );

  const xTicks = fig.logX
    ? niceTicks(xlo, xhi, 5).map((v) => Math.pow(10, v))
    : niceTicks(xlo0, xhi0, 6);
  for (const v of xTicks) {
    const px = sx(v);
    if (px < M.left - 1 || px > W - M.right + 1) continue;
    parts.push(
      `<line x1="${px.toFixed(2)}" y1="${M.top}" x2="${px.toFixed(2)}" y2="${H - M.bottom}" stroke="#eee"/>`,
      `<text x="${px.toFixed(2)}" y="${H - M.bottom + 18}" text-anchor="middle">${fmt(v)}</text>`,
    );
  }
  for (const v of niceTicks(ylo, yhi, 6)) {
    const py = sy(v);
    if (py < M.top - 1 || py > H - M.bottom + 1) continue;
    parts.push(
      `<line x1="${M.left}" y1="${py.toFixed(2)}" x2="${W - M.right}" y2="${py.toFixed(2)}" stroke="#eee"/>`,
      `<text x="${M.left - 8}" y="${(py + 4).toFixed(2)}" text-anchor="end">${fmt(v)}</text>`,
    );
  }
  parts.push(
    `<rect x="${M.left}" y="${M.top}" width="${W - M.left - M.right}" height="${H - M.top - M.bottom}" fill="none" stroke="#444"/>`,
    `<text x="${(M.left + W - M.right) / 2}" y="${H - 14}" text-anchor="middle">${esc(fig.xLabel)}</text>`,
    `<text x="20" y="${(M.top + H - M.bottom) / 2}" text-anchor="middle" transform="rotate(-90 20 ${(M.top + H - M.bottom) / 2})">${esc(fig.yLabel)}</text>`,
  );

  fig.series.forEach((s, si) => {
    const color = COLORS[si % COLORS.length];
    const pts = s.x
      .map((xv, i) => [xv, s.y[i]] as const)
      .filter(([xv, yv]) => Number.isFinite(xv) && Number.isFinite(yv))
      .map(([xv, yv]) => `${sx(xv).toFixed(2)},${sy(yv).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
    );
    const ly = M.top + 16 + 18 * si;
    parts.push(
      `<line x1="${W - M.right - 170}" y1="${ly - 4}" x2="${W - M.right - 145}" y2="${ly - 4}" stroke="${color}" stroke-width="2.5"/>`,
      `<text x="${W - M.right - 138}" y="${ly}">${esc(s.label)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
