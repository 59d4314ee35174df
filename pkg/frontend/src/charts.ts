/** Pure SVG builders: every function maps data to an SVG string, so the
 *  rendering logic is unit-testable without a browser. */

import type { Trajectory } from "./api.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");

export interface Box {
  w: number;
  h: number;
  pad: number;
}

export const CHART_BOX: Box = { w: 360, h: 120, pad: 8 };
export const TRAJ_BOX: Box = { w: 420, h: 300, pad: 24 };

/** Map values in [lo, hi] onto pixel coordinates inside the padded box. */
export function scaleLinear(lo: number, hi: number, outLo: number, outHi: number) {
  const span = hi - lo;
  if (span === 0) return (_: number) => (outLo + outHi) / 2;
  return (v: number) => outLo + ((v - lo) / span) * (outHi - outLo);
}

/** "M x,y L x,y ..." polyline through the series, index on the x axis. */
export function linePath(values: number[], box: Box, lo?: number, hi?: number): string {
  if (values.length === 0) return "";
  const ymin = lo ?? Math.min(...values);
  const ymax = hi ?? Math.max(...values);
  const sx = scaleLinear(0, Math.max(values.length - 1, 1), box.pad, box.w - box.pad);
  const sy = scaleLinear(ymin, ymax, box.h - box.pad, box.pad);
  return values
    .map((v, i) => `${i === 0 ? "M" : "L"}${sx(i).toFixed(1)},${sy(v).toFixed(1)}`)
    .join(" ");
}

export interface LineSpec {
  values: number[];
  cls: string;
}

/** One chart, several series sharing a y scale. */
export function lineChartSvg(lines: LineSpec[], box: Box = CHART_BOX): string {
  const all = lines.flatMap((l) => l.values);
  const lo = all.length ? Math.min(...all) : 0;
  const hi = all.length ? Math.max(...all) : 1;
  const paths = lines
    .filter((l) => l.values.length > 0)
    .map((l) => `<path class="${esc(l.cls)}" d="${linePath(l.values, box, lo, hi)}" fill="none"/>`)
    .join("");
  return `<svg viewBox="0 0 ${box.w} ${box.h}" class="chart">${paths}</svg>`;
}

/** 2-D trajectory: the word's weekly path with one dot per week, plus the
 *  neighbor labels for the focused week. Dots carry data-week, labels carry
 *  data-word so the app can wire slider highlighting and pivot clicks. */
export function trajectorySvg(traj: Trajectory, week: number, box: Box = TRAJ_BOX): string {
  const pts = traj.points;
  const nbrPts = traj.neighbors.flatMap((n) => n.points);
  const xs = [...pts, ...nbrPts].map((p) => p[0]);
  const ys = [...pts, ...nbrPts].map((p) => p[1]);
  const sx = scaleLinear(Math.min(...xs), Math.max(...xs), box.pad, box.w - box.pad);
  const sy = scaleLinear(Math.min(...ys), Math.max(...ys), box.h - box.pad, box.pad);
  const px = (p: [number, number]) => `${sx(p[0]).toFixed(1)},${sy(p[1]).toFixed(1)}`;

  const path = pts.map((p, i) => `${i === 0 ? "M" : "L"}${px(p)}`).join(" ");
  const dots = pts
    .map(
      (p, t) =>
        `<circle class="traj-point${t === week ? " focus" : ""}" data-week="${t}"` +
        ` cx="${sx(p[0]).toFixed(1)}" cy="${sy(p[1]).toFixed(1)}" r="${t === week ? 6 : 3.5}">` +
        `<title>week ${t}</title></circle>`
    )
    .join("");
  const focused = traj.neighbors.find((n) => n.t === week);
  const labels = (focused?.labels ?? [])
    .map((w, i) => {
      const p = focused!.points[i];
      return (
        `<circle class="nbr-point" cx="${sx(p[0]).toFixed(1)}" cy="${sy(p[1]).toFixed(1)}" r="2.5"/>` +
        `<text class="nbr-label" data-word="${esc(w)}"` +
        ` x="${(sx(p[0]) + 5).toFixed(1)}" y="${(sy(p[1]) - 4).toFixed(1)}">${esc(w)}</text>`
      );
    })
    .join("");
  return (
    `<svg viewBox="0 0 ${box.w} ${box.h}" class="trajectory">` +
    `<path class="traj-path" d="${path}" fill="none"/>${dots}${labels}</svg>`
  );
}

/** Observed-vs-predicted chart for a forecast panel. */
export function forecastSvg(y: number[], yHat: number[], box: Box = CHART_BOX): string {
  return lineChartSvg(
    [
      { values: y, cls: "line-y" },
      { values: yHat, cls: "line-yhat" },
    ],
    box
  );
}
