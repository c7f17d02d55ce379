/**
 * The four plot kinds. Each consumes one declared CSV schema and returns a
 * complete SVG document string; no statistics are computed here beyond what
 * the axes need.
 */

import { CsvError, num, requireSchema, Table } from "./csv.js";
import { document, frame, PALETTE, polyline, tag, text } from "./svg.js";

export type PlotKind = "theta-curve" | "decay" | "annulus-fan" | "slack-bars";

export const PLOT_KINDS: PlotKind[] = [
  "theta-curve", "decay", "annulus-fan", "slack-bars",
];

export function render(kind: PlotKind, table: Table): string {
  switch (kind) {
    case "theta-curve":
      return thetaCurve(table);
    case "decay":
      return decay(table);
    case "annulus-fan":
      return annulusFan(table);
    case "slack-bars":
      return slackBars(table);
    default:
      throw new CsvError(`unknown plot kind ${kind}`);
  }
}

function groupBy(rows: Table["rows"], field: string): Map<string, Table["rows"]> {
  const out = new Map<string, Table["rows"]>();
  for (const row of rows) {
    const key = row[field];
    const list = out.get(key) ?? [];
    list.push(row);
    out.set(key, list);
  }
  return out;
}

function legend(
  parts: string[], labels: string[], colors: string[],
): void {
  labels.forEach((label, i) => {
    const y = 50 + 18 * i;
    parts.push(tag("line", {
      x1: 520, y1: y, x2: 544, y2: y, stroke: colors[i], "stroke-width": 2,
    }));
    parts.push(text(550, y + 4, label, "start", 11));
  });
}

/** Connection probability against p, one curve per box radius. */
function thetaCurve(table: Table): string {
  requireSchema(table, "bernoulli", "theta-curve");
  const byN = [...groupBy(table.rows, "n").entries()]
    .sort((a, b) => Number(a[0]) - Number(b[0]));
  const ps = table.rows.map((r) => num(r, "p"));
  const f = frame(
    Math.min(...ps), Math.max(...ps), 0, 1,
    "Connection probability", "p", "theta_n(p)",
  );
  byN.forEach(([n, rows], i) => {
    const color = PALETTE[i % PALETTE.length];
    const sorted = [...rows].sort((a, b) => num(a, "p") - num(b, "p"));
    f.parts.push(polyline(
      sorted.map((r) => [f.x(num(r, "p")), f.y(num(r, "estimate"))]), color,
    ));
    for (const r of sorted) {
      const px = f.x(num(r, "p"));
      const est = num(r, "estimate");
      const se = num(r, "stderr");
      f.parts.push(tag("line", {
        x1: px, y1: f.y(Math.max(0, est - 2 * se)),
        x2: px, y2: f.y(Math.min(1, est + 2 * se)),
        stroke: color, "stroke-width": 1,
      }));
      f.parts.push(tag("circle", { cx: px, cy: f.y(est), r: 2.2, fill: color }));
    }
  });
  legend(f.parts, byN.map(([n]) => `n = ${n}`),
         byN.map((_, i) => PALETTE[i % PALETTE.length]));
  return document(f.parts);
}

/** log10 theta_n against n: near-linear when the decay is exponential. */
function decay(table: Table): string {
  requireSchema(table, "bernoulli", "decay");
  const rows = table.rows.filter((r) => num(r, "estimate") > 0);
  if (rows.length === 0) {
    throw new CsvError("decay plot: no positive estimates");
  }
  const byP = [...groupBy(rows, "p").entries()]
    .sort((a, b) => Number(a[0]) - Number(b[0]));
  const nsAll = rows.map((r) => num(r, "n"));
  const logs = rows.map((r) => Math.log10(num(r, "estimate")));
  const f = frame(
    Math.min(...nsAll), Math.max(...nsAll),
    Math.min(...logs), Math.max(0, Math.max(...logs)),
    "Decay of the connection probability", "n", "log10 theta_n",
  );
  byP.forEach(([p, group], i) => {
    const color = PALETTE[i % PALETTE.length];
    const sorted = [...group].sort((a, b) => num(a, "n") - num(b, "n"));
    f.parts.push(polyline(
      sorted.map((r) => [
        f.x(num(r, "n")), f.y(Math.log10(num(r, "estimate"))),
      ]), color,
    ));
    for (const r of sorted) {
      f.parts.push(tag("circle", {
        cx: f.x(num(r, "n")), cy: f.y(Math.log10(num(r, "estimate"))),
        r: 2.5, fill: color,
      }));
    }
  });
  legend(f.parts, byP.map(([p]) => `p = ${p}`),
         byP.map((_, i) => PALETTE[i % PALETTE.length]));
  return document(f.parts);
}

/** Annulus-crossing probability against r, one curve per intensity. */
function annulusFan(table: Table): string {
  requireSchema(table, "boolean", "annulus-fan");
  const rows = table.rows.filter((r) => r.stat === "annulus");
  if (rows.length === 0) {
    throw new CsvError("annulus-fan plot: no rows with stat=annulus");
  }
  const rs = rows.map((r) => num(r, "r"));
  const byLam = [...groupBy(rows, "lambda").entries()]
    .sort((a, b) => Number(a[0]) - Number(b[0]));
  const f = frame(
    Math.min(...rs), Math.max(...rs), 0, 1,
    "Annulus crossing probabilities", "r", "P[S_r joined to S_2r]",
  );
  byLam.forEach(([lam, group], i) => {
    const color = PALETTE[i % PALETTE.length];
    const sorted = [...group].sort((a, b) => num(a, "r") - num(b, "r"));
    f.parts.push(polyline(
      sorted.map((r) => [f.x(num(r, "r")), f.y(num(r, "estimate"))]), color,
    ));
    for (const r of sorted) {
      f.parts.push(tag("circle", {
        cx: f.x(num(r, "r")), cy: f.y(num(r, "estimate")), r: 2.5, fill: color,
      }));
    }
  });
  legend(f.parts, byLam.map(([lam]) => `lambda = ${lam}`),
         byLam.map((_, i) => PALETTE[i % PALETTE.length]));
  return document(f.parts);
}

/** Per-edge OSSS slack bars (the bound is violated iff a bar goes negative). */
function slackBars(table: Table): string {
  requireSchema(table, "osss", "slack-bars");
  // one bar per (check, edge); the slack columns repeat within a check
  const byCheck = [...groupBy(table.rows, "check").entries()];
  const bars: Array<{ label: string; v1: number; v2: number }> = [];
  for (const [check, rows] of byCheck) {
    bars.push({
      label: check,
      v1: num(rows[0], "slack_v1"),
      v2: Number(rows[0].slack_v2) || 0,
    });
  }
  const values = bars.flatMap((b) => [b.v1, b.v2]);
  const top = Math.max(...values, 0.01);
  const bottom = Math.min(...values, 0);
  const f = frame(
    0, bars.length, bottom * 1.2 - 0.01, top * 1.2,
    "Variance-bound slack by algorithm", "", "slack",
  );
  const zero = f.y(0);
  f.parts.push(tag("line", {
    x1: f.x(0), y1: zero, x2: f.x(bars.length), y2: zero,
    stroke: "#999999", "stroke-width": 1, "stroke-dasharray": "4 3",
  }));
  bars.forEach((bar, i) => {
    drawBar(f.parts, f.x(i + 0.15), f.x(i + 0.5) - 4, zero, f.y(bar.v1),
            bar.v1, PALETTE[0]);
    drawBar(f.parts, f.x(i + 0.5), f.x(i + 0.85) - 4, zero, f.y(bar.v2),
            bar.v2, PALETTE[1]);
    f.parts.push(text(f.x(i + 0.5), zero + 16, bar.label, "middle", 10));
  });
  legend(f.parts, ["influence form", "covariance form"],
         [PALETTE[0], PALETTE[1]]);
  return document(f.parts);
}

function drawBar(
  parts: string[], x0: number, x1: number, yZero: number, yVal: number,
  value: number, color: string,
): void {
  const y = Math.min(yZero, yVal);
  const h = Math.abs(yZero - yVal);
  parts.push(tag("rect", {
    x: x0, y, width: Math.max(x1 - x0, 1), height: Math.max(h, 0.5),
    fill: color, "fill-opacity": "0.85",
  }));
  parts.push(text((x0 + x1) / 2, y - 4, value.toFixed(3), "middle", 9));
}
