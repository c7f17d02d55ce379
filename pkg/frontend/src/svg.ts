/**
 * Minimal deterministic SVG construction.
 *
 * Numbers are formatted with a fixed precision and styles are constants, so
 * the output bytes are a pure function of the input data — which is what the
 * golden tests assert.
 */

export const WIDTH = 640;
export const HEIGHT = 420;
export const MARGIN = { top: 36, right: 24, bottom: 52, left: 64 };

export const PALETTE = [
  "#1f6f8b", "#c0532f", "#4c8c4a", "#7b5aa6", "#a68b2c", "#58707d",
];

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (v: number): number;
  readonly min: number;
  readonly max: number;
}

export function linearScale(
  min: number, max: number, rangeMin: number, rangeMax: number,
): Scale {
  const span = max - min || 1;
  const f = (v: number) => rangeMin + ((v - min) / span) * (rangeMax - rangeMin);
  return Object.assign(f, { min, max });
}

/** Evenly spaced tick values, endpoints included. */
export function ticks(min: number, max: number, count: number): number[] {
  const out: number[] = [];
  for (let i = 0; i < count; i++) {
    out.push(min + ((max - min) * i) / (count - 1));
  }
  return out;
}

export function tag(
  name: string, attrs: Record<string, string | number>, body = "",
): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  return body === "" && name !== "text"
    ? `<${name} ${parts}/>`
    : `<${name} ${parts}>${body}</${name}>`;
}

export function text(
  x: number, y: number, body: string, anchor = "middle", size = 12,
): string {
  return tag("text", {
    x, y, "text-anchor": anchor, "font-family": "sans-serif",
    "font-size": size, fill: "#222222",
  }, escapeXml(body));
}

export function escapeXml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export interface Frame {
  x: Scale;
  y: Scale;
  parts: string[];
}

/** Axes, tick labels, and titles for a standard plot frame. */
export function frame(
  xMin: number, xMax: number, yMin: number, yMax: number,
  title: string, xLabel: string, yLabel: string,
): Frame {
  const x = linearScale(xMin, xMax, MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(yMin, yMax, HEIGHT - MARGIN.bottom, MARGIN.top);
  const parts: string[] = [];
  parts.push(tag("rect", {
    x: MARGIN.left, y: MARGIN.top,
    width: WIDTH - MARGIN.left - MARGIN.right,
    height: HEIGHT - MARGIN.top - MARGIN.bottom,
    fill: "none", stroke: "#444444", "stroke-width": 1,
  }));
  for (const t of ticks(xMin, xMax, 5)) {
    const px = x(t);
    parts.push(tag("line", {
      x1: px, y1: HEIGHT - MARGIN.bottom, x2: px,
      y2: HEIGHT - MARGIN.bottom + 5, stroke: "#444444", "stroke-width": 1,
    }));
    parts.push(text(px, HEIGHT - MARGIN.bottom + 20, trimNum(t)));
  }
  for (const t of ticks(yMin, yMax, 5)) {
    const py = y(t);
    parts.push(tag("line", {
      x1: MARGIN.left - 5, y1: py, x2: MARGIN.left, y2: py,
      stroke: "#444444", "stroke-width": 1,
    }));
    parts.push(text(MARGIN.left - 8, py + 4, trimNum(t), "end", 11));
  }
  parts.push(text(WIDTH / 2, 22, title, "middle", 15));
  parts.push(text(WIDTH / 2, HEIGHT - 14, xLabel));
  parts.push(
    `<g transform="rotate(-90 18 ${HEIGHT / 2})">` +
    text(18, HEIGHT / 2, yLabel) + "</g>",
  );
  return { x, y, parts };
}

function trimNum(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a < 0.01 || a >= 10000)) return v.toExponential(1);
  return String(Math.round(v * 1000) / 1000);
}

export function polyline(points: Array<[number, number]>, color: string): string {
  const pts = points.map(([px, py]) => `${fmt(px)},${fmt(py)}`).join(" ");
  return tag("polyline", {
    points: pts, fill: "none", stroke: color, "stroke-width": 1.6,
  });
}

export function document(body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" ` +
    `height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect x="0" y="0" width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`,
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
