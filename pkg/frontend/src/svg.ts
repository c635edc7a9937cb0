/**
 * Minimal SVG plotting primitives: linear scales, tick generation, and tagged
 * string builders. No DOM, no dependencies; output is a standalone SVG file.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function extent(values: number[], padFraction = 0.0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  const pad = (hi - lo) * padFraction;
  return [lo - pad, hi + pad];
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 2.5 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const out: number[] = [];
  for (let v = Math.ceil(lo / chosen) * chosen; v <= hi + chosen * 1e-9; v += chosen) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function fmtTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

// ---------------------------------------------------------------------------
// colors

export const SERIES_COLORS = [
  "#4053d3",
  "#ddb310",
  "#b51d14",
  "#00beff",
  "#fb49b0",
  "#00b25d",
  "#cacaca",
  "#5e40d3",
  "#e67300",
  "#00a3a3",
];

const RAMP: [number, number, number][] = [
  [68, 1, 84],
  [59, 82, 139],
  [33, 145, 140],
  [94, 201, 98],
  [253, 231, 37],
];

/** Perceptual dark-to-bright color ramp for heatmap cells; u in [0, 1]. */
export function rampColor(u: number): string {
  const x = Math.min(Math.max(u, 0), 1) * (RAMP.length - 1);
  const i = Math.min(Math.floor(x), RAMP.length - 2);
  const f = x - i;
  const mix = RAMP[i].map((c, k) => Math.round(c + f * (RAMP[i + 1][k] - c)));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}

// ---------------------------------------------------------------------------
// element builders

export function tag(name: string, attrs: Record<string, string | number>, body = ""): string {
  const parts = Object.entries(attrs)
    .map(([k, v]) => `${k}="${v}"`)
    .join(" ");
  return body === "" ? `<${name} ${parts}/>` : `<${name} ${parts}>${body}</${name}>`;
}

export function polyline(points: [number, number][], color: string, width = 1.5): string {
  const path = points.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
  return tag("polyline", { points: path, fill: "none", stroke: color, "stroke-width": width });
}

export function circle(x: number, y: number, r: number, color: string): string {
  return tag("circle", { cx: x.toFixed(2), cy: y.toFixed(2), r, fill: color });
}

export function text(
  x: number,
  y: number,
  body: string,
  opts: { size?: number; anchor?: string; rotate?: boolean; color?: string } = {},
): string {
  const attrs: Record<string, string | number> = {
    x: x.toFixed(2),
    y: y.toFixed(2),
    "font-size": opts.size ?? 11,
    "font-family": "sans-serif",
    "text-anchor": opts.anchor ?? "start",
    fill: opts.color ?? "#222",
  };
  if (opts.rotate) attrs.transform = `rotate(-90 ${x.toFixed(2)} ${y.toFixed(2)})`;
  return tag("text", attrs, esc(body));
}

export interface Frame {
  left: number;
  top: number;
  width: number;
  height: number;
  xScale: Scale;
  yScale: Scale;
}

/** Axis frame with tick marks, tick labels and optional axis titles. */
export function axes(frame: Frame, xLabel?: string, yLabel?: string): string {
  const { left, top, width, height, xScale, yScale } = frame;
  const bottom = top + height;
  const parts: string[] = [];
  parts.push(
    tag("rect", {
      x: left,
      y: top,
      width,
      height,
      fill: "none",
      stroke: "#444",
      "stroke-width": 1,
    }),
  );
  for (const v of ticks(xScale.domain[0], xScale.domain[1])) {
    const x = xScale(v);
    parts.push(polyline([[x, bottom], [x, bottom + 4]], "#444", 1));
    parts.push(text(x, bottom + 15, fmtTick(v), { anchor: "middle", size: 10 }));
  }
  for (const v of ticks(yScale.domain[0], yScale.domain[1])) {
    const y = yScale(v);
    parts.push(polyline([[left - 4, y], [left, y]], "#444", 1));
    parts.push(text(left - 7, y + 3, fmtTick(v), { anchor: "end", size: 10 }));
  }
  if (xLabel) parts.push(text(left + width / 2, bottom + 30, xLabel, { anchor: "middle" }));
  if (yLabel) parts.push(text(left - 42, top + height / 2, yLabel, { anchor: "middle", rotate: true }));
  return parts.join("\n");
}

export function document(width: number, height: number, body: string): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">\n` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
