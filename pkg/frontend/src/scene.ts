/**
 * Figure scene model: a flat list of drawing commands in pixel space, plus
 * the linear-scale and axis helpers the figure builders share. One scene
 * renders to both SVG and PNG.
 */

export type Cmd =
  | { kind: "rect"; x: number; y: number; w: number; h: number; fill?: string; stroke?: string }
  | { kind: "line"; x1: number; y1: number; x2: number; y2: number; stroke: string; width?: number }
  | { kind: "polyline"; points: [number, number][]; stroke: string; width?: number }
  | { kind: "polygon"; points: [number, number][]; fill: string }
  | { kind: "circle"; cx: number; cy: number; r: number; fill: string }
  | {
      kind: "text";
      x: number;
      y: number;
      text: string;
      size?: number;
      anchor?: "start" | "middle" | "end";
      fill?: string;
    };

export interface Scene {
  width: number;
  height: number;
  cmds: Cmd[];
}

export function makeScene(width: number, height: number): Scene {
  return { width, height, cmds: [{ kind: "rect", x: 0, y: 0, w: width, h: height, fill: "#ffffff" }] };
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

/** Round tick positions covering the domain (about `count` of them). */
export function ticks(domain: [number, number], count = 5): number[] {
  const [lo, hi] = domain;
  const span = hi - lo || 1;
  const rawStep = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (m * mag >= rawStep) {
      step = m * mag;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9; v += step) {
    out.push(Math.abs(v) < 1e-12 ? 0 : Number(v.toPrecision(12)));
  }
  return out;
}

export function formatTick(value: number): string {
  if (Number.isInteger(value)) return String(value);
  const text = value.toFixed(3);
  return text.replace(/0+$/, "").replace(/\.$/, "");
}

export interface Panel {
  x: number;
  y: number;
  w: number;
  h: number;
  xScale: Scale;
  yScale: Scale;
}

export function addPanel(
  scene: Scene,
  box: { x: number; y: number; w: number; h: number },
  xDomain: [number, number],
  yDomain: [number, number],
  opts: { title?: string; xLabel?: string; yLabel?: string } = {}
): Panel {
  const xScale = linearScale(xDomain, [box.x, box.x + box.w]);
  const yScale = linearScale(yDomain, [box.y + box.h, box.y]);
  scene.cmds.push({ kind: "rect", x: box.x, y: box.y, w: box.w, h: box.h, fill: "#ffffff", stroke: "#444444" });
  for (const t of ticks(xDomain)) {
    const px = xScale(t);
    scene.cmds.push({ kind: "line", x1: px, y1: box.y + box.h, x2: px, y2: box.y + box.h + 4, stroke: "#444444" });
    scene.cmds.push({ kind: "text", x: px, y: box.y + box.h + 16, text: formatTick(t), size: 10, anchor: "middle", fill: "#333333" });
  }
  for (const t of ticks(yDomain)) {
    const py = yScale(t);
    scene.cmds.push({ kind: "line", x1: box.x - 4, y1: py, x2: box.x, y2: py, stroke: "#444444" });
    scene.cmds.push({ kind: "text", x: box.x - 7, y: py + 3, text: formatTick(t), size: 10, anchor: "end", fill: "#333333" });
    scene.cmds.push({ kind: "line", x1: box.x, y1: py, x2: box.x + box.w, y2: py, stroke: "#eeeeee" });
  }
  if (opts.title) {
    scene.cmds.push({ kind: "text", x: box.x + box.w / 2, y: box.y - 8, text: opts.title, size: 12, anchor: "middle" });
  }
  if (opts.xLabel) {
    scene.cmds.push({ kind: "text", x: box.x + box.w / 2, y: box.y + box.h + 30, text: opts.xLabel, size: 11, anchor: "middle", fill: "#333333" });
  }
  if (opts.yLabel) {
    scene.cmds.push({ kind: "text", x: box.x, y: box.y - 8, text: opts.yLabel, size: 10, anchor: "start", fill: "#333333" });
  }
  return { ...box, xScale, yScale };
}

export function clampDomain(values: number[], pad = 0.05): [number, number] {
  const finite = values.filter((v) => Number.isFinite(v));
  if (finite.length === 0) return [0, 1];
  let lo = Math.min(...finite);
  let hi = Math.max(...finite);
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const span = hi - lo;
  return [lo - pad * span, hi + pad * span];
}

export function seriesLine(panel: Panel, xs: number[], ys: number[], stroke: string, width = 1.5): Cmd {
  const points: [number, number][] = xs.map((x, i) => [panel.xScale(x), panel.yScale(ys[i])]);
  return { kind: "polyline", points, stroke, width };
}

export function bandPolygon(panel: Panel, xs: number[], low: number[], high: number[], fill: string): Cmd {
  const upper: [number, number][] = xs.map((x, i) => [panel.xScale(x), panel.yScale(high[i])]);
  const lower: [number, number][] = xs
    .map((x, i) => [panel.xScale(x), panel.yScale(low[i])] as [number, number])
    .reverse();
  return { kind: "polygon", points: upper.concat(lower), fill };
}

export const SCENARIO_COLORS: Record<string, string> = {
  sanremo: "#c0392b",
  brazil: "#27ae60",
  kpop: "#8e44ad",
  uk: "#2980b9",
};

export const SOURCE_PALETTE = [
  "#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#46f0f0", "#f032e6",
  "#bcf60c", "#fabebe", "#008080", "#9a6324", "#800000", "#808000", "#000075",
  "#e6beff",
];

export function scenarioColor(name: string): string {
  return SCENARIO_COLORS[name] ?? "#555555";
}

/** Blend a hex color toward white, for band fills the rasterizer can draw opaquely. */
export function lighten(hex: string, amount = 0.75): string {
  const n = parseInt(hex.slice(1), 16);
  const channel = (shift: number) => {
    const c = (n >> shift) & 0xff;
    return Math.round(c + (255 - c) * amount);
  };
  const rgb = (channel(16) << 16) | (channel(8) << 8) | channel(0);
  return `#${rgb.toString(16).padStart(6, "0")}`;
}
