/**
 * The three figure builders. Each consumes only the simulator's CSV output
 * directory and returns a scene plus any non-fatal warnings (a missing
 * scenario is annotated on the figure and reported via the exit code).
 */

import * as path from "node:path";

import { ContractError } from "./csv";
import {
  BandSeries,
  hasFile,
  lastTenByReplicate,
  loadBands,
  loadRobustness,
  loadSnapshot,
  loadTimeseries,
  songCloudDiameter,
} from "./data";
import {
  SOURCE_PALETTE,
  Scene,
  addPanel,
  bandPolygon,
  clampDomain,
  lighten,
  makeScene,
  scenarioColor,
  seriesLine,
} from "./scene";

export interface FigureResult {
  scene: Scene;
  warnings: string[];
}

export const EXPECTED_SCENARIOS = ["sanremo", "brazil", "kpop", "uk"];

const FIG1_PANELS: { metric: string; title: string }[] = [
  { metric: "entropy_cum", title: "consumption entropy (nats)" },
  { metric: "gini_cum", title: "gini concentration" },
  { metric: "epistemic_mean", title: "mean epistemic value" },
  { metric: "supply_spread", title: "supply dispersion" },
];

function percentile(values: number[], q: number): number {
  const sorted = [...values].sort((a, b) => a - b);
  const pos = (q / 100) * (sorted.length - 1);
  const lo = Math.floor(pos);
  const hi = Math.ceil(pos);
  if (lo === hi) return sorted[lo];
  return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
}

function mean(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}

function legend(scene: Scene, x: number, y: number, entries: [string, string][]): void {
  let px = x;
  for (const [label, color] of entries) {
    scene.cmds.push({ kind: "line", x1: px, y1: y - 4, x2: px + 18, y2: y - 4, stroke: color, width: 2.5 });
    scene.cmds.push({ kind: "text", x: px + 22, y: y, text: label, size: 11 });
    px += 26 + 7 * label.length;
  }
}

function annotateWarnings(scene: Scene, warnings: string[]): void {
  warnings.forEach((w, i) => {
    scene.cmds.push({
      kind: "text", x: 10, y: scene.height - 10 - 14 * i,
      text: `warning: ${w}`, size: 11, fill: "#b00000",
    });
  });
}

// ------------------------------------------------------------------ fig1

/** Four-metric time series, one line per scenario, optional percentile bands. */
export function buildFig1(outdir: string, useBands: boolean): FigureResult {
  const series = loadTimeseries(path.join(outdir, "timeseries_scenarios.csv"));
  const bandsPath = path.join(outdir, "bands.csv");
  const bands = useBands && hasFile(outdir, "bands.csv")
    ? loadBands(bandsPath, false, "scenarios")
    : new Map<string, Record<string, BandSeries>>();

  const warnings = EXPECTED_SCENARIOS.filter((s) => !series.has(s)).map(
    (s) => `scenario '${s}' missing from input`
  );
  const names = [...series.keys()];

  const scene = makeScene(900, 700);
  scene.cmds.push({ kind: "text", x: 450, y: 22, text: "ecosystem dynamics by institutional structure", size: 15, anchor: "middle" });
  const boxes = [
    { x: 70, y: 60, w: 350, h: 240 },
    { x: 510, y: 60, w: 350, h: 240 },
    { x: 70, y: 390, w: 350, h: 240 },
    { x: 510, y: 390, w: 350, h: 240 },
  ];
  FIG1_PANELS.forEach((panelSpec, i) => {
    const values: number[] = [];
    for (const name of names) {
      const ys = series.get(name)![panelSpec.metric] ?? [];
      values.push(...ys.filter(Number.isFinite));
      const band = bands.get(name)?.[panelSpec.metric];
      if (band) values.push(...band.p05, ...band.p95);
    }
    const steps = Math.max(...names.map((n) => (series.get(n)![panelSpec.metric] ?? []).length));
    const panel = addPanel(scene, boxes[i], [1, Math.max(steps, 2)], clampDomain(values), {
      title: panelSpec.title,
      xLabel: "step",
    });
    for (const name of names) {
      const ys = series.get(name)![panelSpec.metric];
      if (!ys) continue;
      const xs = ys.map((_, t) => t + 1);
      const band = bands.get(name)?.[panelSpec.metric];
      if (band && band.mean.length === ys.length) {
        scene.cmds.push(bandPolygon(panel, xs, band.p05, band.p95, lighten(scenarioColor(name))));
      }
    }
    for (const name of names) {
      const ys = series.get(name)![panelSpec.metric];
      if (!ys) continue;
      const xs = ys.map((_, t) => t + 1);
      scene.cmds.push(seriesLine(panel, xs, ys, scenarioColor(name)));
    }
  });
  legend(scene, 70, 675, names.map((n) => [n, scenarioColor(n)]));
  annotateWarnings(scene, warnings);
  return { scene, warnings };
}

// ------------------------------------------------------------------ fig2

interface Contrast {
  label: string;
  estimate: number;
  ciLow?: number;
  ciHigh?: number;
}

function deltaContrasts(outdir: string): { gini: Contrast[]; supply: Contrast[] } {
  if (hasFile(outdir, "robustness.csv")) {
    const rows = loadRobustness(path.join(outdir, "robustness.csv"));
    const gini = rows
      .filter((r) => r.prediction === "P2" && r.measure.includes("Δ Gini"))
      .map((r) => ({
        label: r.measure.replace(": Δ Gini (last10)", "").toLowerCase(),
        estimate: r.estimate,
        ciLow: r.ciLow,
        ciHigh: r.ciHigh,
      }));
    const supply = rows
      .filter((r) => r.prediction === "P4" && !r.measure.includes("Δ"))
      .map((r) => ({
        label: r.measure.replace(": Supply spread (last10)", "").toLowerCase(),
        estimate: r.estimate,
        ciLow: r.ciLow,
        ciHigh: r.ciHigh,
      }));
    return { gini, supply };
  }
  // Paper mode: point contrasts recomputed from the scenario series.
  const file = path.join(outdir, "timeseries_scenarios.csv");
  const lastGini = lastTenByReplicate(file, "gini_cum");
  const lastSupply = lastTenByReplicate(file, "supply_spread");
  const level = (m: Map<string, number[]>, name: string) => {
    const values = m.get(name);
    if (!values) throw new ContractError(`scenario '${name}' missing for contrasts`);
    return mean(values);
  };
  const gini = [
    ["sanremo", "brazil"],
    ["uk", "brazil"],
    ["sanremo", "kpop"],
  ].map(([hi, lo]) => ({
    label: `${hi} - ${lo}`,
    estimate: level(lastGini, hi) - level(lastGini, lo),
  }));
  const supply = [...lastSupply.keys()].map((name) => ({
    label: name,
    estimate: level(lastSupply, name),
  }));
  return { gini, supply };
}

function barPanel(scene: Scene, box: { x: number; y: number; w: number; h: number },
                  contrasts: Contrast[], title: string, color: string): void {
  const values = contrasts.flatMap((c) => [c.estimate, c.ciLow ?? c.estimate, c.ciHigh ?? c.estimate]);
  const domain = clampDomain([0, ...values], 0.1);
  const panel = addPanel(scene, box, [0, contrasts.length], domain, { title });
  const zero = panel.yScale(0);
  scene.cmds.push({ kind: "line", x1: box.x, y1: zero, x2: box.x + box.w, y2: zero, stroke: "#888888" });
  contrasts.forEach((c, i) => {
    const cx = panel.xScale(i + 0.5);
    const barWidth = (box.w / contrasts.length) * 0.45;
    const top = panel.yScale(Math.max(0, c.estimate));
    const bottom = panel.yScale(Math.min(0, c.estimate));
    scene.cmds.push({ kind: "rect", x: cx - barWidth / 2, y: top, w: barWidth, h: Math.max(bottom - top, 1), fill: lighten(color, 0.45), stroke: color });
    if (c.ciLow !== undefined && c.ciHigh !== undefined) {
      scene.cmds.push({ kind: "line", x1: cx, y1: panel.yScale(c.ciLow), x2: cx, y2: panel.yScale(c.ciHigh), stroke: "#222222", width: 1.5 });
      scene.cmds.push({ kind: "line", x1: cx - 4, y1: panel.yScale(c.ciLow), x2: cx + 4, y2: panel.yScale(c.ciLow), stroke: "#222222" });
      scene.cmds.push({ kind: "line", x1: cx - 4, y1: panel.yScale(c.ciHigh), x2: cx + 4, y2: panel.yScale(c.ciHigh), stroke: "#222222" });
    }
    scene.cmds.push({ kind: "text", x: cx, y: box.y + box.h + 16, text: c.label, size: 9, anchor: "middle", fill: "#333333" });
  });
}

/** Four prediction panels: entropy vs curation, Gini contrasts, supply levels, CC groups. */
export function buildFig2(outdir: string, useBands: boolean): FigureResult {
  const warnings: string[] = [];
  const scene = makeScene(900, 700);
  scene.cmds.push({ kind: "text", x: 450, y: 22, text: "four predictions", size: 15, anchor: "middle" });

  // Panel A: last-10-step consumption entropy against curation strength.
  const sweepFile = path.join(outdir, "timeseries_alpha_sweep.csv");
  const byAlpha = lastTenByReplicate(sweepFile, "entropy_cum", true);
  const sweep = [...byAlpha.entries()]
    .map(([key, values]) => ({ alpha: Number(key), values }))
    .sort((a, b) => a.alpha - b.alpha);
  const alphas = sweep.map((e) => e.alpha);
  const means = sweep.map((e) => mean(e.values));
  const lows = sweep.map((e) => percentile(e.values, 5));
  const highs = sweep.map((e) => percentile(e.values, 95));
  const panelA = addPanel(
    scene, { x: 70, y: 60, w: 350, h: 240 },
    clampDomain(alphas, 0.02), clampDomain([...lows, ...highs]),
    { title: "a. entropy vs curation strength", xLabel: "alpha" }
  );
  const replicated = [...byAlpha.values()][0].length > 1;
  if (useBands && replicated) {
    scene.cmds.push(bandPolygon(panelA, alphas, lows, highs, lighten("#2c3e50")));
  }
  scene.cmds.push(seriesLine(panelA, alphas, means, "#2c3e50", 2));
  means.forEach((m, i) => {
    scene.cmds.push({ kind: "circle", cx: panelA.xScale(alphas[i]), cy: panelA.yScale(m), r: 2.5, fill: "#2c3e50" });
  });

  // Panels B and C: concentration contrasts and supply-dispersion levels.
  const { gini, supply } = deltaContrasts(outdir);
  if (gini.length === 0) warnings.push("no Gini contrasts found");
  barPanel(scene, { x: 510, y: 60, w: 350, h: 240 }, gini, "b. gini contrasts", "#c0392b");
  barPanel(scene, { x: 70, y: 390, w: 350, h: 240 }, supply, "c. supply dispersion by scenario", "#27ae60");

  // Panel D: individual consumption diversity by cultural-capital group.
  const ccFile = path.join(outdir, "timeseries_cultural_capital.csv");
  const cc = loadTimeseries(ccFile);
  const ccSeries = [...cc.values()][0];
  const high = ccSeries["indiv_entropy_mean_highcc"];
  const low = ccSeries["indiv_entropy_mean_lowcc"];
  if (!high || !low) {
    throw new ContractError(`${ccFile}: cultural-capital group metrics missing`);
  }
  const steps = high.map((_, t) => t + 1);
  const panelD = addPanel(
    scene, { x: 510, y: 390, w: 350, h: 240 },
    [1, Math.max(steps.length, 2)], clampDomain([...high, ...low]),
    { title: "d. individual entropy by cultural capital", xLabel: "step" }
  );
  const ccBands = useBands && hasFile(outdir, "bands.csv")
    ? loadBands(path.join(outdir, "bands.csv"), false, "cultural_capital")
    : new Map<string, Record<string, BandSeries>>();
  const ccBand = [...ccBands.values()][0];
  for (const [metric, color] of [
    ["indiv_entropy_mean_highcc", "#2980b9"],
    ["indiv_entropy_mean_lowcc", "#e67e22"],
  ] as const) {
    const band = ccBand?.[metric];
    if (band && band.mean.length === steps.length) {
      scene.cmds.push(bandPolygon(panelD, steps, band.p05, band.p95, lighten(color)));
    }
  }
  scene.cmds.push(seriesLine(panelD, steps, high, "#2980b9", 2));
  scene.cmds.push(seriesLine(panelD, steps, low, "#e67e22", 2));
  legend(scene, 510, 675, [["high cc", "#2980b9"], ["low cc", "#e67e22"]]);

  annotateWarnings(scene, warnings);
  return { scene, warnings };
}

// ------------------------------------------------------------------ fig3

/** Feature-space scatter at the final step: songs sized by plays, agents grey. */
export function buildFig3(outdir: string): FigureResult {
  const snapshots = loadSnapshot(path.join(outdir, "snapshot.csv"));
  const warnings = EXPECTED_SCENARIOS.filter((s) => !snapshots.has(s)).map(
    (s) => `scenario '${s}' missing from snapshot`
  );
  const names = [...snapshots.keys()];
  const cols = Math.min(names.length, 2);
  const rowCount = Math.ceil(names.length / cols) || 1;
  const panelSize = 310;
  const scene = makeScene(80 + cols * (panelSize + 60), 60 + rowCount * (panelSize + 70));
  scene.cmds.push({ kind: "text", x: scene.width / 2, y: 22, text: "feature space at the final step", size: 15, anchor: "middle" });

  const maxPlays = Math.max(
    1, ...names.flatMap((n) => snapshots.get(n)!.songs.map((s) => s.plays))
  );
  const rMin = 1.6;
  const rMax = 9;
  const radius = (plays: number) =>
    Math.sqrt(rMin * rMin + (plays / maxPlays) * (rMax * rMax - rMin * rMin));

  names.forEach((name, i) => {
    const col = i % cols;
    const row = Math.floor(i / cols);
    const box = { x: 60 + col * (panelSize + 60), y: 50 + row * (panelSize + 70), w: panelSize, h: panelSize };
    const panel = addPanel(scene, box, [0, 4], [0, 4], { title: name, xLabel: "feature 1" });
    const snap = snapshots.get(name)!;
    for (const agent of snap.agents) {
      scene.cmds.push({ kind: "circle", cx: panel.xScale(agent.x), cy: panel.yScale(agent.y), r: 1.1, fill: "#b0b0b0" });
    }
    for (const song of snap.songs) {
      scene.cmds.push({
        kind: "circle",
        cx: panel.xScale(song.x),
        cy: panel.yScale(song.y),
        r: radius(song.plays),
        fill: SOURCE_PALETTE[song.sourceId % SOURCE_PALETTE.length],
      });
    }
  });
  annotateWarnings(scene, warnings);
  return { scene, warnings };
}

export { songCloudDiameter };
