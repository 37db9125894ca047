/**
 * Typed loaders over the simulator's CSV contract.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { ContractError, asRecords, readTable, toNumber } from "./csv";

export interface SeriesPoint {
  step: number;
  value: number;
}

/** metric -> per-step mean across replicates (and the replicate count). */
export interface MetricSeries {
  [metric: string]: number[];
}

export interface BandSeries {
  p05: number[];
  mean: number[];
  p95: number[];
}

export interface SnapshotSong {
  id: number;
  sourceId: number;
  x: number;
  y: number;
  plays: number;
}

export interface SnapshotAgent {
  x: number;
  y: number;
}

export interface ScenarioSnapshot {
  songs: SnapshotSong[];
  agents: SnapshotAgent[];
}

export interface RobustnessRow {
  prediction: string;
  measure: string;
  estimate: number;
  ciLow: number;
  ciHigh: number;
  notes: string;
}

const TIMESERIES_COLUMNS = ["experiment", "scenario", "alpha", "replicate", "step", "metric", "value"];
const BANDS_COLUMNS = ["experiment", "scenario", "alpha", "step", "metric", "p05", "mean", "p50", "p95"];
const SNAPSHOT_COLUMNS = ["scenario", "kind", "id", "source_id", "x", "y", "plays"];
const ROBUSTNESS_COLUMNS = ["prediction", "measure", "estimate", "ci_low", "ci_high", "notes"];

export function hasFile(outdir: string, name: string): boolean {
  return fs.existsSync(path.join(outdir, name));
}

/**
 * Load a long-format timeseries file and average each (key, metric, step)
 * across replicates. `key` is the scenario name unless `byAlpha` is set, in
 * which case the alpha value string keys the groups (the sweep file).
 */
export function loadTimeseries(
  file: string,
  byAlpha = false
): Map<string, MetricSeries> {
  const table = readTable(file, TIMESERIES_COLUMNS);
  const sums = new Map<string, Map<string, Map<number, { total: number; n: number }>>>();
  for (const r of asRecords(table)) {
    const key = byAlpha ? r.alpha : r.scenario;
    const step = toNumber(r.step, file);
    const value = r.value === "" ? NaN : toNumber(r.value, file);
    let metrics = sums.get(key);
    if (!metrics) sums.set(key, (metrics = new Map()));
    let steps = metrics.get(r.metric);
    if (!steps) metrics.set(r.metric, (steps = new Map()));
    const cell = steps.get(step) ?? { total: 0, n: 0 };
    if (!Number.isNaN(value)) {
      cell.total += value;
      cell.n += 1;
    }
    steps.set(step, cell);
  }
  const out = new Map<string, MetricSeries>();
  for (const [key, metrics] of sums) {
    const series: MetricSeries = {};
    for (const [metric, steps] of metrics) {
      const ordered = [...steps.keys()].sort((a, b) => a - b);
      series[metric] = ordered.map((s) => {
        const cell = steps.get(s)!;
        return cell.n > 0 ? cell.total / cell.n : NaN;
      });
    }
    out.set(key, series);
  }
  return out;
}

/** Per-replicate last-10-step means of one metric, grouped by scenario or alpha. */
export function lastTenByReplicate(
  file: string,
  metric: string,
  byAlpha = false
): Map<string, number[]> {
  const table = readTable(file, TIMESERIES_COLUMNS);
  const groups = new Map<string, Map<string, { step: number; value: number }[]>>();
  for (const r of asRecords(table)) {
    if (r.metric !== metric) continue;
    const key = byAlpha ? r.alpha : r.scenario;
    let reps = groups.get(key);
    if (!reps) groups.set(key, (reps = new Map()));
    let points = reps.get(r.replicate);
    if (!points) reps.set(r.replicate, (points = []));
    points.push({ step: toNumber(r.step, file), value: toNumber(r.value, file) });
  }
  const out = new Map<string, number[]>();
  for (const [key, reps] of groups) {
    const means: number[] = [];
    for (const rep of [...reps.keys()].sort((a, b) => Number(a) - Number(b))) {
      const points = reps.get(rep)!;
      points.sort((a, b) => a.step - b.step);
      const tail = points.slice(-10);
      means.push(tail.reduce((acc, p) => acc + p.value, 0) / tail.length);
    }
    out.set(key, means);
  }
  return out;
}

export function loadBands(
  file: string,
  byAlpha = false,
  experiment?: string
): Map<string, Record<string, BandSeries>> {
  const table = readTable(file, BANDS_COLUMNS);
  const out = new Map<string, Record<string, BandSeries>>();
  const rows = asRecords(table)
    .map((r): Record<string, string> & { stepNum: number } =>
      Object.assign({}, r, { stepNum: toNumber(r.step, file) }))
    .sort((a, b) => a.stepNum - b.stepNum);
  for (const r of rows) {
    if (experiment && r.experiment !== experiment) continue;
    if (r.p05 === "" || r.mean === "" || r.p95 === "") continue;
    const key = byAlpha ? r.alpha : r.scenario;
    let metrics = out.get(key);
    if (!metrics) out.set(key, (metrics = {}));
    let band = metrics[r.metric];
    if (!band) band = metrics[r.metric] = { p05: [], mean: [], p95: [] };
    band.p05.push(toNumber(r.p05, file));
    band.mean.push(toNumber(r.mean, file));
    band.p95.push(toNumber(r.p95, file));
  }
  return out;
}

export function loadSnapshot(file: string): Map<string, ScenarioSnapshot> {
  const table = readTable(file, SNAPSHOT_COLUMNS);
  const out = new Map<string, ScenarioSnapshot>();
  for (const r of asRecords(table)) {
    let snap = out.get(r.scenario);
    if (!snap) out.set(r.scenario, (snap = { songs: [], agents: [] }));
    if (r.kind === "song") {
      snap.songs.push({
        id: toNumber(r.id, file),
        sourceId: toNumber(r.source_id, file),
        x: toNumber(r.x, file),
        y: toNumber(r.y, file),
        plays: toNumber(r.plays, file),
      });
    } else if (r.kind === "agent") {
      snap.agents.push({ x: toNumber(r.x, file), y: toNumber(r.y, file) });
    }
  }
  for (const [name, snap] of out) {
    if (snap.songs.length === 0) {
      throw new ContractError(`snapshot has no songs for scenario '${name}'`);
    }
  }
  return out;
}

export function loadRobustness(file: string): RobustnessRow[] {
  const table = readTable(file, ROBUSTNESS_COLUMNS);
  return asRecords(table).map((r) => ({
    prediction: r.prediction,
    measure: r.measure,
    estimate: toNumber(r.estimate, file),
    ciLow: toNumber(r.ci_low, file),
    ciHigh: toNumber(r.ci_high, file),
    notes: r.notes,
  }));
}

/** Diameter (max pairwise distance) of the song cloud in one snapshot panel. */
export function songCloudDiameter(snapshot: ScenarioSnapshot): number {
  let best = 0;
  const songs = snapshot.songs;
  for (let i = 0; i < songs.length; i++) {
    for (let j = i + 1; j < songs.length; j++) {
      const dx = songs[i].x - songs[j].x;
      const dy = songs[i].y - songs[j].y;
      const d = Math.hypot(dx, dy);
      if (d > best) best = d;
    }
  }
  return best;
}
