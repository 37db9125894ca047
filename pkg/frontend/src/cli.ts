/**
 * Render the figure set from a simulator output directory.
 *
 *   node dist/cli.js --outdir robust_out --figdir figs [--no-bands] [--figures fig1,fig3]
 *
 * Each figure is written as both SVG and PNG. Exit codes: 0 all figures
 * rendered cleanly; 1 usage error or contract violation (missing/empty/
 * malformed inputs; nothing is written for the failing figure); 2 rendered
 * with warnings (e.g. an expected scenario absent, annotated on the figure).
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { ContractError } from "./csv";
import { hasFile } from "./data";
import { FigureResult, buildFig1, buildFig2, buildFig3 } from "./figures";
import { renderPng } from "./raster";
import { renderSvg } from "./svg";

interface Args {
  outdir: string;
  figdir: string;
  bands: boolean;
  figures: string[];
}

export function parseArgs(argv: string[]): Args {
  let outdir = "";
  let figdir = "";
  let bands = true;
  let figures = ["fig1", "fig2", "fig3"];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--outdir") outdir = argv[++i] ?? "";
    else if (arg === "--figdir") figdir = argv[++i] ?? "";
    else if (arg === "--no-bands") bands = false;
    else if (arg === "--figures") figures = (argv[++i] ?? "").split(",").filter(Boolean);
    else throw new ContractError(`unknown argument: ${arg}`);
  }
  if (!outdir || !figdir) {
    throw new ContractError("usage: --outdir <simulator output dir> --figdir <image dir> [--no-bands] [--figures fig1,fig2,fig3]");
  }
  const bad = figures.filter((f) => !["fig1", "fig2", "fig3"].includes(f));
  if (bad.length > 0) {
    throw new ContractError(`unknown figures: ${bad.join(",")}`);
  }
  return { outdir, figdir, bands, figures };
}

export function renderAll(args: Args): { written: string[]; warnings: string[] } {
  if (!fs.existsSync(args.outdir)) {
    throw new ContractError(`output directory not found: ${args.outdir}`);
  }
  fs.mkdirSync(args.figdir, { recursive: true });
  const useBands = args.bands && hasFile(args.outdir, "bands.csv");
  const builders: Record<string, () => FigureResult> = {
    fig1: () => buildFig1(args.outdir, useBands),
    fig2: () => buildFig2(args.outdir, useBands),
    fig3: () => buildFig3(args.outdir),
  };
  const written: string[] = [];
  const warnings: string[] = [];
  for (const name of args.figures) {
    const { scene, warnings: figWarnings } = builders[name]();
    const svgPath = path.join(args.figdir, `${name}.svg`);
    const pngPath = path.join(args.figdir, `${name}.png`);
    fs.writeFileSync(svgPath, renderSvg(scene), "utf8");
    fs.writeFileSync(pngPath, renderPng(scene));
    written.push(svgPath, pngPath);
    warnings.push(...figWarnings.map((w) => `${name}: ${w}`));
  }
  return { written, warnings };
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(`figures: ${(err as Error).message}`);
    return 1;
  }
  try {
    const { written, warnings } = renderAll(args);
    for (const file of written) console.log(`wrote ${file}`);
    for (const warning of warnings) console.error(`figures: warning: ${warning}`);
    return warnings.length > 0 ? 2 : 0;
  } catch (err) {
    if (err instanceof ContractError) {
      console.error(`figures: contract violation: ${err.message}`);
      return 1;
    }
    console.error(`figures: ${(err as Error).stack ?? err}`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
