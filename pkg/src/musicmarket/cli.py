"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 runtime
failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .aif import trajectory_demo_rows
from .config import (
    ConfigError,
    PRESET_NAMES,
    ScenarioConfig,
    SimParams,
    load_config_file,
    params_as_dict,
    preset,
    scenario_from_mapping,
)
from .experiments import (
    ExperimentPlan,
    cultural_capital_config,
    emit_robustness_table,
    run_alpha_sweep,
    run_cross_national,
    run_cultural_capital,
    run_supply_contrasts,
    run_scenario,
    simulate_world,
    sweep_baseline,
    CC_HIGH,
    CC_LOW,
    SUPPLY_BASELINE,
)
from .output import (
    RNG_ALGORITHM,
    verify_manifest,
    write_bands_csv,
    write_manifest,
    write_robustness_csv,
    write_snapshot_csv,
    write_timeseries_csv,
)

USAGE_EXIT, VERIFY_EXIT, RUNTIME_EXIT = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; the CLI contract reserves 2 for
    # verification failures, so usage errors exit 1 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(USAGE_EXIT)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="musicmarket",
        description="Run the music-market simulation experiments and emit CSV outputs.",
    )
    parser.add_argument("--mode", choices=("paper", "robust"), default="paper",
                        help="paper: single replicate, no bands; robust: replicated with bands")
    parser.add_argument("--outdir", default="outputs", help="output directory")
    parser.add_argument("--seed", type=int, default=123, help="base seed; replicate r uses seed+r")
    parser.add_argument("--replicates", type=int, default=None,
                        help="replicates per experiment (default: 1 in paper mode, 200 in robust)")
    parser.add_argument("--n_agents_cc", type=int, default=100,
                        help="population size of the cultural-capital experiment")
    parser.add_argument("--show_bands", action="store_true",
                        help="mark the output as band-bearing (bands.csv needs >= 2 replicates)")
    parser.add_argument("--scenario", action="append", choices=PRESET_NAMES, default=None,
                        help="scenario preset to run (repeatable; default: all four)")
    parser.add_argument("--config", default=None,
                        help="key = value file overriding any scenario/shared parameter")
    parser.add_argument("--alpha-grid", default=None,
                        help="comma-separated curation grid for the sweep, e.g. 0.0,0.3,0.6,0.9")
    parser.add_argument("--entropy-base", choices=("step", "cum"), default="cum",
                        help="which entropy/Gini base feeds the prediction checks")
    parser.add_argument("--jobs", type=int, default=-1,
                        help="parallel workers for replicates (-1: all cores; results identical)")
    parser.add_argument("--verify", action="store_true",
                        help="re-hash an existing outdir against its manifest and exit")
    parser.add_argument("--aif-demo", action="store_true",
                        help="print the listening-trajectory demo table and exit")
    return parser


def parse_cli(argv: list[str]) -> ExperimentPlan:
    """argv -> resolved ExperimentPlan (raises SystemExit(1) on usage errors)."""
    args = build_parser().parse_args(argv)
    return _plan_from_args(args)


def _plan_from_args(args: argparse.Namespace) -> ExperimentPlan:
    replicates = args.replicates
    if replicates is None:
        replicates = 1 if args.mode == "paper" else 200
    if replicates < 1:
        raise SystemExit(USAGE_EXIT)
    if args.alpha_grid is not None:
        try:
            grid = tuple(float(tok) for tok in args.alpha_grid.split(",") if tok.strip())
        except ValueError as exc:
            sys.stderr.write(f"musicmarket: error: bad --alpha-grid: {exc}\n")
            raise SystemExit(USAGE_EXIT)
    else:
        grid = ExperimentPlan().alpha_grid
    overrides = {}
    if args.config:
        try:
            overrides = load_config_file(args.config)
        except (ConfigError, OSError) as exc:
            sys.stderr.write(f"musicmarket: error: {exc}\n")
            raise SystemExit(USAGE_EXIT)
    try:
        return ExperimentPlan(
            mode=args.mode,
            base_seed=args.seed,
            replicates=replicates,
            alpha_grid=grid,
            n_agents_cc=args.n_agents_cc,
            scenarios=tuple(args.scenario or PRESET_NAMES),
            entropy_base=args.entropy_base,
            show_bands=args.show_bands,
            jobs=args.jobs,
            param_overrides=overrides,
        )
    except ValueError as exc:
        sys.stderr.write(f"musicmarket: error: {exc}\n")
        raise SystemExit(USAGE_EXIT)


def _scenario_configs(plan: ExperimentPlan, params: SimParams) -> list[ScenarioConfig]:
    configs = [preset(name, params) for name in plan.scenarios]
    scen_keys = {"name", "k_sources", "conformity", "alpha", "mu_c_bar", "sigma_c_bar"}
    if any(k in scen_keys for k in plan.param_overrides):
        custom = scenario_from_mapping(plan.param_overrides)
        if all(c.name != custom.name for c in configs):
            configs.append(custom)
    return configs


def _config_dict(config: ScenarioConfig) -> dict:
    return {
        "name": config.name,
        "k_sources": config.k_sources,
        "conformity": config.conformity,
        "alpha": config.alpha,
        "mu_c_bar": config.mu_c_bar,
        "sigma_c_bar": config.sigma_c_bar,
    }


def run_pipeline(plan: ExperimentPlan, outdir: Path, argv: list[str]) -> None:
    """Run every experiment in the plan and write the output tree."""
    started = time.time()
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    from dataclasses import replace

    params = replace(
        SimParams(),
        **{k: v for k, v in plan.param_overrides.items() if hasattr(SimParams(), k)},
    )
    configs = _scenario_configs(plan, params)
    jobs, r, seed = plan.jobs, plan.replicates, plan.base_seed

    grid = None
    if len(configs) >= 2:
        grid = run_cross_national(configs, r, seed, plan.entropy_base, jobs)
    else:
        # Degenerate single-scenario request: still emit its time series.
        from .experiments import ScenarioGridResult

        only = configs[0]
        series = [run_scenario(only, seed + i) for i in range(r)]
        grid = ScenarioGridResult(
            scenarios=(only.name,),
            series={only.name: series},
            gini_last10={},
            supply_last10={},
            gini_deltas={},
        )

    sweep = run_alpha_sweep(
        sweep_baseline(params), plan.alpha_grid, r, seed, plan.entropy_base, jobs
    )
    cc = run_cultural_capital(plan.n_agents_cc, r, seed, params, jobs)
    supply = None
    if SUPPLY_BASELINE in [c.name for c in configs] and len(configs) >= 2:
        supply = run_supply_contrasts(configs, r, seed, jobs, grid=grid)

    alphas = {c.name: c.alpha for c in configs}
    paths = write_timeseries_csv(outdir, grid, alphas, sweep, cc)
    if r >= 2:
        paths.append(write_bands_csv(outdir, grid, alphas, sweep, cc))

    rows = []
    if plan.mode == "robust":
        rows = emit_robustness_table(sweep, grid if grid.gini_deltas else None, cc, supply)
        paths.append(write_robustness_csv(rows, outdir))

    snapshots = {c.name: simulate_world(c, seed) for c in configs}
    paths.append(write_snapshot_csv(snapshots, outdir))

    parameters = {
        "mode": plan.mode,
        "seed": seed,
        "replicates": r,
        "alpha_grid": list(plan.alpha_grid),
        "n_agents_cc": plan.n_agents_cc,
        "entropy_base": plan.entropy_base,
        "show_bands": plan.show_bands,
        "rng_algorithm": RNG_ALGORITHM,
        "shared_params": params_as_dict(params),
        "scenarios": [_config_dict(c) for c in configs],
        "sweep_baseline": _config_dict(sweep_baseline(params)),
        "cultural_capital": {
            **_config_dict(cultural_capital_config(plan.n_agents_cc, params)),
            "n_agents_cc": plan.n_agents_cc,
            "high_group": list(CC_HIGH),
            "low_group": list(CC_LOW),
        },
    }
    write_manifest(outdir, parameters, started, argv)

    print(f"wrote {len(paths) + 1} files to {outdir}")
    for row in rows:
        print(f"  {row.prediction}  {row.measure}: {row.estimate:.4f} "
              f"[{row.ci_low:.4f}, {row.ci_high:.4f}]  {row.notes}")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.aif_demo:
        print(f"{'initial surprisal':>18s}  {'class':<18s}  first preference values")
        for i0, label, values in trajectory_demo_rows():
            print(f"{i0:18.2f}  {label:<18s}  {values}")
        return 0

    if args.verify:
        problems = verify_manifest(Path(args.outdir))
        if problems:
            for p in problems:
                print(p, file=sys.stderr)
            return VERIFY_EXIT
        print(f"manifest OK: {args.outdir}")
        return 0

    try:
        plan = _plan_from_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        run_pipeline(plan, Path(args.outdir), argv)
    except (ConfigError, ValueError) as exc:
        print(f"musicmarket: error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except Exception as exc:  # noqa: BLE001 - contract: runtime failures exit 3
        print(f"musicmarket: runtime failure: {exc}", file=sys.stderr)
        return RUNTIME_EXIT
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
