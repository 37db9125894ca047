"""Experiment orchestration: scenario runs, sweeps, contrasts, robustness rows.

Seed discipline: replicate ``r`` of any experiment runs with seed
``base_seed + r``, so any single replicate can be reproduced in isolation.
Replicates are independent simulations and may run in parallel; results are
always reduced in (alpha, replicate) order, so the outputs do not depend on
scheduling.

Intervals are 5th-95th percentiles across replicates (the replicate-quantile
style used throughout the outputs); "last10" statistics are means over the
final 10 steps of a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .config import ScenarioConfig, SimParams, preset
from .dynamics import step
from .metrics import MetricSeries, percentile_bands, ols_slope
from .world import WorldState, init_world

__all__ = [
    "ExperimentPlan",
    "IntervalEstimate",
    "RobustnessRow",
    "AlphaSweepResult",
    "ScenarioGridResult",
    "CulturalCapitalResult",
    "SupplyContrastResult",
    "DEFAULT_ALPHA_GRID",
    "CC_HIGH",
    "CC_LOW",
    "sweep_baseline",
    "cultural_capital_config",
    "run_scenario",
    "simulate_world",
    "run_alpha_sweep",
    "run_cross_national",
    "run_cultural_capital",
    "run_supply_contrasts",
    "emit_robustness_table",
]

DEFAULT_ALPHA_GRID = tuple(round(0.1 * i, 1) for i in range(10))

# Cultural-capital groups: (mu_c_bar, sigma_c_bar). The bandwidth sigma_c is
# the driver under study; the sweet spots are nearly matched to avoid
# confounding. Both groups live in one high-curation world.
CC_HIGH = (1.1, 1.3)
CC_LOW = (1.0, 0.6)

GINI_DELTA_PAIRS = (("sanremo", "brazil"), ("uk", "brazil"), ("sanremo", "kpop"))
SUPPLY_BASELINE = "sanremo"


@dataclass(frozen=True)
class ExperimentPlan:
    """Resolved run request: which experiments at which scale."""

    mode: str = "paper"  # "paper" (single replicate) or "robust"
    base_seed: int = 123
    replicates: int = 1
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    n_agents_cc: int = 100
    scenarios: tuple[str, ...] = ("sanremo", "brazil", "kpop", "uk")
    entropy_base: str = "cum"  # which entropy/gini base feeds prediction checks
    show_bands: bool = False
    jobs: int = 1
    param_overrides: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.mode not in ("paper", "robust"):
            raise ValueError(f"mode must be paper or robust, got {self.mode!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.entropy_base not in ("step", "cum"):
            raise ValueError("entropy_base must be 'step' or 'cum'")
        if any(not 0.0 <= a <= 1.0 for a in self.alpha_grid):
            raise ValueError("alpha_grid values must lie in [0, 1]")


@dataclass(frozen=True)
class IntervalEstimate:
    """Point estimate with a 5th-95th replicate-percentile interval."""

    estimate: float
    ci_low: float
    ci_high: float

    @classmethod
    def from_replicates(cls, values: np.ndarray) -> "IntervalEstimate":
        values = np.asarray(values, dtype=float)
        lo, hi = np.percentile(values, [5.0, 95.0])
        return cls(float(values.mean()), float(lo), float(hi))

    def excludes_zero(self, direction: int) -> bool:
        """True if the whole interval sits on the ``direction`` side of zero."""
        return self.ci_low > 0.0 if direction > 0 else self.ci_high < 0.0


@dataclass(frozen=True)
class RobustnessRow:
    prediction: str
    measure: str
    estimate: float
    ci_low: float
    ci_high: float
    notes: str


def sweep_baseline(params: SimParams | None = None) -> ScenarioConfig:
    """Neutral mid-range scenario for the curation sweep; only alpha is varied."""
    return ScenarioConfig(
        name="baseline", k_sources=8, conformity=0.10, alpha=0.0,
        mu_c_bar=1.0, sigma_c_bar=1.0, params=params or SimParams(),
    )


def cultural_capital_config(
    n_agents_cc: int, params: SimParams | None = None
) -> ScenarioConfig:
    """High-curation world shared by the two cultural-capital groups."""
    if n_agents_cc % 2 != 0:
        raise ValueError("n_agents_cc must be even (two equal groups)")
    params = replace(params or SimParams(), n_agents=n_agents_cc)
    return ScenarioConfig(
        name="cc", k_sources=5, conformity=0.5, alpha=0.9,
        mu_c_bar=(CC_HIGH[0] + CC_LOW[0]) / 2.0,
        sigma_c_bar=(CC_HIGH[1] + CC_LOW[1]) / 2.0,
        params=params,
    )


def _simulate(
    config: ScenarioConfig,
    seed: int,
    record_indiv: bool = False,
    mu_c_bar_per_agent: np.ndarray | None = None,
    sigma_c_bar_per_agent: np.ndarray | None = None,
) -> tuple[MetricSeries, WorldState]:
    rng = np.random.default_rng(seed)
    world = init_world(config, rng, mu_c_bar_per_agent, sigma_c_bar_per_agent)
    series = MetricSeries()
    for _ in range(config.params.n_steps):
        exposure_before = world.exposure.copy()
        result = step(world, config, rng)
        series.record_step(world, result.selections, exposure_before, config.params)
        if not record_indiv:
            series.indiv_entropy.clear()
    return series, world


def run_scenario(
    config: ScenarioConfig, seed: int, record_indiv: bool = False
) -> MetricSeries:
    """Initialize and run one world for n_steps, recording metrics each step."""
    series, _ = _simulate(config, seed, record_indiv)
    return series


def simulate_world(config: ScenarioConfig, seed: int) -> WorldState:
    """Run one replicate and return the final world (for snapshots)."""
    _, world = _simulate(config, seed)
    return world


def _parallel(jobs: int, tasks: list) -> list:
    if jobs == 1:
        return [f(*args, **kwargs) for f, args, kwargs in tasks]
    return Parallel(n_jobs=jobs)(delayed(f)(*args, **kwargs) for f, args, kwargs in tasks)


@dataclass
class AlphaSweepResult:
    alphas: tuple[float, ...]
    base_name: str
    series: dict[float, list[MetricSeries]]       # alpha -> one series per replicate
    entropy_last10: np.ndarray                    # (replicates, n_alpha)
    gini_last10: np.ndarray                       # (replicates, n_alpha)
    entropy_slopes: np.ndarray                    # (replicates,)
    gini_slopes: np.ndarray
    entropy_slope: IntervalEstimate
    gini_slope: IntervalEstimate


def run_alpha_sweep(
    base_config: ScenarioConfig | None,
    alpha_grid: tuple[float, ...],
    replicates: int,
    base_seed: int,
    entropy_base: str = "cum",
    jobs: int = 1,
) -> AlphaSweepResult:
    """Run the curation-strength sweep and the slope analysis behind it.

    Replicate r runs every grid point with seed base_seed + r, so grid points
    are paired within a replicate; each replicate contributes one last10 mean
    per alpha and therefore one OLS slope, and the slope interval is the
    5th-95th percentile across replicates.
    """
    if len(alpha_grid) < 2:
        raise ValueError("alpha_grid must contain at least 2 points")
    base = base_config or sweep_baseline()
    configs = [replace(base, alpha=a) for a in alpha_grid]
    for c in configs:
        c.validate()

    tasks = [
        (run_scenario, (config, base_seed + r), {})
        for r in range(replicates)
        for config in configs
    ]
    flat = _parallel(jobs, tasks)

    n_alpha = len(alpha_grid)
    series: dict[float, list[MetricSeries]] = {a: [] for a in alpha_grid}
    ent = np.empty((replicates, n_alpha))
    gin = np.empty((replicates, n_alpha))
    ent_name, gin_name = f"entropy_{entropy_base}", f"gini_{entropy_base}"
    for r in range(replicates):
        for i, a in enumerate(alpha_grid):
            s = flat[r * n_alpha + i]
            series[a].append(s)
            ent[r, i] = s.last10_mean(ent_name)
            gin[r, i] = s.last10_mean(gin_name)

    xs = np.asarray(alpha_grid)
    ent_slopes = np.array([ols_slope(xs, ent[r]) for r in range(replicates)])
    gin_slopes = np.array([ols_slope(xs, gin[r]) for r in range(replicates)])
    return AlphaSweepResult(
        alphas=tuple(alpha_grid),
        base_name=base.name,
        series=series,
        entropy_last10=ent,
        gini_last10=gin,
        entropy_slopes=ent_slopes,
        gini_slopes=gin_slopes,
        entropy_slope=IntervalEstimate.from_replicates(ent_slopes),
        gini_slope=IntervalEstimate.from_replicates(gin_slopes),
    )


@dataclass
class ScenarioGridResult:
    scenarios: tuple[str, ...]
    series: dict[str, list[MetricSeries]]          # name -> one series per replicate
    gini_last10: dict[str, np.ndarray]             # name -> (replicates,)
    supply_last10: dict[str, np.ndarray]
    gini_deltas: dict[str, IntervalEstimate]       # "sanremo-brazil" style keys


def run_cross_national(
    scenarios: list[ScenarioConfig],
    replicates: int,
    base_seed: int,
    entropy_base: str = "cum",
    jobs: int = 1,
) -> ScenarioGridResult:
    """Run the institutional presets side by side and contrast their Gini levels.

    Replicates are paired across scenarios by seed; each confirmatory contrast
    is the per-replicate difference of last10 Gini means, summarized by its
    replicate percentile interval.
    """
    if len(scenarios) < 2:
        raise ValueError("need at least 2 scenarios to contrast")
    names = tuple(c.name for c in scenarios)
    tasks = [
        (run_scenario, (config, base_seed + r), {})
        for r in range(replicates)
        for config in scenarios
    ]
    flat = _parallel(jobs, tasks)

    series: dict[str, list[MetricSeries]] = {name: [] for name in names}
    for r in range(replicates):
        for i, name in enumerate(names):
            series[name].append(flat[r * len(names) + i])

    gin_name = f"gini_{entropy_base}"
    gini_last10 = {
        name: np.array([s.last10_mean(gin_name) for s in series[name]]) for name in names
    }
    supply_last10 = {
        name: np.array([s.last10_mean("supply_spread") for s in series[name]])
        for name in names
    }
    deltas = {}
    for hi, lo in GINI_DELTA_PAIRS:
        if hi in gini_last10 and lo in gini_last10:
            deltas[f"{hi}-{lo}"] = IntervalEstimate.from_replicates(
                gini_last10[hi] - gini_last10[lo]
            )
    return ScenarioGridResult(
        scenarios=names,
        series=series,
        gini_last10=gini_last10,
        supply_last10=supply_last10,
        gini_deltas=deltas,
    )


@dataclass
class CulturalCapitalResult:
    config: ScenarioConfig
    series: list[MetricSeries]                     # one per replicate, with indiv rows
    high_mask: np.ndarray
    deltas: np.ndarray                             # (replicates,) high - low
    delta: IntervalEstimate
    high_mean_last10: np.ndarray
    low_mean_last10: np.ndarray


def run_cultural_capital(
    n_agents_cc: int,
    replicates: int,
    base_seed: int,
    params: SimParams | None = None,
    jobs: int = 1,
    high: tuple[float, float] = CC_HIGH,
    low: tuple[float, float] = CC_LOW,
) -> CulturalCapitalResult:
    """Split one high-curation population into broad- and narrow-bandwidth halves.

    The first half of the agents gets the ``high`` (mu_c, sigma_c) group means,
    the second half ``low``; the per-replicate statistic is the group
    difference of mean last10 individual exposure entropy.
    """
    config = cultural_capital_config(n_agents_cc, params)
    n = config.params.n_agents
    high_mask = np.arange(n) < n // 2
    mu_bar = np.where(high_mask, high[0], low[0])
    sigma_bar = np.where(high_mask, high[1], low[1])

    tasks = [
        (
            _simulate,
            (config, base_seed + r),
            dict(record_indiv=True, mu_c_bar_per_agent=mu_bar,
                 sigma_c_bar_per_agent=sigma_bar),
        )
        for r in range(replicates)
    ]
    flat = _parallel(jobs, tasks)
    series = [s for s, _ in flat]

    highs = np.empty(replicates)
    lows = np.empty(replicates)
    for r, s in enumerate(series):
        indiv = np.asarray(s.indiv_entropy)        # (steps, agents)
        last10 = indiv[-10:].mean(axis=0)
        highs[r] = last10[high_mask].mean()
        lows[r] = last10[~high_mask].mean()
    deltas = highs - lows
    return CulturalCapitalResult(
        config=config,
        series=series,
        high_mask=high_mask,
        deltas=deltas,
        delta=IntervalEstimate.from_replicates(deltas),
        high_mean_last10=highs,
        low_mean_last10=lows,
    )


@dataclass
class SupplyContrastResult:
    baseline: str
    supply_last10: dict[str, np.ndarray]
    deltas: dict[str, IntervalEstimate]            # "brazil-sanremo" style keys


def run_supply_contrasts(
    scenarios: list[ScenarioConfig],
    replicates: int,
    base_seed: int,
    jobs: int = 1,
    grid: ScenarioGridResult | None = None,
) -> SupplyContrastResult:
    """Contrast steady-state supply dispersion against the most convergent preset.

    Reuses an existing scenario grid when one is passed (the series are the
    same runs); otherwise runs the scenarios itself with the usual seeds.
    """
    names = [c.name for c in scenarios]
    if SUPPLY_BASELINE not in names:
        raise ValueError(f"scenario set must include {SUPPLY_BASELINE!r}")
    if grid is None:
        grid = run_cross_national(scenarios, replicates, base_seed, jobs=jobs)
    supply = grid.supply_last10
    deltas = {
        f"{name}-{SUPPLY_BASELINE}": IntervalEstimate.from_replicates(
            supply[name] - supply[SUPPLY_BASELINE]
        )
        for name in names
        if name != SUPPLY_BASELINE
    }
    return SupplyContrastResult(
        baseline=SUPPLY_BASELINE, supply_last10=supply, deltas=deltas
    )


def _note(prediction: str, est: IntervalEstimate, direction: int) -> str:
    word = "positive" if direction > 0 else "negative"
    if est.excludes_zero(direction):
        return f"{word} and interval excludes zero: supports {prediction}"
    return f"expected {word}; interval does not exclude zero"


_PRETTY = {"sanremo": "Sanremo", "brazil": "Brazil", "kpop": "K-pop", "uk": "UK"}


def _pretty(name: str) -> str:
    return _PRETTY.get(name, name)


def emit_robustness_table(
    sweep: AlphaSweepResult | None,
    grid: ScenarioGridResult | None,
    cc: CulturalCapitalResult | None,
    supply: SupplyContrastResult | None,
) -> list[RobustnessRow]:
    """Assemble the robustness rows, sorted by (prediction, measure)."""
    rows: list[RobustnessRow] = []

    def add(prediction, measure, est: IntervalEstimate, direction: int | None):
        notes = _note(prediction, est, direction) if direction is not None else ""
        rows.append(
            RobustnessRow(prediction, measure, est.estimate, est.ci_low, est.ci_high, notes)
        )

    if sweep is not None:
        add("P1", "Slope H_cons vs alpha (last10)", sweep.entropy_slope, -1)
        add("P1", "Slope Gini vs alpha (last10)", sweep.gini_slope, +1)
    if grid is not None:
        for name, values in grid.gini_last10.items():
            add(
                "P2",
                f"{_pretty(name)}: Gini (last10)",
                IntervalEstimate.from_replicates(values),
                None,
            )
        for key, est in grid.gini_deltas.items():
            hi, lo = key.split("-")
            add("P2", f"{_pretty(hi)} - {_pretty(lo)}: Δ Gini (last10)", est, +1)
    if cc is not None:
        add(
            "P3",
            "High CC - Low CC: Δ individual entropy (last10)",
            cc.delta,
            +1,
        )
    if supply is not None:
        for name, values in supply.supply_last10.items():
            add(
                "P4",
                f"{_pretty(name)}: Supply spread (last10)",
                IntervalEstimate.from_replicates(values),
                None,
            )
        for key, est in supply.deltas.items():
            hi, lo = key.split("-")
            add("P4", f"{_pretty(hi)} - {_pretty(lo)}: Δ supply spread (last10)", est, +1)

    rows.sort(key=lambda r: (r.prediction, r.measure))
    return rows


def default_scenarios(
    names: tuple[str, ...], params: SimParams | None = None
) -> list[ScenarioConfig]:
    return [preset(name, params) for name in names]
