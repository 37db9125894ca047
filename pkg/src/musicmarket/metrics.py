"""Ecosystem metrics: diversity, concentration, information gain, supply spread.

All operations are pure functions over arrays. Entropies are in nats. The
step-based variants are computed from the plays of a single step, the
cumulative variants from all plays so far; both are recorded because the two
bases answer different questions about concentration.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .config import SimParams
from .world import Source, WorldState

__all__ = [
    "MetricSeries",
    "BandSummary",
    "METRIC_NAMES",
    "shannon_entropy",
    "gini",
    "supply_spread",
    "mean_epistemic",
    "individual_entropy",
    "individual_entropies",
    "ols_slope",
    "percentile_bands",
]

# Fixed vocabulary used in CSV headers and band files.
METRIC_NAMES = (
    "entropy_step",
    "entropy_cum",
    "gini_step",
    "gini_cum",
    "epistemic_mean",
    "supply_spread",
)


def shannon_entropy(counts: np.ndarray) -> float:
    """Shannon entropy (nats) of the distribution implied by nonnegative counts.

    An all-zero vector is a degenerate window; it yields 0 with a warning.
    """
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        warnings.warn("entropy of an all-zero count vector; returning 0", RuntimeWarning)
        return 0.0
    p = counts / total
    p = p[p > 0]  # mask after normalizing: tiny counts can underflow to 0 here
    return float(-(p * np.log(p)).sum())


def gini(counts: np.ndarray) -> float:
    """Gini coefficient: mean absolute difference over twice the mean.

    0 for perfect equality (including the all-zero convention, warned), at
    most (n-1)/n for full concentration.
    """
    x = np.sort(np.asarray(counts, dtype=float))
    n = x.shape[0]
    total = x.sum()
    if total <= 0:
        warnings.warn("gini of an all-zero count vector; returning 0", RuntimeWarning)
        return 0.0
    ranks = 2.0 * np.arange(1, n + 1) - n - 1
    return float((ranks * x).sum() / (n * total))


def supply_spread(sources: list[Source] | np.ndarray) -> float:
    """Mean pairwise Euclidean distance between source centers.

    Needs at least two sources; otherwise the statistic is undefined and NaN
    is returned so downstream tables can report it as missing.
    """
    if isinstance(sources, (list, tuple)) and sources and isinstance(sources[0], Source):
        centers = np.asarray([s.center for s in sources])
    else:
        centers = np.asarray(sources, dtype=float)
    k = centers.shape[0]
    if k < 2:
        return float("nan")
    diff = centers[:, None, :] - centers[None, :, :]
    d = np.linalg.norm(diff, axis=2)
    iu = np.triu_indices(k, 1)
    return float(d[iu].mean())


def mean_epistemic(
    exposure: np.ndarray, selections: np.ndarray, params: SimParams
) -> float:
    """Mean information-gain value over the (agent, selected song) pairs of a step.

    ``exposure`` must be the counts the utilities were evaluated against, i.e.
    the matrix as of the start of the step, before the selections were applied.
    """
    rows = np.arange(selections.shape[0])[:, None]
    e = exposure[rows, selections]
    return float((1.0 / (1.0 + params.beta * e)).mean())


def individual_entropy(exposure_row: np.ndarray) -> float:
    """Shannon entropy of one agent's cumulative exposure distribution."""
    return shannon_entropy(exposure_row)


def individual_entropies(exposure: np.ndarray) -> np.ndarray:
    """Row-wise exposure entropies for the whole population (zero rows -> 0)."""
    counts = np.asarray(exposure, dtype=float)
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 0.0)
        terms = np.where(p > 0, p * np.log(p), 0.0)
    return -terms.sum(axis=1)


def ols_slope(xs: np.ndarray, ys: np.ndarray) -> float:
    """Least-squares slope of ys on xs; NaN when xs are degenerate."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape[0] < 2:
        return float("nan")
    dx = xs - xs.mean()
    denom = (dx * dx).sum()
    if denom == 0.0:
        return float("nan")
    return float((dx * (ys - ys.mean())).sum() / denom)


@dataclass(frozen=True)
class BandSummary:
    """Per-step percentile summary of one metric across replicates."""

    p05: np.ndarray
    p50: np.ndarray
    mean: np.ndarray
    p95: np.ndarray


def percentile_bands(samples: np.ndarray) -> BandSummary:
    """5th/50th/95th percentiles (linear interpolation between ranks) plus mean.

    ``samples`` has one row per replicate; percentiles are taken across rows.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    if samples.shape[0] < 2:
        raise ValueError("percentile bands need at least 2 replicates")
    p05, p50, p95 = np.percentile(samples, [5.0, 50.0, 95.0], axis=0)
    return BandSummary(p05=p05, p50=p50, mean=samples.mean(axis=0), p95=p95)


@dataclass
class MetricSeries:
    """Per-step time series of the ecosystem metrics for one simulation run.

    ``indiv_entropy`` holds the per-agent exposure entropy at every recorded
    step (shape: steps x agents).
    """

    entropy_step: list[float] = field(default_factory=list)
    entropy_cum: list[float] = field(default_factory=list)
    gini_step: list[float] = field(default_factory=list)
    gini_cum: list[float] = field(default_factory=list)
    epistemic_mean: list[float] = field(default_factory=list)
    supply_spread: list[float] = field(default_factory=list)
    indiv_entropy: list[np.ndarray] = field(default_factory=list)

    def record_step(
        self,
        world: WorldState,
        selections: np.ndarray,
        exposure_before: np.ndarray,
        params: SimParams,
    ) -> None:
        self.entropy_step.append(shannon_entropy(world.step_plays))
        self.entropy_cum.append(shannon_entropy(world.plays))
        self.gini_step.append(gini(world.step_plays))
        self.gini_cum.append(gini(world.plays))
        self.epistemic_mean.append(mean_epistemic(exposure_before, selections, params))
        self.supply_spread.append(supply_spread(world.source_centers))
        self.indiv_entropy.append(individual_entropies(world.exposure))

    def metric(self, name: str) -> np.ndarray:
        if name not in METRIC_NAMES:
            raise KeyError(f"unknown metric {name!r}; expected one of {METRIC_NAMES}")
        return np.asarray(getattr(self, name), dtype=float)

    @property
    def n_steps(self) -> int:
        return len(self.entropy_cum)

    def last10_mean(self, name: str) -> float:
        """Mean of a metric over the final 10 recorded steps (steady-state window)."""
        series = self.metric(name)
        return float(series[-10:].mean())
