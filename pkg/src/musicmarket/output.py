"""CSV emission and the SHA256 output manifest.

All files are UTF-8 with LF line endings and ``.`` decimals. Floats are
serialized with ``repr``, the shortest decimal representation that
round-trips, so identical results always produce identical bytes and the
manifest hashes are stable.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from . import __version__
from .experiments import (
    AlphaSweepResult,
    CulturalCapitalResult,
    RobustnessRow,
    ScenarioGridResult,
)
from .metrics import METRIC_NAMES, MetricSeries, percentile_bands
from .world import WorldState

__all__ = [
    "TIMESERIES_HEADER",
    "BANDS_HEADER",
    "ROBUSTNESS_HEADER",
    "SNAPSHOT_HEADER",
    "MANIFEST_NAME",
    "RNG_ALGORITHM",
    "write_timeseries_csv",
    "write_bands_csv",
    "write_robustness_csv",
    "write_snapshot_csv",
    "write_manifest",
    "verify_manifest",
]

TIMESERIES_HEADER = ("experiment", "scenario", "alpha", "replicate", "step", "metric", "value")
BANDS_HEADER = ("experiment", "scenario", "alpha", "step", "metric", "p05", "mean", "p50", "p95")
ROBUSTNESS_HEADER = ("prediction", "measure", "estimate", "ci_low", "ci_high", "notes")
SNAPSHOT_HEADER = ("scenario", "kind", "id", "source_id", "x", "y", "plays")
MANIFEST_NAME = "manifest.json"
RNG_ALGORITHM = "numpy.random.PCG64 (numpy.random.default_rng)"

CC_METRICS = ("indiv_entropy_mean_highcc", "indiv_entropy_mean_lowcc")


def fmt(value: Any) -> str:
    """Canonical cell text: shortest round-trip decimals, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    x = float(value)
    if np.isnan(x):
        return ""
    return repr(x)


def _write_csv(path: Path, header: Iterable[str], rows: Iterable[Iterable[Any]]) -> Path:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([fmt(v) for v in row])
    except OSError as exc:
        raise OSError(f"cannot write output file {path}: {exc}") from exc
    return path


def _series_rows(
    experiment: str,
    scenario: str,
    alpha: float,
    replicate: int,
    series: MetricSeries,
    extra: dict[str, np.ndarray] | None = None,
):
    metrics = {name: series.metric(name) for name in METRIC_NAMES}
    if extra:
        metrics.update(extra)
    for t in range(series.n_steps):
        for name, values in metrics.items():
            yield (experiment, scenario, alpha, replicate, t + 1, name, values[t])


def cc_group_means(result: CulturalCapitalResult, replicate: int) -> dict[str, np.ndarray]:
    """Per-step mean individual entropy of the two cultural-capital groups."""
    indiv = np.asarray(result.series[replicate].indiv_entropy)
    return {
        "indiv_entropy_mean_highcc": indiv[:, result.high_mask].mean(axis=1),
        "indiv_entropy_mean_lowcc": indiv[:, ~result.high_mask].mean(axis=1),
    }


def write_timeseries_csv(
    outdir: Path,
    grid: ScenarioGridResult | None,
    scenario_alphas: dict[str, float] | None,
    sweep: AlphaSweepResult | None,
    cc: CulturalCapitalResult | None,
) -> list[Path]:
    """One long-format timeseries file per experiment."""
    outdir = Path(outdir)
    paths = []
    if grid is not None:
        def rows():
            for name in grid.scenarios:
                for r, series in enumerate(grid.series[name]):
                    yield from _series_rows(
                        "scenarios", name, scenario_alphas[name], r, series
                    )
        paths.append(_write_csv(outdir / "timeseries_scenarios.csv", TIMESERIES_HEADER, rows()))
    if sweep is not None:
        def rows():
            for alpha in sweep.alphas:
                for r, series in enumerate(sweep.series[alpha]):
                    yield from _series_rows("alpha_sweep", sweep.base_name, alpha, r, series)
        paths.append(
            _write_csv(outdir / "timeseries_alpha_sweep.csv", TIMESERIES_HEADER, rows())
        )
    if cc is not None:
        def rows():
            for r, series in enumerate(cc.series):
                yield from _series_rows(
                    "cultural_capital", cc.config.name, cc.config.alpha, r, series,
                    extra=cc_group_means(cc, r),
                )
        paths.append(
            _write_csv(outdir / "timeseries_cultural_capital.csv", TIMESERIES_HEADER, rows())
        )
    return paths


def _bands_rows(experiment, scenario, alpha, series_list, metric_names):
    n_steps = series_list[0].n_steps
    for name in metric_names:
        stack = np.vstack([s.metric(name) for s in series_list])
        bands = percentile_bands(stack)
        for t in range(n_steps):
            yield (
                experiment, scenario, alpha, t + 1, name,
                bands.p05[t], bands.mean[t], bands.p50[t], bands.p95[t],
            )


def write_bands_csv(
    outdir: Path,
    grid: ScenarioGridResult | None,
    scenario_alphas: dict[str, float] | None,
    sweep: AlphaSweepResult | None,
    cc: CulturalCapitalResult | None,
) -> Path:
    """Replicate percentile bands for every experiment, one file."""

    def rows():
        if grid is not None:
            for name in grid.scenarios:
                yield from _bands_rows(
                    "scenarios", name, scenario_alphas[name], grid.series[name], METRIC_NAMES
                )
        if sweep is not None:
            for alpha in sweep.alphas:
                yield from _bands_rows(
                    "alpha_sweep", sweep.base_name, alpha, sweep.series[alpha], METRIC_NAMES
                )
        if cc is not None:
            yield from _bands_rows(
                "cultural_capital", cc.config.name, cc.config.alpha, cc.series, METRIC_NAMES
            )
            extras = [cc_group_means(cc, r) for r in range(len(cc.series))]
            n_steps = cc.series[0].n_steps
            for name in CC_METRICS:
                stack = np.vstack([e[name] for e in extras])
                bands = percentile_bands(stack)
                for t in range(n_steps):
                    yield (
                        "cultural_capital", cc.config.name, cc.config.alpha, t + 1, name,
                        bands.p05[t], bands.mean[t], bands.p50[t], bands.p95[t],
                    )

    return _write_csv(Path(outdir) / "bands.csv", BANDS_HEADER, rows())


def write_robustness_csv(rows: list[RobustnessRow], outdir: Path) -> Path:
    """Table of prediction checks; header matches the published schema exactly."""
    if not rows:
        raise ValueError("robustness table must not be empty")
    return _write_csv(
        Path(outdir) / "robustness.csv",
        ROBUSTNESS_HEADER,
        (
            (r.prediction, r.measure, r.estimate, r.ci_low, r.ci_high, r.notes)
            for r in rows
        ),
    )


def write_snapshot_csv(worlds: dict[str, WorldState], outdir: Path) -> Path:
    """Final-step world snapshot (song positions, plays, agent centers) per scenario."""

    def rows():
        for name, world in worlds.items():
            for j in range(world.n_songs):
                yield (
                    name, "song", j, int(world.song_source[j]),
                    world.song_positions[j, 0], world.song_positions[j, 1],
                    int(world.plays[j]),
                )
            for i in range(world.n_agents):
                yield (
                    name, "agent", i, None,
                    world.agent_centers[i, 0], world.agent_centers[i, 1], None,
                )

    return _write_csv(Path(outdir) / "snapshot.csv", SNAPSHOT_HEADER, rows())


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    outdir: Path,
    parameters: dict[str, Any],
    started: float,
    argv: list[str] | None = None,
) -> Path:
    """Hash every output file in ``outdir`` into ``manifest.json``.

    The manifest lists each file exactly once with its byte size and SHA256;
    it excludes itself from the list.
    """
    outdir = Path(outdir)
    files = []
    for path in sorted(outdir.rglob("*")):
        if path.is_file() and path.name != MANIFEST_NAME:
            files.append(
                {
                    "path": path.relative_to(outdir).as_posix(),
                    "bytes": path.stat().st_size,
                    "sha256": sha256_file(path),
                }
            )
    manifest = {
        "tool": "musicmarket",
        "tool_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "created_unix": time.time(),
        "duration_seconds": time.time() - started,
        "argv": argv or [],
        "parameters": parameters,
        "files": files,
    }
    path = outdir / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return path


def verify_manifest(outdir: Path) -> list[str]:
    """Re-hash outputs against the manifest; returns problem descriptions."""
    outdir = Path(outdir)
    manifest_path = outdir / MANIFEST_NAME
    if not manifest_path.is_file():
        return [f"missing manifest: {manifest_path}"]
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    problems = []
    for entry in manifest.get("files", []):
        path = outdir / entry["path"]
        if not path.is_file():
            problems.append(f"missing file: {entry['path']}")
            continue
        size = path.stat().st_size
        if size != entry["bytes"]:
            problems.append(
                f"size mismatch: {entry['path']} ({size} != {entry['bytes']})"
            )
        digest = sha256_file(path)
        if digest != entry["sha256"]:
            problems.append(f"hash mismatch: {entry['path']}")
    return problems
