"""Simulation parameters, institutional scenario presets, and config-file loading.

Every tunable constant of the simulator lives in one of two dataclasses:

* ``SimParams`` -- parameters shared by all scenarios (population size,
  catalogue size, horizon, utility weights, pool geometry, setup noise).
* ``ScenarioConfig`` -- the institutional knobs that differ between the four
  named market structures (number of production sources, supply-side
  conformity, curation strength alpha, population preference means).

Presets ``sanremo``, ``brazil``, ``kpop`` and ``uk`` carry the calibrated
institutional contrasts. Any parameter can be overridden from a plain-text
``key = value`` config file (see :func:`load_config_file`).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

__all__ = [
    "ConfigError",
    "SimParams",
    "ScenarioConfig",
    "PRESET_NAMES",
    "preset",
    "load_config_file",
    "scenario_from_mapping",
]


class ConfigError(ValueError):
    """Raised when a parameter set violates its constraints."""


@dataclass(frozen=True)
class SimParams:
    """Shared (non-institutional) simulation parameters.

    The ``lambda_`` attribute is spelled with a trailing underscore because
    ``lambda`` is reserved in Python; its external name (config files,
    metadata dumps) is ``lambda``.
    """

    n_agents: int = 200
    n_songs: int = 80
    n_steps: int = 60
    gamma: float = 8.0            # weight of cognitive (pragmatic+epistemic) terms
    beta: float = 0.3             # epistemic decay rate with exposure
    lambda_: float = 0.5          # familiarity attenuation of effective surprisal
    omega: float = 0.45           # social log-popularity weight
    pool_size: int = 18
    pool_shrink: float = 0.45
    songs_per_step: int = 5
    feature_dim: int = 2
    feature_bounds: tuple[float, float] = (0.0, 4.0)
    source_center_bounds: tuple[float, float] = (0.5, 3.5)
    song_noise_sd: float = 0.3
    mu_c_sd: float = 0.2
    sigma_c_sd: float = 0.15
    pref_floor: float = 0.3
    drift_rate_source: float = 0.12
    drift_rate_song: float = 0.06
    # Similarity-sampling constants for the non-popularity pool slots; the
    # mechanism needs a temperature and a discovery mass, so both are explicit,
    # overridable configuration and are reported in run metadata.
    similarity_tau: float = 1.0
    discovery_eps: float = 0.05

    def validate(self) -> None:
        for name in ("n_agents", "n_songs", "n_steps", "pool_size", "songs_per_step"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in (
            "gamma", "beta", "lambda_", "omega", "pool_shrink", "song_noise_sd",
            "mu_c_sd", "sigma_c_sd", "pref_floor", "drift_rate_source",
            "drift_rate_song", "similarity_tau", "discovery_eps",
        ):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.feature_dim != 2:
            raise ConfigError("feature_dim is fixed at 2")
        lo, hi = self.feature_bounds
        slo, shi = self.source_center_bounds
        if not (lo < hi and lo <= slo < shi <= hi):
            raise ConfigError(
                f"source_center_bounds {self.source_center_bounds} must nest inside "
                f"feature_bounds {self.feature_bounds}"
            )
        if self.songs_per_step > self.n_songs:
            raise ConfigError("songs_per_step cannot exceed n_songs")


@dataclass(frozen=True)
class ScenarioConfig:
    """One institutional structure: the Table-of-contrasts knobs plus shared params."""

    name: str
    k_sources: int
    conformity: float
    alpha: float            # effective curation strength in [0, 1]
    mu_c_bar: float         # population mean preferred surprisal
    sigma_c_bar: float      # population mean tolerance bandwidth
    params: SimParams = field(default_factory=SimParams)

    def validate(self) -> None:
        self.params.validate()
        if not 0.0 <= self.conformity <= 1.0:
            raise ConfigError(f"conformity must be in [0,1], got {self.conformity}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0,1], got {self.alpha}")
        if self.k_sources < 1:
            raise ConfigError(f"k_sources must be >= 1, got {self.k_sources}")
        if self.k_sources > self.params.n_songs:
            raise ConfigError(
                f"k_sources ({self.k_sources}) cannot exceed n_songs ({self.params.n_songs})"
            )
        if self.params.pool_shrink * self.alpha > 1.0:
            raise ConfigError("pool_shrink * alpha must not exceed 1")
        # Pool must still be large enough to select from; round half away from zero.
        length = pool_length(self.alpha, self.params)
        if length < self.params.songs_per_step:
            raise ConfigError(
                f"visibility pool of {length} songs is smaller than "
                f"songs_per_step={self.params.songs_per_step}"
            )
        if self.params.pool_size > self.params.n_songs:
            raise ConfigError("pool_size cannot exceed n_songs")


def round_half_away(x: float) -> int:
    """Round half away from zero (3.5 -> 4, -3.5 -> -4); plain round() is banker's."""
    import math

    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def pool_length(alpha: float, params: SimParams) -> int:
    """Number of visible songs for curation strength alpha.

    pool_size * (1 - pool_shrink * alpha), rounded half away from zero.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0,1], got {alpha}")
    return round_half_away(params.pool_size * (1.0 - params.pool_shrink * alpha))


# Institutional contrasts: (K sources, conformity, alpha, mu_c_bar, sigma_c_bar).
_PRESETS: dict[str, tuple[int, float, float, float, float]] = {
    "sanremo": (3, 0.90, 0.95, 1.0, 0.7),
    "brazil": (15, 0.02, 0.30, 1.2, 1.2),
    "kpop": (8, 0.10, 0.65, 1.1, 1.1),
    "uk": (12, 0.30, 0.96, 1.0, 1.0),
}

PRESET_NAMES: tuple[str, ...] = tuple(_PRESETS)


def preset(name: str, params: SimParams | None = None) -> ScenarioConfig:
    """Return a named institutional scenario with default shared parameters."""
    key = name.lower()
    if key not in _PRESETS:
        raise ConfigError(
            f"unknown scenario {name!r}; valid names: {', '.join(PRESET_NAMES)}"
        )
    k, conformity, alpha, mu_c, sigma_c = _PRESETS[key]
    config = ScenarioConfig(
        name=key,
        k_sources=k,
        conformity=conformity,
        alpha=alpha,
        mu_c_bar=mu_c,
        sigma_c_bar=sigma_c,
        params=params or SimParams(),
    )
    config.validate()
    return config


# External spelling of every overridable key -> (dataclass, attribute).
_PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SimParams)}
_SCENARIO_FIELDS = {
    f.name: f for f in dataclasses.fields(ScenarioConfig) if f.name != "params"
}
_KEY_ALIASES = {"lambda": "lambda_"}


def external_name(attr: str) -> str:
    """Attribute name -> config-file / metadata key (lambda_ -> lambda)."""
    for ext, internal in _KEY_ALIASES.items():
        if internal == attr:
            return ext
    return attr


def params_as_dict(params: SimParams) -> dict[str, Any]:
    """SimParams -> plain dict keyed by external names (JSON-friendly)."""
    out: dict[str, Any] = {}
    for f in dataclasses.fields(SimParams):
        value = getattr(params, f.name)
        if isinstance(value, tuple):
            value = list(value)
        out[external_name(f.name)] = value
    return out


def _coerce(raw: str, fld: dataclasses.Field) -> Any:
    raw = raw.strip()
    if fld.type in ("int", int):
        return int(raw)
    if fld.type in ("float", float):
        return float(raw)
    if fld.type in ("str", str):
        return raw
    if "tuple" in str(fld.type):
        parts = [float(p) for p in raw.replace("(", "").replace(")", "").split(",")]
        if len(parts) != 2:
            raise ConfigError(f"expected two comma-separated numbers, got {raw!r}")
        return (parts[0], parts[1])
    raise ConfigError(f"cannot parse value for field {fld.name}")  # pragma: no cover


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Parse a ``key = value`` per line config file.

    Blank lines and ``#`` comments are ignored. Keys must be SimParams or
    ScenarioConfig field names (with ``lambda`` spelling the familiarity
    decay). Values are coerced to the field's type. Unknown keys are an error.
    """
    text = Path(path).read_text(encoding="utf-8")
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        attr = _KEY_ALIASES.get(key, key)
        if attr in _PARAM_FIELDS:
            out[attr] = _coerce(raw, _PARAM_FIELDS[attr])
        elif attr in _SCENARIO_FIELDS:
            out[attr] = _coerce(raw, _SCENARIO_FIELDS[attr])
        else:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
    return out


def scenario_from_mapping(
    overrides: dict[str, Any], base: ScenarioConfig | None = None
) -> ScenarioConfig:
    """Build a ScenarioConfig from parsed overrides on top of ``base``.

    SimParams keys land in ``params``; scenario-level keys replace the base
    scenario's fields. ``base`` defaults to the neutral mid-range scenario
    used for parameter sweeps.
    """
    if base is None:
        base = ScenarioConfig(
            name="custom", k_sources=8, conformity=0.10, alpha=0.5,
            mu_c_bar=1.0, sigma_c_bar=1.0,
        )
    param_over = {k: v for k, v in overrides.items() if k in _PARAM_FIELDS}
    scen_over = {k: v for k, v in overrides.items() if k in _SCENARIO_FIELDS}
    config = replace(base, params=replace(base.params, **param_over), **scen_over)
    config.validate()
    return config
