"""World state and seeded initialization.

The mutable simulation state is stored as flat numpy arrays on ``WorldState``
(positions, exposure counts, play counts); ``Song``/``Source``/``ListenerAgent``
are lightweight views over those arrays for code that wants one entity at a
time.

Initialization draw order is fixed so that a (config, seed) pair always yields
the same world: source centers (K x 2 uniforms), song offsets (M x 2
gaussians), agent centers (N x 2 uniforms), then the mu_c vector and the
sigma_c vector (N normals each). Clipping is truncation to the bound, never
re-sampling, so the number of draws is constant.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ConfigError, ScenarioConfig

__all__ = ["Song", "Source", "ListenerAgent", "WorldState", "init_world"]


@dataclass(frozen=True)
class Song:
    id: int
    source_id: int
    position: np.ndarray  # shape (2,)


@dataclass(frozen=True)
class Source:
    id: int
    center: np.ndarray  # shape (2,)


@dataclass(frozen=True)
class ListenerAgent:
    id: int
    model_center: np.ndarray  # shape (2,)
    mu_c: float
    sigma_c: float


@dataclass
class WorldState:
    """Full mutable state of one simulated market."""

    t: int
    song_positions: np.ndarray    # (M, 2) float
    song_source: np.ndarray       # (M,) int, source id per song
    source_centers: np.ndarray    # (K, 2) float
    agent_centers: np.ndarray     # (N, 2) float
    mu_c: np.ndarray              # (N,) float
    sigma_c: np.ndarray           # (N,) float
    exposure: np.ndarray          # (N, M) int64 cumulative per-agent play counts
    plays: np.ndarray             # (M,) int64 cumulative play counts
    step_plays: np.ndarray        # (M,) int64 play counts of the current step only

    @property
    def n_agents(self) -> int:
        return self.agent_centers.shape[0]

    @property
    def n_songs(self) -> int:
        return self.song_positions.shape[0]

    @property
    def n_sources(self) -> int:
        return self.source_centers.shape[0]

    def song(self, j: int) -> Song:
        return Song(j, int(self.song_source[j]), self.song_positions[j])

    def source(self, k: int) -> Source:
        return Source(k, self.source_centers[k])

    def agent(self, i: int) -> ListenerAgent:
        return ListenerAgent(
            i, self.agent_centers[i], float(self.mu_c[i]), float(self.sigma_c[i])
        )

    def songs(self) -> list[Song]:
        return [self.song(j) for j in range(self.n_songs)]

    def sources(self) -> list[Source]:
        return [self.source(k) for k in range(self.n_sources)]

    def agents(self) -> list[ListenerAgent]:
        return [self.agent(i) for i in range(self.n_agents)]

    def copy(self) -> "WorldState":
        return WorldState(
            t=self.t,
            song_positions=self.song_positions.copy(),
            song_source=self.song_source.copy(),
            source_centers=self.source_centers.copy(),
            agent_centers=self.agent_centers.copy(),
            mu_c=self.mu_c.copy(),
            sigma_c=self.sigma_c.copy(),
            exposure=self.exposure.copy(),
            plays=self.plays.copy(),
            step_plays=self.step_plays.copy(),
        )

    def check_invariants(self, config: ScenarioConfig) -> None:
        """Raise AssertionError if a state invariant is violated (test helper)."""
        p = config.params
        assert (self.exposure >= 0).all() and (self.plays >= 0).all()
        assert (self.step_plays >= 0).all()
        assert self.exposure.sum() == self.plays.sum()
        per_step = p.songs_per_step * p.n_agents
        assert self.plays.sum() == self.t * per_step, (
            f"plays total {self.plays.sum()} != t*songs_per_step*n_agents "
            f"{self.t * per_step}"
        )
        if self.t > 0:
            assert self.step_plays.sum() == per_step
        lo, hi = p.feature_bounds
        assert (self.song_positions >= lo).all() and (self.song_positions <= hi).all()
        assert (self.mu_c >= p.pref_floor).all() and (self.sigma_c >= p.pref_floor).all()


def init_world(
    config: ScenarioConfig,
    rng: np.random.Generator,
    mu_c_bar_per_agent: np.ndarray | None = None,
    sigma_c_bar_per_agent: np.ndarray | None = None,
) -> WorldState:
    """Create the t=0 world for a scenario.

    Source centers are uniform in the source box; song j belongs to source
    ``j mod K`` and sits at its source's center plus per-dimension gaussian
    noise, clipped to the feature bounds; agent model centers are uniform in
    the source box; preference parameters are normal around the scenario means
    and clipped below at the preference floor.

    ``mu_c_bar_per_agent`` / ``sigma_c_bar_per_agent`` optionally replace the
    scalar scenario means with per-agent means (used by the cultural-capital
    experiment to split the population into groups); the per-agent noise and
    clipping are unchanged.
    """
    config.validate()
    p = config.params
    k, m, n = config.k_sources, p.n_songs, p.n_agents
    lo, hi = p.feature_bounds
    slo, shi = p.source_center_bounds

    source_centers = rng.uniform(slo, shi, size=(k, 2))
    song_source = np.arange(m, dtype=np.int64) % k
    noise = rng.normal(0.0, p.song_noise_sd, size=(m, 2))
    song_positions = np.clip(source_centers[song_source] + noise, lo, hi)

    agent_centers = rng.uniform(slo, shi, size=(n, 2))

    mu_bar = np.full(n, config.mu_c_bar) if mu_c_bar_per_agent is None else np.asarray(
        mu_c_bar_per_agent, dtype=float
    )
    sigma_bar = (
        np.full(n, config.sigma_c_bar)
        if sigma_c_bar_per_agent is None
        else np.asarray(sigma_c_bar_per_agent, dtype=float)
    )
    if mu_bar.shape != (n,) or sigma_bar.shape != (n,):
        raise ConfigError("per-agent preference means must have shape (n_agents,)")
    mu_c = np.maximum(rng.normal(mu_bar, p.mu_c_sd), p.pref_floor)
    sigma_c = np.maximum(rng.normal(sigma_bar, p.sigma_c_sd), p.pref_floor)

    return WorldState(
        t=0,
        song_positions=song_positions,
        song_source=song_source,
        source_centers=source_centers,
        agent_centers=agent_centers,
        mu_c=mu_c,
        sigma_c=sigma_c,
        exposure=np.zeros((n, m), dtype=np.int64),
        plays=np.zeros(m, dtype=np.int64),
        step_plays=np.zeros(m, dtype=np.int64),
    )
