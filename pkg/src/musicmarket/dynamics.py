"""Per-step market dynamics.

Each step runs, in order: visibility-pool construction per agent, composite
utility evaluation, softmax selection of ``songs_per_step`` distinct songs per
agent, exposure/play-count updates, then a single supply-side drift pass.

Pools and utilities are evaluated against the play counts as of the start of
the step (a snapshot), so results do not depend on the order agents are
processed within a step. Sampling without replacement (both the similarity
slots of the pool and the song selection itself) is implemented as
Gumbel-top-k over log-weights, which draws from exactly the successive
renormalized softmax law.

Per-step RNG draw order: popularity tie-break permutation (if any popularity
slots), similarity-slot Gumbel noise (if any similarity slots), selection
Gumbel noise, then one drift uniform per source in source-id order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig, SimParams, pool_length, round_half_away
from .world import ListenerAgent, Song, WorldState

__all__ = [
    "VisibilityPool",
    "UtilityBreakdown",
    "StepResult",
    "pool_length",
    "popularity_order",
    "build_pool",
    "effective_surprisal",
    "pragmatic_value",
    "epistemic_value",
    "utility",
    "select_songs",
    "apply_selections",
    "songwriter_drift",
    "step",
]


@dataclass(frozen=True)
class VisibilityPool:
    """The songs one agent can choose from this step."""

    agent_id: int
    song_ids: np.ndarray  # (L,) int, duplicate-free
    n_popular_slots: int
    n_similarity_slots: int


@dataclass(frozen=True)
class UtilityBreakdown:
    """One agent-song utility evaluation, split into its terms."""

    pragmatic: float
    epistemic: float
    social: float
    total: float
    effective_surprisal: float


@dataclass(frozen=True)
class StepResult:
    """Selections made during one step: row i holds agent i's chosen song ids."""

    selections: np.ndarray  # (N, songs_per_step) int


def _gumbel_topk(keys: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Indices of the top-k of ``keys + Gumbel noise`` (Plackett-Luce sample).

    Sampling k items without replacement with probability proportional to
    exp(keys), successively renormalized, is distributionally identical to
    taking the k largest of keys + iid Gumbel(0,1).
    """
    noisy = keys + rng.gumbel(size=keys.shape)
    if k >= keys.shape[-1]:
        return np.argsort(-noisy, axis=-1)
    part = np.argpartition(-noisy, k, axis=-1)
    return np.take(part, np.arange(k), axis=-1)


def popularity_order(plays: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Song ids sorted by cumulative plays, descending, ties uniformly shuffled.

    A fresh permutation breaks ties so the all-zero counts at t=0 do not
    privilege low song ids.
    """
    perm = rng.permutation(plays.shape[0])
    order = np.argsort(-plays[perm], kind="stable")
    return perm[order]


def _similarity_log_weights(
    distances: np.ndarray, params: SimParams
) -> np.ndarray:
    """Log of the mixture weight for similarity-slot sampling.

    Weight = (1-eps) * exp(-d/tau)/Z + eps/n over the candidate set: mostly
    feature-space proximity, with a uniform discovery mass keeping every
    song reachable.
    """
    eps, tau = params.discovery_eps, params.similarity_tau
    kernel = np.exp(-distances / tau)
    z = kernel.sum(axis=-1, keepdims=True)
    w = (1.0 - eps) * kernel / z + eps / distances.shape[-1]
    return np.log(w)


def build_pool(
    agent: ListenerAgent | int,
    world: WorldState,
    config: ScenarioConfig,
    rng: np.random.Generator,
    popular_ids: np.ndarray | None = None,
) -> VisibilityPool:
    """Construct one agent's visibility pool.

    ``round(alpha * L)`` slots come from the popularity ranking (shared across
    agents within a step -- pass ``popular_ids`` to reuse one ranking); the
    remaining slots are sampled without replacement from the other songs with
    similarity-plus-discovery weights.
    """
    agent_id = agent if isinstance(agent, (int, np.integer)) else agent.id
    p = config.params
    length = pool_length(config.alpha, p)
    n_pop = round_half_away(config.alpha * length)
    n_sim = length - n_pop

    if popular_ids is None and n_pop > 0:
        popular_ids = popularity_order(world.plays, rng)[:n_pop]
    popular = popular_ids[:n_pop] if n_pop > 0 else np.empty(0, dtype=np.int64)

    if n_sim > 0:
        mask = np.ones(world.n_songs, dtype=bool)
        mask[popular] = False
        candidates = np.nonzero(mask)[0]
        d = np.linalg.norm(
            world.song_positions[candidates] - world.agent_centers[agent_id], axis=1
        )
        picked = _gumbel_topk(_similarity_log_weights(d, p), n_sim, rng)
        similar = candidates[picked]
    else:
        similar = np.empty(0, dtype=np.int64)

    return VisibilityPool(
        agent_id=int(agent_id),
        song_ids=np.concatenate([popular, similar]).astype(np.int64),
        n_popular_slots=int(n_pop),
        n_similarity_slots=int(n_sim),
    )


def effective_surprisal(
    agent: ListenerAgent, song: Song, exposure_count: int, params: SimParams
) -> float:
    """Feature distance attenuated by familiarity: ||x_i - s_j|| / (1 + lambda*e)."""
    d = float(np.linalg.norm(agent.model_center - song.position))
    return d / (1.0 + params.lambda_ * exposure_count)


def pragmatic_value(eff_surprisal: float, agent: ListenerAgent) -> float:
    """Gaussian preference: 0 at the agent's sweet spot, negative elsewhere."""
    z = eff_surprisal - agent.mu_c
    return -(z * z) / (2.0 * agent.sigma_c * agent.sigma_c)


def epistemic_value(exposure_count: int, params: SimParams) -> float:
    """Information-gain proxy 1 / (1 + beta*e): 1 for a novel song, decaying to 0."""
    return 1.0 / (1.0 + params.beta * exposure_count)


def utility(
    agent: ListenerAgent, song: Song, world: WorldState, params: SimParams
) -> UtilityBreakdown:
    """Composite utility gamma*(pragmatic + epistemic) + omega*ln(1 + plays)."""
    e = int(world.exposure[agent.id, song.id])
    surprisal = effective_surprisal(agent, song, e, params)
    pragmatic = pragmatic_value(surprisal, agent)
    epistemic = epistemic_value(e, params)
    social = params.omega * np.log1p(world.plays[song.id])
    total = params.gamma * (pragmatic + epistemic) + social
    return UtilityBreakdown(
        pragmatic=pragmatic,
        epistemic=epistemic,
        social=float(social),
        total=float(total),
        effective_surprisal=surprisal,
    )


def select_songs(
    agent: ListenerAgent,
    pool: VisibilityPool,
    world: WorldState,
    params: SimParams,
    rng: np.random.Generator,
) -> np.ndarray:
    """Draw ``songs_per_step`` distinct songs from the pool, Pr(j) prop. exp(U)."""
    utilities = np.array(
        [utility(agent, world.song(int(j)), world, params).total for j in pool.song_ids]
    )
    picked = _gumbel_topk(utilities, params.songs_per_step, rng)
    return pool.song_ids[picked]


def apply_selections(world: WorldState, agent_id: int, selected: np.ndarray) -> None:
    """Increment exposure, cumulative plays and step plays for the chosen songs."""
    world.exposure[agent_id, selected] += 1
    world.plays[selected] += 1
    world.step_plays[selected] += 1


def songwriter_drift(
    world: WorldState, config: ScenarioConfig, rng: np.random.Generator
) -> None:
    """Pull sources (and their songs, at half the rate) toward the play-weighted centroid.

    Each source independently fires with probability ``conformity``. Skipped
    while total plays are zero (centroid undefined). One uniform is drawn per
    source in id order whether or not it fires, keeping the stream aligned.
    """
    total = world.plays.sum()
    if total == 0:
        return
    p = config.params
    weights = world.plays / total
    centroid = weights @ world.song_positions
    fires = rng.random(world.n_sources) < config.conformity
    for k in np.nonzero(fires)[0]:
        world.source_centers[k] += p.drift_rate_source * (
            centroid - world.source_centers[k]
        )
        songs = world.song_source == k
        world.song_positions[songs] += p.drift_rate_song * (
            centroid - world.song_positions[songs]
        )
    # Convex combinations of in-bounds points stay in bounds; no re-clipping needed.


def step(
    world: WorldState, config: ScenarioConfig, rng: np.random.Generator
) -> StepResult:
    """Advance the world by one step; returns each agent's selections.

    Equivalent to running build_pool / utility / select_songs / apply_selections
    per agent in id order against the start-of-step play counts, then one drift
    pass; the heavy parts are evaluated as whole-population arrays.
    """
    p = config.params
    n, m = world.n_agents, world.n_songs
    world.step_plays[:] = 0
    plays0 = world.plays.copy()

    length = pool_length(config.alpha, p)
    n_pop = round_half_away(config.alpha * length)
    n_sim = length - n_pop

    pools = np.empty((n, length), dtype=np.int64)
    if n_pop > 0:
        popular = popularity_order(plays0, rng)[:n_pop]
        pools[:, :n_pop] = popular
    else:
        popular = np.empty(0, dtype=np.int64)
    if n_sim > 0:
        mask = np.ones(m, dtype=bool)
        mask[popular] = False
        candidates = np.nonzero(mask)[0]
        # (N, n_candidates) distances from every agent to every candidate song.
        diff = world.agent_centers[:, None, :] - world.song_positions[candidates][None, :, :]
        d = np.linalg.norm(diff, axis=2)
        picked = _gumbel_topk(_similarity_log_weights(d, p), n_sim, rng)
        pools[:, n_pop:] = candidates[picked]

    rows = np.arange(n)[:, None]
    pool_pos = world.song_positions[pools]                     # (N, L, 2)
    dist = np.linalg.norm(pool_pos - world.agent_centers[:, None, :], axis=2)
    e = world.exposure[rows, pools]
    surprisal = dist / (1.0 + p.lambda_ * e)
    z = surprisal - world.mu_c[:, None]
    pragmatic = -(z * z) / (2.0 * world.sigma_c[:, None] ** 2)
    epistemic = 1.0 / (1.0 + p.beta * e)
    social = p.omega * np.log1p(plays0[pools])
    total = p.gamma * (pragmatic + epistemic) + social

    picked = _gumbel_topk(total, p.songs_per_step, rng)
    selections = np.take_along_axis(pools, picked, axis=1)

    np.add.at(world.exposure, (rows, selections), 1)
    counts = np.bincount(selections.ravel(), minlength=m)
    world.plays += counts
    world.step_plays += counts

    songwriter_drift(world, config, rng)
    world.t += 1
    return StepResult(selections=selections)
