"""Desk-scale reference implementation of the full belief-updating machinery.

The market simulator proper uses distance-based proxies; this module keeps the
exact Dirichlet-categorical model alive at toy scale, as executable
documentation and as the oracle for the listening-trajectory taxonomy.

A ``DirichletModel`` holds one concentration column per song plus a state
posterior ``q_states`` over songs. Listening to a song produces a categorical
observation; the concentration count for (category, song) increments by one,
which sharpens the song's likelihood column.

For a single-song policy, the learnable quantity an observation informs is
that song's own observation profile; its current belief is the normalized
concentration column. The epistemic value of listening is therefore the
expected KL divergence between the updated and the current column (posterior
vs prior belief), averaged over the predicted observation distribution. A
sharply learned column barely moves, so epistemic value decays toward zero
with accumulated exposure. Pragmatic value is the expected log-probability of
preferred observations, with preferences Gaussian in surprisal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DirichletModel",
    "PreferenceParams",
    "EfeBreakdown",
    "TRAJECTORY_CLASSES",
    "likelihood",
    "observe",
    "surprisal",
    "preference",
    "expected_free_energy",
    "classify_trajectory",
    "trajectory_demo_rows",
]

TRAJECTORY_CLASSES = ("inverted_u", "monotonic_decline", "never_rewarding")


@dataclass
class DirichletModel:
    """Dirichlet-categorical likelihood model plus a posterior over songs."""

    concentrations: np.ndarray  # (n_obs_categories, n_songs), all entries > 0
    q_states: np.ndarray        # (n_songs,) probability vector

    def __post_init__(self) -> None:
        self.concentrations = np.asarray(self.concentrations, dtype=float)
        self.q_states = np.asarray(self.q_states, dtype=float)
        if (self.concentrations <= 0).any():
            raise ValueError("all concentration parameters must be > 0")
        if self.q_states.shape != (self.concentrations.shape[1],):
            raise ValueError("posterior length must match the number of songs")
        if (self.q_states < 0).any() or abs(self.q_states.sum() - 1.0) > 1e-12:
            raise ValueError("posterior must be a normalized probability vector")

    @classmethod
    def uniform(
        cls,
        n_obs_categories: int,
        n_songs: int,
        prior_floor: float = 1.0,
        q_states: np.ndarray | None = None,
    ) -> "DirichletModel":
        q = np.full(n_songs, 1.0 / n_songs) if q_states is None else q_states
        return cls(np.full((n_obs_categories, n_songs), prior_floor), q)

    @property
    def n_obs_categories(self) -> int:
        return self.concentrations.shape[0]

    @property
    def n_songs(self) -> int:
        return self.concentrations.shape[1]


@dataclass(frozen=True)
class PreferenceParams:
    """Gaussian preference over surprisal: sweet spot mu_c, bandwidth sigma_c."""

    mu_c: float
    sigma_c: float

    def __post_init__(self) -> None:
        if self.sigma_c <= 0:
            raise ValueError("sigma_c must be > 0")


@dataclass(frozen=True)
class EfeBreakdown:
    """Expected free energy of a single-song policy, split into its two terms."""

    epistemic: float   # expected KL(posterior || prior), >= 0
    pragmatic: float   # expected log-probability of preferred observations
    total_G: float     # -(epistemic + pragmatic)


def likelihood(model: DirichletModel) -> np.ndarray:
    """Column-normalized concentrations: P(o = k | s = j)."""
    return model.concentrations / model.concentrations.sum(axis=0, keepdims=True)


def observe(model: DirichletModel, song_id: int, obs_category: int) -> DirichletModel:
    """Record one observation: the (category, song) concentration grows by one."""
    model.concentrations[obs_category, song_id] += 1.0
    return model


def surprisal(model: DirichletModel, obs_category: int) -> float:
    """Negative log marginal probability of a category under the current model."""
    a = likelihood(model)
    return float(-np.log(a[obs_category] @ model.q_states))


def preference(surprisal_value: float, prefs: PreferenceParams) -> float:
    """Preference value of an observation with the given surprisal; peak 0 at mu_c."""
    z = surprisal_value - prefs.mu_c
    return -(z * z) / (2.0 * prefs.sigma_c * prefs.sigma_c)


def expected_free_energy(
    model: DirichletModel, prefs: PreferenceParams, song_id: int
) -> EfeBreakdown:
    """Score the policy of listening to one song.

    Predicted observations are weighted by the marginal q(o) = sum_s A[o,s]Q(s).
    Epistemic value: expected KL between song ``song_id``'s likelihood column
    after the predicted observation and the current column. Pragmatic value:
    expected log of the preference distribution P(o) prop. exp(C(o)), where
    C is the Gaussian preference applied to each category's surprisal.
    """
    a = likelihood(model)
    q_obs = a @ model.q_states

    col = model.concentrations[:, song_id]
    total = col.sum()
    prior_pred = col / total
    epistemic = 0.0
    for k in range(model.n_obs_categories):
        post = col.copy()
        post[k] += 1.0
        post_pred = post / (total + 1.0)
        epistemic += q_obs[k] * float((post_pred * np.log(post_pred / prior_pred)).sum())

    c_values = np.array(
        [preference(float(-np.log(q_obs[k])), prefs) for k in range(model.n_obs_categories)]
    )
    log_pref = c_values - np.log(np.exp(c_values - c_values.max()).sum()) - c_values.max()
    pragmatic = float(q_obs @ log_pref)

    return EfeBreakdown(
        epistemic=epistemic, pragmatic=pragmatic, total_G=-(epistemic + pragmatic)
    )


def _single_song_model(initial_surprisal: float, n_obs_categories: int) -> DirichletModel:
    """One-song model whose designated category 0 has the requested surprisal."""
    if initial_surprisal <= 0:
        raise ValueError("initial surprisal must be > 0 for a categorical model")
    p0 = float(np.exp(-initial_surprisal))
    if p0 * n_obs_categories >= n_obs_categories:  # pragma: no cover - guarded above
        raise ValueError("surprisal too small for the category count")
    col = np.full(n_obs_categories, (n_obs_categories * (1.0 - p0)) / (n_obs_categories - 1))
    col[0] = n_obs_categories * p0
    return DirichletModel(col[:, None], np.array([1.0]))


def classify_trajectory(
    initial_surprisal: float,
    prefs: PreferenceParams,
    horizon: int,
    n_obs_categories: int = 8,
    reward_threshold: float = -2.0,
) -> str:
    """Classify the preference trajectory of repeated exposure to one song.

    Simulates ``horizon`` listens (surprisal, preference, then the Bayesian
    count update) of a single song whose first observation has the given
    surprisal, always observing the same category, and classifies the
    preference sequence:

    * ``never_rewarding`` -- preference below ``reward_threshold`` at every step;
    * ``inverted_u`` -- preference rises before it falls (surprisal starts
      above the sweet spot and decays through it; since surprisal declines
      monotonically the sequence is unimodal, so any initial rise implies the
      inverted-U shape);
    * ``monotonic_decline`` -- preference falls from the first exposure on.
    """
    if horizon < 3:
        raise ValueError("horizon must be >= 3")
    model = _single_song_model(initial_surprisal, n_obs_categories)
    values = []
    for _ in range(horizon):
        values.append(preference(surprisal(model, 0), prefs))
        observe(model, 0, 0)
    values_arr = np.asarray(values)
    if (values_arr < reward_threshold).all():
        return "never_rewarding"
    return "inverted_u" if int(values_arr.argmax()) > 0 else "monotonic_decline"


def trajectory_demo_rows(
    prefs: PreferenceParams | None = None, horizon: int = 25
) -> list[tuple[float, str, list[float]]]:
    """(initial surprisal, class, first preference values) rows for the CLI demo."""
    prefs = prefs or PreferenceParams(mu_c=1.0, sigma_c=0.4)
    rows = []
    for i0 in (2.5, 0.9, 0.12):
        model_class = classify_trajectory(i0, prefs, horizon)
        model = _single_song_model(i0, 8)
        values = []
        for _ in range(min(horizon, 6)):
            values.append(round(preference(surprisal(model, 0), prefs), 4))
            observe(model, 0, 0)
        rows.append((i0, model_class, values))
    return rows
