import numpy as np
import pytest

from musicmarket.config import ScenarioConfig, SimParams


@pytest.fixture
def tiny_params() -> SimParams:
    """Small world for fast structural tests."""
    return SimParams(n_agents=20, n_songs=16, n_steps=6, pool_size=8, songs_per_step=3)


@pytest.fixture
def tiny_config(tiny_params) -> ScenarioConfig:
    return ScenarioConfig(
        name="tiny", k_sources=4, conformity=0.3, alpha=0.5,
        mu_c_bar=1.0, sigma_c_bar=1.0, params=tiny_params,
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
