"""Agent-based music-market simulator.

A population of listener agents repeatedly picks songs from algorithmically
curated visibility pools; play counts feed back into curation and into
supply-side drift of the production sources. The package provides the
simulation engine, the diversity/concentration metrics, the experiment
harness behind the four headline predictions, and a CLI that emits a
reproducible CSV-plus-manifest output tree.
"""

__version__ = "0.1.0"

from .config import (  # noqa: F401
    ConfigError,
    PRESET_NAMES,
    ScenarioConfig,
    SimParams,
    load_config_file,
    pool_length,
    preset,
)
from .world import ListenerAgent, Song, Source, WorldState, init_world  # noqa: F401
from .dynamics import (  # noqa: F401
    StepResult,
    UtilityBreakdown,
    VisibilityPool,
    apply_selections,
    build_pool,
    effective_surprisal,
    epistemic_value,
    pragmatic_value,
    select_songs,
    songwriter_drift,
    step,
    utility,
)
from .metrics import (  # noqa: F401
    BandSummary,
    MetricSeries,
    gini,
    individual_entropy,
    mean_epistemic,
    ols_slope,
    percentile_bands,
    shannon_entropy,
    supply_spread,
)
from .experiments import (  # noqa: F401
    ExperimentPlan,
    IntervalEstimate,
    RobustnessRow,
    emit_robustness_table,
    run_alpha_sweep,
    run_cross_national,
    run_cultural_capital,
    run_scenario,
    run_supply_contrasts,
)
