"""Active preference learning of constraint weights for path planning."""

from .graph import (
    Constraint,
    Edge,
    EnvironmentGraph,
    PathRecord,
    Planner,
    TaskSpec,
    enumerate_paths,
    graph_from_edges,
    path_cost,
    shortest_path,
    validate_graph,
    violation_vector,
)
from .regions import (
    EquivalenceRegion,
    Halfspace,
    RegionSet,
    classify_region,
    halfspace_from_pair,
    sample_regions,
)
from .bayes import (
    Observation,
    PosteriorState,
    best_region,
    initial_posterior,
    region_likelihood,
    total_measure_deficit,
    update_posterior,
)
from .selectors import QueryPair, merr_select, mvr_select, random_select
from .users import SimulatedUser, calibrate_beta
from .session import SessionConfig, SessionResult, init_session, run_session, step
from .scenarios import (
    GridScenarioConfig,
    PrmScenarioConfig,
    Scenario,
    build_grid_scenario,
    build_prm_scenario,
    load_scenario,
    preset_scenario,
    save_scenario,
)

__version__ = "0.1.0"
