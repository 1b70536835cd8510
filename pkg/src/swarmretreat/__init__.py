"""Swarm density regulation: encounter models, per-robot CTMC, sliding-window
density estimation, the voluntary-retreat controller, and a 2D simulator that
validates all of them."""

from .controller import (
    Action,
    ControllerConfig,
    RetreatDecision,
    decide,
    ensemble_step,
    epsilon,
    retreat_probability,
    simulate_ensemble,
    verify_feedback_linearization,
)
from .ctmc import (
    SEARCH,
    SEARCH_BLOCKED,
    TRANSPORT,
    TRANSPORT_BLOCKED,
    CtmcConfig,
    CtmcSolution,
    GeneratorMatrix,
    build_generator,
    closed_form_optimal_density,
    closed_form_steady_state,
    cycle_time_constant,
    monte_carlo_occupancy,
    objective,
    optimal_density,
    steady_state,
    swarm_throughput,
    throughput_asymptote,
)
from .errors import (
    InvalidInputError,
    NotReadyError,
    NumericalFailureError,
    UnboundedObjectiveError,
)
from .estimator import DensityEstimate, EncounterWindow, mle_density
from .grid import UniformGrid2D
from .rates import (
    Rates,
    SwarmParams,
    encounter_rate,
    fit_exponential_rate,
    all_rates,
    exponential_ks_distance,
    relative_speed,
    sample_exponential,
    sweep_coefficient,
    task_rates,
)
from .simulator import (
    DROPOFF,
    ENCOUNTER_END,
    ENCOUNTER_START,
    ENTRY,
    PICKUP,
    RETREAT,
    SimConfig,
    SimEvent,
    SimResult,
    World,
    brute_force_neighbors,
    init_world,
    neighbor_query,
    run,
    step,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
