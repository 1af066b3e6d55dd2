"""Island-model evolutionary TSP solver with diversity-gated migration."""

from .diversity import (
    DiversityParams,
    DiversityReport,
    accept_migrants,
    subpop_diversity,
    success_probability,
    tour_difference,
)
from .ea import (
    RateSchedule,
    VelocityState,
    current_rates,
    evolutionary_velocity,
    evolve_generation,
    inver_over_step,
    mapping_operator,
)
from .islands import (
    CostModelInputs,
    Island,
    MigrationPolicy,
    RunResult,
    migration_round,
    overhead_model,
    replace_with_immigrants,
    ring_target,
    run_dea,
    select_emigrants,
)
from .solver import DistributedEvolution
from .stats import WelchResult, difficulty, welch_t_test
from .tour import Tour, cycle_length, random_tour
from .tsplib import (
    TspInstance,
    TsplibParseError,
    edge_weight,
    known_optimum,
    parse_file,
    parse_instance,
    register_optimum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "TspInstance", "TsplibParseError", "parse_instance", "parse_file",
    "edge_weight", "known_optimum", "register_optimum",
    "Tour", "cycle_length", "random_tour",
    "RateSchedule", "VelocityState", "current_rates", "evolutionary_velocity",
    "inver_over_step", "mapping_operator", "evolve_generation",
    "DiversityParams", "DiversityReport", "tour_difference",
    "subpop_diversity", "success_probability", "accept_migrants",
    "MigrationPolicy", "Island", "RunResult", "ring_target",
    "select_emigrants", "replace_with_immigrants", "migration_round",
    "run_dea", "CostModelInputs", "overhead_model",
    "DistributedEvolution",
    "welch_t_test", "WelchResult", "difficulty",
]
