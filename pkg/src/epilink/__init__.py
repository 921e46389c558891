"""SIR epidemics on adaptive small-world networks with temporary link
deactivation.

The package pairs an exact stochastic network simulator with its
14-compartment pair-level mean-field ODE model, plus the threshold theory
and convergence diagnostics built on the two.
"""

from .analysis import (
    LimitReport,
    Region,
    ThresholdReport,
    basic_reproduction_number,
    beta_star,
    classify_region,
    p1_star,
    p2_star,
    si_initial_rate,
    threshold_report,
    verify_limits_numerically,
)
from .compartments import (
    CSV_HEADER,
    FIELDS,
    CompartmentVector,
    TimeSeries,
    average_time_series,
    pad_to_common_length,
)
from .config import ConfigError, SweepConfig, parse_config, serialize_config
from .convergence import (
    ErrorReport,
    append_error_log,
    cross_size_error,
    l2_relative_error,
    mc_self_error,
)
from .graph import (
    ContactNetwork,
    GenerationParams,
    clustering_coefficient,
    load_edge_list,
    mean_degree,
    save_edge_list,
    watts_strogatz,
)
from .meanfield import (
    IntegratorConfig,
    Trajectory,
    analytic_initial,
    empirical_initial,
    final_recovered,
    integrate,
    random_mixing_initial,
    rhs,
    triple_closure,
)
from .netsim import (
    ModelParams,
    NodeStatus,
    SimState,
    compartment_counts,
    deactivated_pairs,
    init_sim,
    monte_carlo_mean,
    replicate_rng,
    run_simulation,
    step,
)
from .rk45 import IntegrationError

__version__ = "0.1.0"
