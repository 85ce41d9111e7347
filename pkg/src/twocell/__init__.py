"""Two-cell uplink OFDMA sum-rate toolkit.

Hungarian sub-channel assignment on log-ratio cost matrices, closed-form
per-pair power control with feasibility geometry, and a reproducible
Monte-Carlo sweep harness with brute-force oracles for verification.
"""

from .assign import (
    Assignment,
    CostMatrix,
    assign_exhaustive,
    assign_hungarian,
    assign_random,
    build_cost_matrix,
    hungarian_max,
)
from .harness import (
    MethodId,
    SweepResult,
    SweepRow,
    TrialResult,
    cli_main,
    emit_csv,
    feasibility_curve,
    oracle_check,
    p_max_for_snr,
    run_trial,
    sweep,
)
from .power import (
    DerivedCoefficients,
    JunctionPoint,
    PairAllocation,
    QuadraticRoots,
    check_feasible,
    derived_coefficients,
    full_power_pair,
    grid_feasible,
    grid_oracle_pair,
    optimize_pair,
    stationary_points_p1,
)
from .ratemath import (
    RatePair,
    approx_pair_sum_rate,
    approx_user_rate,
    network_sum_rate,
    pair_rates,
    user_rate,
)
from .scenario import (
    ChannelRealization,
    ConfigError,
    PairGains,
    ScenarioConfig,
    db_to_linear,
    generate_realization,
    load_config,
    pair_gains,
    pair_gains_for_users,
    path_loss,
    trial_rng,
    validate_config,
)

__version__ = "0.1.0"
