"""Cache-size / base-station-density trade-off analysis under a delay constraint."""

from .coverage import (
    CoverageResult,
    RadioParams,
    beta_factor,
    coverage,
    coverage_closed_form,
    coverage_integral,
    coverage_interference_limited,
    goodput,
)
from .delay import (
    BackhaulQueue,
    DelayBreakdown,
    DelayConstraint,
    TrafficParams,
    expected_backhaul_delay,
    expected_fronthaul_delay,
    expected_total_delay,
    expected_users_per_bs,
    feasibility_check,
    lambda_lower_bound,
    mmm_waiting_time,
)
from .gp import (
    GPConstants,
    GridSpec,
    JointSolution,
    brute_force_oracle,
    constant_C,
    dual_log_derivative,
    dual_objective,
    gp_constants,
    markov_linearize,
    monotonicity_shortcut,
    optimal_cache_fixed_lambda,
    optimal_lambda_fixed_cache,
    solve_joint,
)
from .mcsim import (
    EmpiricalEstimate,
    SimConfig,
    sample_total_delay,
    simulate_backhaul_queue,
    simulate_coverage,
)
from .popularity import (
    CacheConfig,
    ZipfCatalog,
    harmonic_asymptotic,
    harmonic_exact,
    hit_probability_asymptotic,
    hit_probability_exact,
    hurwitz_zeta,
    riemann_zeta,
    zipf_pmf,
)
from .scenario import PRESETS, Scenario, load_scenario, parse_scenario

__version__ = "0.1.0"
