"""Optimal Vega-hedging schedules for an exotic book under execution costs.

Library layout:

* ``market``      stochastic-vol dynamics, frozen view, path simulation
* ``pricing``     Black-Scholes / Heston vanilla pricing and frozen Vegas
* ``book``        bucket targets and Vega exposure of holdings
* ``costs``       execution-cost families and convex conjugates
* ``closed_form`` quadratic-cost optimal schedules in closed form
* ``bvp``         Hamiltonian shooting solver and transcription oracle
* ``pnl``         frozen-Greeks Monte-Carlo PnL and paired comparisons
* ``cli``         ``hedger`` command-line interface
"""

from .book import ExoticBook, TargetVector, exposure, target_ratios
from .bvp import (
    BvpProblem,
    FREE_TERMINAL,
    PINNED_TERMINAL,
    ResidualReport,
    el_residual,
    solve_hamiltonian_bvp,
    transcription_oracle,
)
from .closed_form import (
    HedgeInputs,
    Trajectory,
    lambda_of,
    objective,
    plan_bucket_cancellation,
    plan_vega_hedge,
)
from .config import RunConfig, RunSettings, load_config, parse_config
from .costs import CostSpec, cost, hamiltonian, hamiltonian_prime, marginal_cost
from .errors import ConfigError, DomainError, NumericsError, UnsupportedCostError
from .market import (
    MarketView,
    PathSet,
    SpotState,
    SvParams,
    ValidationReport,
    frozen_view,
    simulate_paths,
    validate_params,
)
from .pnl import (
    ComparisonReport,
    ObjectiveEstimate,
    OPTIMAL_U,
    PnLSampleSet,
    StockOverlay,
    ZERO_U,
    compare_strategies,
    estimate_objective,
    optimal_stock_loading,
    simulate_pnl,
    stock_overlay,
)
from .pricing import (
    VanillaOption,
    VegaProfile,
    bs_price,
    bs_vega,
    heston_price,
    implied_vol,
    vega_profile,
)
from .reports import read_trajectory_csv, write_trajectory_csv

__all__ = [
    "BvpProblem",
    "ComparisonReport",
    "ConfigError",
    "CostSpec",
    "DomainError",
    "ExoticBook",
    "FREE_TERMINAL",
    "HedgeInputs",
    "MarketView",
    "NumericsError",
    "OPTIMAL_U",
    "ObjectiveEstimate",
    "PINNED_TERMINAL",
    "PathSet",
    "PnLSampleSet",
    "ResidualReport",
    "RunConfig",
    "RunSettings",
    "SpotState",
    "StockOverlay",
    "SvParams",
    "TargetVector",
    "Trajectory",
    "UnsupportedCostError",
    "ValidationReport",
    "VanillaOption",
    "VegaProfile",
    "ZERO_U",
    "bs_price",
    "bs_vega",
    "compare_strategies",
    "cost",
    "el_residual",
    "estimate_objective",
    "exposure",
    "frozen_view",
    "hamiltonian",
    "hamiltonian_prime",
    "heston_price",
    "implied_vol",
    "lambda_of",
    "load_config",
    "marginal_cost",
    "objective",
    "optimal_stock_loading",
    "parse_config",
    "plan_bucket_cancellation",
    "plan_vega_hedge",
    "read_trajectory_csv",
    "simulate_paths",
    "simulate_pnl",
    "solve_hamiltonian_bvp",
    "stock_overlay",
    "target_ratios",
    "transcription_oracle",
    "validate_params",
    "vega_profile",
    "write_trajectory_csv",
]

__version__ = "0.1.0"
