"""Closed-form optimal hedging schedules under quadratic execution costs.

Both problems minimise, over absolutely continuous position paths q(t) with
q(0) = q0,

    J[q] = int_0^T [ sum_i L_i(v_i)
                     + (gamma/8)(1-rho^2) xi^2 * e(q)^2
                     + (1/2)(rho*s*xi - zeta) * e(q) ] dt,

where e(q) = w' (q + v) is the residual sqrt-variance exposure, w the
frozen stochastic-vol Vegas and v the bucket targets.  Problem 1 leaves
q(T) free; Problem 2 pins q(T) = -v.  With L_i(v) = eta_i v^2 the optimal
paths are explicit: both move along the fixed basket Lam @ w
(Lam = diag(1/eta)), with hyperbolic time profiles governed by

    lam = (gamma/8)(1-rho^2) xi^2 * w' Lam w.

Hyperbolic ratios are evaluated in exponential-scaled form so large
sqrt(lam)*T cannot overflow, and a series branch covers sqrt(lam)*T -> 0
where the view coefficient (rho*s*xi - zeta)/(2*lam) is a removable
singularity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .book import TargetVector
from .costs import CostSpec, cost
from .errors import DomainError, UnsupportedCostError
from .market import MarketView

# below this value of sqrt(lam)*T the view term switches to its series limit
SMALL_CURVATURE = 1e-4


@dataclass(frozen=True)
class HedgeInputs:
    """The complete frozen hedging problem.

    gamma: risk aversion (> 0).
    rho, xi: vol-spot correlation and vol-of-vol from the market dynamics.
    view: frozen Sharpe ratio and vol-drift gap.
    vega_sv: frozen sqrt-variance Vegas w, length N.
    target: bucket targets v (q = -v cancels the book in the market model).
    q0: initial vanilla positions, length N.
    costs: one CostSpec per option.
    horizon: hedging horizon T (> 0).
    """

    gamma: float
    rho: float
    xi: float
    view: MarketView
    vega_sv: np.ndarray
    target: TargetVector
    q0: np.ndarray
    costs: list[CostSpec]
    horizon: float

    def __post_init__(self):
        w = np.atleast_1d(np.asarray(self.vega_sv, dtype=float))
        q0 = np.atleast_1d(np.asarray(self.q0, dtype=float))
        object.__setattr__(self, "vega_sv", w)
        object.__setattr__(self, "q0", q0)
        if not self.gamma > 0.0:
            raise DomainError("risk aversion gamma must be positive")
        if not self.horizon > 0.0:
            raise DomainError("horizon must be positive")
        if not self.xi > 0.0:
            raise DomainError("vol-of-vol xi must be positive")
        if not -1.0 < self.rho < 1.0:
            raise DomainError("rho must lie strictly inside (-1, 1)")
        n = len(w)
        if len(q0) != n or len(self.target) != n or len(self.costs) != n:
            raise DomainError("vega_sv, target, q0 and costs must share one length")

    @property
    def n(self) -> int:
        return len(self.vega_sv)

    @property
    def drift_coeff(self) -> float:
        """The composite view coefficient rho * sharpe * xi - zeta."""
        return self.rho * self.view.sharpe * self.xi - self.view.zeta

    @property
    def risk_weight(self) -> float:
        """(gamma/8)(1 - rho^2) xi^2, the exposure-penalty weight in J."""
        return 0.125 * self.gamma * (1.0 - self.rho**2) * self.xi**2

    def exposure_of(self, q: np.ndarray):
        """w' (q + v) for a single position vector or an (M+1, N) grid."""
        return (np.asarray(q, dtype=float) + self.target.v) @ self.vega_sv

    def require_quadratic(self) -> np.ndarray:
        """Return eta per option, or raise when any cost is not quadratic."""
        if not all(c.is_quadratic for c in self.costs):
            raise UnsupportedCostError("closed forms require quadratic costs")
        return np.array([c.eta for c in self.costs])


@dataclass(frozen=True)
class Trajectory:
    """Sampled hedging schedule: positions and velocities on a time grid."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        q = np.asarray(self.positions, dtype=float)
        v = np.asarray(self.velocities, dtype=float)
        q = q.reshape(len(t), -1)
        v = v.reshape(len(t), -1)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", q)
        object.__setattr__(self, "velocities", v)
        if len(t) < 2 or np.any(np.diff(t) <= 0.0):
            raise DomainError("time grid must be strictly increasing with >= 2 points")
        if q.shape != v.shape:
            raise DomainError("positions and velocities must have matching shapes")

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def sample(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Linear interpolation of positions and velocities at times t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        q = np.column_stack([np.interp(t, self.times, self.positions[:, i]) for i in range(self.n)])
        v = np.column_stack([np.interp(t, self.times, self.velocities[:, i]) for i in range(self.n)])
        return q, v


def lambda_of(inputs: HedgeInputs) -> float:
    """Curvature constant lam = (gamma/8)(1-rho^2) xi^2 sum_i w_i^2 / eta_i."""
    eta = inputs.require_quadratic()
    return float(inputs.risk_weight * np.sum(inputs.vega_sv**2 / eta))


def _grid(horizon: float, m: int) -> np.ndarray:
    if m < 1:
        raise DomainError("grid size must be at least 1")
    return np.linspace(0.0, horizon, m + 1)


def _cosh_deficit(a: float, t: np.ndarray, cap: float) -> np.ndarray:
    """1 - cosh(a(T-t))/cosh(aT), overflow-free form."""
    return -np.expm1(-a * (2.0 * cap - t)) * -np.expm1(-a * t) / (1.0 + np.exp(-2.0 * a * cap))


def _cosh_deficit_dot(a: float, t: np.ndarray, cap: float) -> np.ndarray:
    """d/dt of _cosh_deficit: a * sinh(a(T-t))/cosh(aT)."""
    return a * np.exp(-a * t) * -np.expm1(-2.0 * a * (cap - t)) / (1.0 + np.exp(-2.0 * a * cap))


def _sinh_ratio(a: float, t: np.ndarray, cap: float) -> np.ndarray:
    """sinh(a(T-t))/sinh(aT) for a > 0."""
    return np.exp(-a * t) * np.expm1(-2.0 * a * (cap - t)) / np.expm1(-2.0 * a * cap)


def _round_trip_bracket(a: float, t: np.ndarray, cap: float) -> np.ndarray:
    """(sinh(at) + sinh(a(T-t)))/sinh(aT) - 1 via an exact product identity."""
    return -(-np.expm1(-a * t)) * (-np.expm1(-a * (cap - t))) / (1.0 + np.exp(-a * cap))


def _round_trip_bracket_dot(a: float, t: np.ndarray, cap: float) -> np.ndarray:
    """d/dt of _round_trip_bracket: a * sinh(a(t - T/2))/cosh(aT/2)."""
    u = a * (t - 0.5 * cap)
    mag = np.exp(np.abs(u) - 0.5 * a * cap) * -np.expm1(-2.0 * np.abs(u))
    return a * np.sign(u) * mag / (1.0 + np.exp(-a * cap))


def plan_vega_hedge(inputs: HedgeInputs, m: int = 512) -> Trajectory:
    """Problem 1: hedge in the stochastic-vol model, terminal position free.

    q*(t) = q0 - (K + c/(4 lam)) * (1 - cosh(sqrt(lam)(T-t))/cosh(sqrt(lam)T)) * Lam w
    with K = w'(v + q0) / (w' Lam w) and c the composite view coefficient.
    The view coefficient c/(4 lam) is what the Euler-Lagrange equation of
    the objective demands (2 eta qdd = 2 w_risk e w + (c/2) w); it is
    confirmed independently by the transcription oracle and the costate
    shooting solver.
    """
    eta = inputs.require_quadratic()
    times = _grid(inputs.horizon, m)
    w, q0, cap = inputs.vega_sv, inputs.q0, inputs.horizon

    if not np.any(w):
        q = np.tile(q0, (m + 1, 1))
        return Trajectory(times, q, np.zeros_like(q))

    basket = w / eta
    wlw = float(w @ basket)
    lam = inputs.risk_weight * wlw
    a = np.sqrt(lam)
    k_pos = float(w @ (inputs.target.v + q0)) / wlw
    c = inputs.drift_coeff

    deficit = _cosh_deficit(a, times, cap)
    deficit_dot = _cosh_deficit_dot(a, times, cap)
    if a * cap < SMALL_CURVATURE:
        # view coefficient c/(2 lam) times the O(lam) deficit, expanded in lam
        alpha = -k_pos * deficit - 0.25 * c * times * (2.0 * cap - times)
        alpha_dot = -k_pos * deficit_dot - 0.5 * c * (cap - times)
    else:
        coeff = k_pos + 0.5 * c / lam
        alpha = -coeff * deficit
        alpha_dot = -coeff * deficit_dot

    q = q0 + np.outer(alpha, basket)
    v = np.outer(alpha_dot, basket)
    return Trajectory(times, q, v)


def plan_bucket_cancellation(inputs: HedgeInputs, m: int = 512) -> Trajectory:
    """Problem 2: pin q(T) = -v to cancel every bucket in the market model.

    The linear unwind from q0 to -v is corrected along Lam w by a sinh
    profile (position hedging) plus a round-trip term driven by the view.
    """
    eta = inputs.require_quadratic()
    times = _grid(inputs.horizon, m)
    w, q0, cap = inputs.vega_sv, inputs.q0, inputs.horizon
    tgt = inputs.target.v

    frac = times / cap
    base = np.outer(1.0 - frac, q0) - np.outer(frac, tgt)
    base_dot = np.tile((-tgt - q0) / cap, (m + 1, 1))

    if not np.any(w):
        return Trajectory(times, base, base_dot)

    basket = w / eta
    wlw = float(w @ basket)
    lam = inputs.risk_weight * wlw
    a = np.sqrt(lam)
    k_pos = float(w @ (tgt + q0)) / wlw
    c = inputs.drift_coeff

    if a * cap < SMALL_CURVATURE:
        hold = -lam * (cap - times) * times * (2.0 * cap - times) / (6.0 * cap)
        hold_dot = -lam / (6.0 * cap) * (2.0 * cap**2 - 6.0 * cap * times + 3.0 * times**2)
        view = -0.25 * c * times * (cap - times)
        view_dot = -0.25 * c * (cap - 2.0 * times)
    else:
        hold = _sinh_ratio(a, times, cap) - (1.0 - frac)
        hold_dot = 1.0 / cap - a * np.exp(-a * times) * (
            1.0 + np.exp(-2.0 * a * (cap - times))
        ) / -np.expm1(-2.0 * a * cap)
        half = 0.5 * c / lam
        view = half * _round_trip_bracket(a, times, cap)
        view_dot = half * _round_trip_bracket_dot(a, times, cap)

    alpha = k_pos * hold + view
    alpha_dot = k_pos * hold_dot + view_dot
    q = base + np.outer(alpha, basket)
    v = base_dot + np.outer(alpha_dot, basket)
    # sinh(0) kills both corrections at t = T; pin the endpoint bitwise
    q[-1] = -tgt
    return Trajectory(times, q, v)


def objective(tr: Trajectory, inputs: HedgeInputs) -> float:
    """J[q] evaluated by composite Simpson quadrature on the trajectory grid."""
    if tr.n != inputs.n:
        raise DomainError("trajectory and inputs have different option counts")
    run_cost = np.zeros(len(tr.times))
    for i, c in enumerate(inputs.costs):
        run_cost += cost(c, tr.velocities[:, i])
    exp_grid = inputs.exposure_of(tr.positions)
    integrand = run_cost + inputs.risk_weight * exp_grid**2 + 0.5 * inputs.drift_coeff * exp_grid
    return float(simpson(integrand, x=tr.times))
