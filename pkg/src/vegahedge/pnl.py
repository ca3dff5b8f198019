"""Monte-Carlo PnL of a hedging schedule under the frozen-Greeks dynamics.

With every Greek frozen, the PnL of a deterministic schedule q(t) reduces to

    dPnL = u (s dt + dW^S) + (1/2) e(q_t) (zeta dt + xi dW^nu) - sum_i L_i(v_i) dt

with corr(dW^S, dW^nu) = rho, where e(q) = w'(q + v) and u is the stock
diffusion loading (the stock leg trades frictionlessly).  Choosing u
pointwise-optimally gives u* = s/gamma - (rho xi / 2) e(q); with that u the
mean-variance score E - (gamma/2) Var of any two deterministic schedules
differs by exactly minus their gap in the deterministic functional J, which
is what ``compare_strategies`` verifies statistically.

Deterministic integrands are sampled at step midpoints, so the only Monte
Carlo systematic error is O(dt^2).  Brownian increments are keyed by
(seed, path index): path counts never perturb earlier paths, and paired
comparisons reuse the same increments by construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .closed_form import HedgeInputs, Trajectory, objective
from .costs import cost
from .errors import DomainError
from .market import _path_normals

OPTIMAL_U = "optimal_u"
ZERO_U = "zero_u"


@dataclass(frozen=True)
class PnLSampleSet:
    """Terminal PnL samples for one strategy under one seed."""

    terminal_pnl: np.ndarray
    seed: int
    strategy_id: str


@dataclass(frozen=True)
class StockOverlay:
    """Optimal stock diffusion loading u*, and the share position when computable."""

    u: float
    q_s: float | None = None


@dataclass(frozen=True)
class ObjectiveEstimate:
    """Sample mean-variance summary with a jackknife standard error on mv."""

    mean: float
    variance: float
    mv: float
    stderr: float


@dataclass(frozen=True)
class ComparisonReport:
    """Paired mean-variance comparison of two schedules under common noise.

    mv_gap estimates mv(a) - mv(b); analytic_gap is J(b) - J(a) from
    quadrature, which mv_gap should match for deterministic schedules.
    """

    mv_gap: float
    stderr: float
    ci_low: float
    ci_high: float
    mean_diff: float
    analytic_gap: float
    estimate_a: ObjectiveEstimate
    estimate_b: ObjectiveEstimate
    pnl_diff: np.ndarray
    n_paths: int
    seed: int


def optimal_stock_loading(q: np.ndarray, inputs: HedgeInputs) -> float:
    """u* = sharpe/gamma - (rho xi / 2) * e(q) for current vanilla holdings q."""
    e = float(inputs.exposure_of(np.atleast_1d(np.asarray(q, dtype=float))))
    return inputs.view.sharpe / inputs.gamma - 0.5 * inputs.rho * inputs.xi * e


def stock_overlay(
    q: np.ndarray,
    inputs: HedgeInputs,
    spot: float | None = None,
    nu: float | None = None,
    book_delta: float | None = None,
    vanilla_deltas: np.ndarray | None = None,
) -> StockOverlay:
    """Optimal stock overlay; q_s is filled in when the S-level inputs are given.

    q_s = u*/(sqrt(nu) S) - book_delta - sum_i (q_i + v_i) * vanilla_deltas_i
    """
    u = optimal_stock_loading(q, inputs)
    level_args = (spot, nu, book_delta, vanilla_deltas)
    if any(arg is None for arg in level_args):
        return StockOverlay(u=u)
    if not (spot > 0.0 and nu > 0.0):
        raise DomainError("spot and nu must be positive for the share position")
    deltas = np.asarray(vanilla_deltas, dtype=float)
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if deltas.shape != q.shape:
        raise DomainError("vanilla_deltas must match the option count")
    q_s = u / (np.sqrt(nu) * spot) - book_delta - float((q + inputs.target.v) @ deltas)
    return StockOverlay(u=u, q_s=float(q_s))


def _midpoint_profile(tr: Trajectory, inputs: HedgeInputs, n_steps: int):
    """Exposure, velocities and cost rate sampled at simulation-step midpoints."""
    dt = tr.horizon / n_steps
    mid = (np.arange(n_steps) + 0.5) * dt
    q_mid, v_mid = tr.sample(mid)
    e_mid = inputs.exposure_of(q_mid)
    cost_rate = np.zeros(n_steps)
    for i, c in enumerate(inputs.costs):
        cost_rate += cost(c, v_mid[:, i])
    return dt, e_mid, cost_rate


def _loadings(tr: Trajectory, inputs: HedgeInputs, mode: str, n_steps: int):
    dt, e_mid, cost_rate = _midpoint_profile(tr, inputs, n_steps)
    if mode == OPTIMAL_U:
        u_mid = inputs.view.sharpe / inputs.gamma - 0.5 * inputs.rho * inputs.xi * e_mid
    elif mode == ZERO_U:
        u_mid = np.zeros(n_steps)
    else:
        raise DomainError(f"mode must be '{OPTIMAL_U}' or '{ZERO_U}', got {mode!r}")
    drift = dt * (
        u_mid * inputs.view.sharpe + 0.5 * e_mid * inputs.view.zeta - cost_rate
    )
    return u_mid, 0.5 * inputs.xi * e_mid, float(np.sum(drift))


def _pnl_samples(
    loadings: list[tuple[np.ndarray, np.ndarray, float]],
    rho: float,
    horizon: float,
    n_paths: int,
    n_steps: int,
    seed: int,
    block: int = 4096,
) -> list[np.ndarray]:
    """Terminal PnL per path for one or more strategies on shared increments."""
    dt = horizon / n_steps
    sqdt = np.sqrt(dt)
    root = np.sqrt(1.0 - rho**2)
    outs = [np.empty(n_paths) for _ in loadings]
    for start in range(0, n_paths, block):
        stop = min(start + block, n_paths)
        nb = stop - start
        z = np.empty((nb, 2, n_steps))
        for i in range(nb):
            z[i] = _path_normals(seed, start + i, n_steps)
        dw_s = sqdt * z[:, 0, :]
        dw_v = sqdt * (rho * z[:, 0, :] + root * z[:, 1, :])
        for out, (u_mid, vega_load, drift) in zip(outs, loadings):
            out[start:stop] = drift + dw_s @ u_mid + dw_v @ vega_load
    return outs


def simulate_pnl(
    tr: Trajectory,
    inputs: HedgeInputs,
    mode: str,
    n_paths: int,
    n_steps: int,
    seed: int,
    strategy_id: str = "strategy",
) -> PnLSampleSet:
    """Simulate terminal PnL of a schedule under the reduced frozen-Greeks SDE."""
    if n_paths < 1 or n_steps < 1:
        raise DomainError("n_paths and n_steps must be at least 1")
    if tr.n != inputs.n:
        raise DomainError("trajectory and inputs have different option counts")
    load = _loadings(tr, inputs, mode, n_steps)
    samples = _pnl_samples([load], inputs.rho, tr.horizon, n_paths, n_steps, seed)[0]
    return PnLSampleSet(terminal_pnl=samples, seed=seed, strategy_id=strategy_id)


def _mv_terms(x: np.ndarray, gamma: float):
    n = len(x)
    s1 = float(np.sum(x))
    s2 = float(np.sum(x * x))
    mean = s1 / n
    var = (s2 - s1**2 / n) / (n - 1)
    return mean, var, mean - 0.5 * gamma * var


def _leave_one_out_mv(x: np.ndarray, gamma: float) -> np.ndarray:
    n = len(x)
    s1 = np.sum(x)
    s2 = np.sum(x * x)
    mean_i = (s1 - x) / (n - 1)
    var_i = (s2 - x * x - (s1 - x) ** 2 / (n - 1)) / (n - 2)
    return mean_i - 0.5 * gamma * var_i


def estimate_objective(samples: PnLSampleSet, gamma: float) -> ObjectiveEstimate:
    """Sample mean/variance and mv = mean - gamma/2 * variance, with jackknife SE."""
    x = samples.terminal_pnl
    if len(x) < 2:
        raise DomainError("need at least two paths to estimate the objective")
    mean, var, mv = _mv_terms(x, gamma)
    var = max(var, 0.0)  # guard rounding on constant samples
    mv = mean - 0.5 * gamma * var
    if len(x) == 2 or var == 0.0:
        return ObjectiveEstimate(mean=mean, variance=var, mv=mv, stderr=0.0)
    loo = _leave_one_out_mv(x, gamma)
    n = len(x)
    stderr = float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
    return ObjectiveEstimate(mean=mean, variance=var, mv=mv, stderr=stderr)


def compare_strategies(
    a: Trajectory,
    b: Trajectory,
    inputs: HedgeInputs,
    n_paths: int,
    seed: int,
    n_steps: int = 200,
    mode: str = OPTIMAL_U,
) -> ComparisonReport:
    """Paired mean-variance comparison of schedules a and b under common noise.

    Both schedules see identical Brownian increments (same seed, same
    per-path streams), so the per-path difference is free of level noise.
    The analytic prediction J(b) - J(a) from Simpson quadrature is reported
    alongside for consistency checking.
    """
    if abs(a.horizon - b.horizon) > 1e-12 * max(a.horizon, b.horizon):
        raise DomainError("strategies must share one horizon")
    if n_paths < 3:
        raise DomainError("need at least three paths for a paired comparison")
    load_a = _loadings(a, inputs, mode, n_steps)
    load_b = _loadings(b, inputs, mode, n_steps)
    pnl_a, pnl_b = _pnl_samples(
        [load_a, load_b], inputs.rho, a.horizon, n_paths, n_steps, seed
    )

    gamma = inputs.gamma
    mean_a, var_a, mv_a = _mv_terms(pnl_a, gamma)
    mean_b, var_b, mv_b = _mv_terms(pnl_b, gamma)
    gap = mv_a - mv_b
    loo = _leave_one_out_mv(pnl_a, gamma) - _leave_one_out_mv(pnl_b, gamma)
    n = n_paths
    stderr = float(np.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2)))
    half = 1.959963984540054 * stderr
    return ComparisonReport(
        mv_gap=gap,
        stderr=stderr,
        ci_low=gap - half,
        ci_high=gap + half,
        mean_diff=mean_a - mean_b,
        analytic_gap=objective(b, inputs) - objective(a, inputs),
        estimate_a=ObjectiveEstimate(mean_a, var_a, mv_a, 0.0),
        estimate_b=ObjectiveEstimate(mean_b, var_b, mv_b, 0.0),
        pnl_diff=pnl_a - pnl_b,
        n_paths=n_paths,
        seed=seed,
    )
