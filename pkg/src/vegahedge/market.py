"""One-factor stochastic volatility market: parameters, frozen view, path simulation.

Dynamics under the physical measure P:

    dS = mu * S dt + sqrt(nu) * S dW^S
    dnu = kappa_p * (theta_p - nu) dt + xi * sqrt(nu) dW^nu

and under the pricing measure Q the spot drift vanishes and the variance
drift switches to kappa_q * (theta_q - nu).  The spot/vol Brownians carry
correlation rho.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

P_MEASURE = "P"
Q_MEASURE = "Q"


@dataclass(frozen=True)
class SvParams:
    """Heston-style dynamics under both measures.

    No invariants are enforced at construction so that ``validate_params``
    can report bad values instead of never seeing them; simulation and
    pricing refuse to run when hard checks fail.
    """

    xi: float  # vol-of-vol, per sqrt(time)
    rho: float  # spot/vol correlation, in (-1, 1)
    kappa_p: float
    theta_p: float
    kappa_q: float
    theta_q: float
    mu: float = 0.0  # spot drift under P, frozen to a constant


@dataclass(frozen=True)
class SpotState:
    """Initial spot price and instantaneous variance."""

    s0: float
    nu0: float

    def __post_init__(self):
        if not self.s0 > 0.0:
            raise DomainError("spot price s0 must be positive")
        if not self.nu0 > 0.0:
            raise DomainError("initial variance nu0 must be positive")


@dataclass(frozen=True)
class MarketView:
    """Frozen market-view constants: Sharpe ratio and rescaled vol-drift gap."""

    sharpe: float
    zeta: float


@dataclass(frozen=True)
class ValidationReport:
    """Findings from parameter validation; hard errors vs soft warnings."""

    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def lines(self) -> list[str]:
        out = [f"error: {e}" for e in self.errors]
        out += [f"warning: {w}" for w in self.warnings]
        return out or ["no findings"]


@dataclass(frozen=True)
class PathSet:
    """Simulated paths on a shared time grid.

    spots and variances have shape (n_paths, n_steps + 1); variances are
    post-truncation, hence nonnegative.
    """

    times: np.ndarray
    spots: np.ndarray
    variances: np.ndarray
    seed: int


def validate_params(p: SvParams) -> ValidationReport:
    """Check hard domain constraints and the Feller condition under both measures."""
    errors = []
    warnings = []
    if not p.xi > 0.0:
        errors.append(f"vol-of-vol must be positive, got xi={p.xi}")
    if not -1.0 < p.rho < 1.0:
        errors.append(f"correlation must lie strictly inside (-1, 1), got rho={p.rho}")
    for name in ("kappa_p", "theta_p", "kappa_q", "theta_q"):
        value = getattr(p, name)
        if value < 0.0:
            errors.append(f"{name} must be nonnegative, got {value}")
    if p.xi > 0.0:
        for tag, kappa, theta in ((P_MEASURE, p.kappa_p, p.theta_p), (Q_MEASURE, p.kappa_q, p.theta_q)):
            if kappa >= 0.0 and theta >= 0.0 and 2.0 * kappa * theta <= p.xi**2:
                warnings.append(
                    f"Feller condition violated under {tag}: "
                    f"2*kappa*theta = {2.0 * kappa * theta:g} <= xi^2 = {p.xi**2:g}"
                )
    return ValidationReport(errors=errors, warnings=warnings)


def require_valid(p: SvParams) -> None:
    """Raise DomainError when hard checks fail (warnings pass)."""
    report = validate_params(p)
    if not report.ok:
        raise DomainError("; ".join(report.errors))


def frozen_view(p: SvParams, x: SpotState) -> MarketView:
    """Freeze the Sharpe ratio and the P/Q variance-drift gap at the initial state.

    sharpe = mu / sqrt(nu0)
    zeta   = (kappa_p (theta_p - nu0) - kappa_q (theta_q - nu0)) / sqrt(nu0)
    """
    if not x.nu0 > 0.0:
        raise DomainError("nu0 must be positive to freeze the market view")
    root = np.sqrt(x.nu0)
    gap = p.kappa_p * (p.theta_p - x.nu0) - p.kappa_q * (p.theta_q - x.nu0)
    return MarketView(sharpe=p.mu / root, zeta=gap / root)


def _path_normals(seed: int, path_index: int, n_steps: int) -> np.ndarray:
    """Independent standard normals (2, n_steps) for one path.

    The stream is keyed by (seed, path index) so adding paths never
    perturbs earlier ones.
    """
    bits = np.random.Philox(key=np.array([seed, path_index], dtype=np.uint64))
    return np.random.Generator(bits).standard_normal((2, n_steps))


def simulate_paths(
    p: SvParams,
    x: SpotState,
    measure: str,
    horizon: float,
    n_steps: int,
    n_paths: int,
    seed: int,
    block: int = 4096,
) -> PathSet:
    """Full-truncation Euler simulation of (S, nu) under P or Q.

    The variance state may dip below zero; its positive part feeds both the
    drift and the diffusion, and log-spot is advanced with the exact
    exponential of its Euler increment, so spots stay positive.  Identical
    (params, seed, grid) give bit-identical output.
    """
    require_valid(p)
    if measure not in (P_MEASURE, Q_MEASURE):
        raise DomainError(f"measure must be 'P' or 'Q', got {measure!r}")
    if not horizon > 0.0:
        raise DomainError("horizon must be positive")
    if n_steps < 1 or n_paths < 1:
        raise DomainError("n_steps and n_paths must be at least 1")

    dt = horizon / n_steps
    sqdt = np.sqrt(dt)
    root_one_minus = np.sqrt(1.0 - p.rho**2)
    if measure == P_MEASURE:
        kappa, theta, drift = p.kappa_p, p.theta_p, p.mu
    else:
        kappa, theta, drift = p.kappa_q, p.theta_q, 0.0

    times = np.linspace(0.0, horizon, n_steps + 1)
    spots = np.empty((n_paths, n_steps + 1))
    variances = np.empty((n_paths, n_steps + 1))

    for start in range(0, n_paths, block):
        stop = min(start + block, n_paths)
        nb = stop - start
        z = np.empty((nb, 2, n_steps))
        for i in range(nb):
            z[i] = _path_normals(seed, start + i, n_steps)
        dw_s = sqdt * z[:, 0, :]
        dw_v = sqdt * (p.rho * z[:, 0, :] + root_one_minus * z[:, 1, :])

        log_s = np.full(nb, np.log(x.s0))
        nu = np.full(nb, x.nu0)
        spots[start:stop, 0] = x.s0
        variances[start:stop, 0] = x.nu0
        for k in range(n_steps):
            nu_plus = np.maximum(nu, 0.0)
            log_s = log_s + (drift - 0.5 * nu_plus) * dt + np.sqrt(nu_plus) * dw_s[:, k]
            nu = nu + kappa * (theta - nu_plus) * dt + p.xi * np.sqrt(nu_plus) * dw_v[:, k]
            spots[start:stop, k + 1] = np.exp(log_s)
            variances[start:stop, k + 1] = np.maximum(nu, 0.0)

    return PathSet(times=times, spots=spots, variances=variances, seed=seed)
