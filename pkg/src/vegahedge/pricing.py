"""Vanilla pricing under Black-Scholes and Heston, and frozen Vega extraction.

Rates and dividends are zero throughout.  The Heston price is computed from
the characteristic function with the branch-stable parametrisation (the
(beta - d) / exp(-d tau) form), integrated along the Im(z) = 1/2 contour:

    call = S0 - sqrt(S0 K)/pi * int_0^inf Re[e^{i u log(S0/K)} phi(u - i/2)] / (u^2 + 1/4) du

where phi is the characteristic function of log(S_T / S0) under Q.  The
integrand is smooth, non-oscillatory near u = 0 and decays exponentially,
which keeps adaptive quadrature cheap and accurate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.stats import norm

from .errors import DomainError, NumericsError
from .market import SpotState, SvParams, require_valid

CALL = "call"
PUT = "put"

# quadrature targets; the price contract is 1e-6 * S0 so keep a wide margin
_QUAD_EPSABS = 1e-12
_QUAD_EPSREL = 1e-11


@dataclass(frozen=True)
class VanillaOption:
    """European vanilla: strike, maturity, call/put."""

    strike: float
    maturity: float
    kind: str = CALL

    def __post_init__(self):
        if not self.strike > 0.0:
            raise DomainError("strike must be positive")
        if not self.maturity > 0.0:
            raise DomainError("maturity must be positive")
        if self.kind not in (CALL, PUT):
            raise DomainError(f"kind must be 'call' or 'put', got {self.kind!r}")


@dataclass(frozen=True)
class VegaProfile:
    """Frozen Vegas per vanilla.

    vega_sv: sensitivity to sqrt(nu) in the stochastic-vol model.
    vega_bs: Black-Scholes Vega at each option's model-implied vol (> 0).
    """

    vega_sv: np.ndarray
    vega_bs: np.ndarray

    def __post_init__(self):
        sv = np.atleast_1d(np.asarray(self.vega_sv, dtype=float))
        bs = np.atleast_1d(np.asarray(self.vega_bs, dtype=float))
        object.__setattr__(self, "vega_sv", sv)
        object.__setattr__(self, "vega_bs", bs)
        if sv.shape != bs.shape:
            raise DomainError("vega_sv and vega_bs must have the same length")
        if np.any(bs <= 0.0):
            raise DomainError("vega_bs entries must be strictly positive")


def _check_bs_inputs(s, k, tau, sigma):
    if not (s > 0.0 and k > 0.0 and tau > 0.0 and sigma > 0.0):
        raise DomainError("S, K, tau and sigma must all be positive")


def bs_price(s: float, k: float, tau: float, sigma: float, kind: str = CALL) -> float:
    """Undiscounted Black-Scholes price at zero rates."""
    _check_bs_inputs(s, k, tau, sigma)
    root = sigma * np.sqrt(tau)
    d1 = (np.log(s / k) + 0.5 * sigma**2 * tau) / root
    d2 = d1 - root
    if kind == CALL:
        return float(s * norm.cdf(d1) - k * norm.cdf(d2))
    if kind == PUT:
        return float(k * norm.cdf(-d2) - s * norm.cdf(-d1))
    raise DomainError(f"kind must be 'call' or 'put', got {kind!r}")


def bs_vega(s: float, k: float, tau: float, sigma: float) -> float:
    """dPrice/dSigma; identical for calls and puts."""
    _check_bs_inputs(s, k, tau, sigma)
    root = sigma * np.sqrt(tau)
    d1 = (np.log(s / k) + 0.5 * sigma**2 * tau) / root
    return float(s * norm.pdf(d1) * np.sqrt(tau))


def implied_vol(
    price: float,
    s: float,
    k: float,
    tau: float,
    kind: str = CALL,
    tol_scale: float = 1e-10,
) -> float:
    """Invert bs_price for sigma: safeguarded Newton with a bisection bracket.

    The residual |bs_price(sigma) - price| is driven below tol_scale * s.
    Prices at or outside the no-arbitrage bounds raise DomainError.
    """
    if not (s > 0.0 and k > 0.0 and tau > 0.0):
        raise DomainError("S, K and tau must be positive")
    intrinsic = max(s - k, 0.0) if kind == CALL else max(k - s, 0.0)
    upper = s if kind == CALL else k
    if not intrinsic < price < upper:
        raise DomainError(
            f"price {price} outside the open no-arbitrage range ({intrinsic}, {upper})"
        )

    tol = tol_scale * s
    lo, hi = 1e-12, 1.0
    while bs_price(s, k, tau, hi, kind) < price:
        hi *= 2.0
        if hi > 1e6:  # cannot happen for in-range prices; guard anyway
            raise NumericsError("implied vol bracket expansion failed")

    sigma = min(max(0.25, lo), hi)
    for _ in range(100):
        value = bs_price(s, k, tau, sigma, kind)
        resid = value - price
        if abs(resid) <= tol:
            return float(sigma)
        if resid > 0.0:
            hi = sigma
        else:
            lo = sigma
        vega = bs_vega(s, k, tau, sigma)
        step_ok = vega > 1e-14
        if step_ok:
            candidate = sigma - resid / vega
            step_ok = lo < candidate < hi
        sigma = candidate if step_ok else 0.5 * (lo + hi)
    raise NumericsError(
        "implied vol did not converge", {"residual": resid, "sigma": sigma}
    )


def _omexp(z: complex) -> complex:
    """1 - exp(-z) for complex z, stable for small |z|."""
    if abs(z) < 1e-4:
        return z * (1.0 - z / 2.0 * (1.0 - z / 3.0 * (1.0 - z / 4.0)))
    return 1.0 - np.exp(-z)


def _log1p_complex(w: complex) -> complex:
    """log(1 + w) for complex w, stable for small |w|."""
    if abs(w) < 1e-4:
        return w * (1.0 - w / 2.0 + w * w / 3.0 - w * w * w / 4.0)
    return np.log(1.0 + w)


def _heston_cf(z: complex, tau: float, p: SvParams, nu0: float) -> complex:
    """Characteristic function E[exp(i z log(S_T/S0))] under Q.

    Branch-stable form: d has nonnegative real part, everything is written
    in exp(-d tau), and the C log is evaluated as log1p so the kappa/xi^2
    prefactor never multiplies cancellation noise.
    """
    xi2 = p.xi**2
    beta = p.kappa_q - 1j * p.rho * p.xi * z
    d = np.sqrt(beta**2 + xi2 * (z * z + 1j * z))
    if d.real < 0.0:
        d = -d
    g = (beta - d) / (beta + d)
    e_dt = _omexp(d * tau)  # 1 - exp(-d tau)
    denom = 1.0 - g * np.exp(-d * tau)
    dterm = (beta - d) / xi2 * e_dt / denom
    # log((1 - g e^{-d tau}) / (1 - g)) = log1p(g * (1 - e^{-d tau}) / (1 - g))
    cterm = p.kappa_q * p.theta_q / xi2 * (
        (beta - d) * tau - 2.0 * _log1p_complex(g * e_dt / (1.0 - g))
    )
    return np.exp(cterm + dterm * nu0)


def heston_price(p: SvParams, x: SpotState, o: VanillaOption) -> float:
    """Semi-closed-form Heston price of a vanilla at zero rates.

    Accuracy target 1e-6 * S0; adaptive quadrature failure raises
    NumericsError with the integrator diagnostics attached.
    """
    require_valid(p)
    log_moneyness = np.log(x.s0 / o.strike)

    def integrand(u: float) -> float:
        z = u - 0.5j
        val = np.exp(1j * u * log_moneyness) * _heston_cf(z, o.maturity, p, x.nu0)
        return val.real / (u * u + 0.25)

    value, abserr, info, *rest = quad(
        integrand, 0.0, np.inf, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL,
        limit=400, full_output=True,
    )
    scale = np.sqrt(x.s0 * o.strike) / np.pi
    if rest or abserr * scale > 1e-7 * x.s0:
        raise NumericsError(
            "Heston quadrature did not converge",
            {"abserr": abserr, "neval": info.get("neval"), "message": rest[0] if rest else ""},
        )
    call = x.s0 - scale * value
    if o.kind == CALL:
        return float(call)
    return float(call - x.s0 + o.strike)


def vega_profile(
    p: SvParams,
    x: SpotState,
    options: list[VanillaOption],
    bump: float = 1e-4,
) -> VegaProfile:
    """Frozen Vega constants for a list of vanillas.

    vega_sv is the central finite difference of the Heston price in
    sqrt(nu0) (step ``bump``); vega_bs is the Black-Scholes Vega evaluated
    at each option's Heston-implied volatility.
    """
    if not bump > 0.0:
        raise DomainError("bump must be positive")
    root = np.sqrt(x.nu0)
    if bump >= root:
        raise DomainError("bump too large: sqrt(nu0) - bump must stay positive")
    up = SpotState(x.s0, (root + bump) ** 2)
    down = SpotState(x.s0, (root - bump) ** 2)

    vega_sv = np.empty(len(options))
    vega_bs = np.empty(len(options))
    for i, o in enumerate(options):
        vega_sv[i] = (heston_price(p, up, o) - heston_price(p, down, o)) / (2.0 * bump)
        iv = implied_vol(heston_price(p, x, o), x.s0, o.strike, o.maturity, o.kind)
        vega_bs[i] = bs_vega(x.s0, o.strike, o.maturity, iv)
    return VegaProfile(vega_sv=vega_sv, vega_bs=vega_bs)
