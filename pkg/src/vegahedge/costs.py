"""Execution-cost families and their convex conjugates.

Two families are supported, both with closed-form conjugates:

* quadratic:  L(v) = eta * v^2          (Almgren-Chriss style)
* power:      L(v) = eta * |v|^k, k > 1

The conjugate H(z) = sup_v (v z - L(v)) maps a costate to the value of the
optimal trade, and H'(z) maps a costate to the optimal trading rate.  Both
are needed by the trajectory solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

QUADRATIC = "quadratic"
POWER = "power"


@dataclass(frozen=True)
class CostSpec:
    """One option's execution-cost function.

    variant: "quadratic" or "power".
    eta: cost scale, > 0.
    k: exponent for the power family, > 1 (ignored for quadratic).
    """

    variant: str
    eta: float
    k: float = 2.0

    def __post_init__(self):
        if self.variant not in (QUADRATIC, POWER):
            raise DomainError(f"unknown cost variant {self.variant!r}")
        if not self.eta > 0.0:
            raise DomainError("cost scale eta must be positive")
        if self.variant == POWER and not self.k > 1.0:
            raise DomainError("power-cost exponent k must exceed 1")

    @classmethod
    def quadratic(cls, eta: float) -> "CostSpec":
        return cls(QUADRATIC, eta)

    @classmethod
    def power(cls, eta: float, k: float) -> "CostSpec":
        return cls(POWER, eta, k)

    @property
    def is_quadratic(self) -> bool:
        return self.variant == QUADRATIC


def cost(c: CostSpec, v):
    """Running cost L(v) paid when trading at rate v."""
    v = np.asarray(v, dtype=float)
    if c.variant == QUADRATIC:
        out = c.eta * v**2
    else:
        out = c.eta * np.abs(v) ** c.k
    return out if out.ndim else float(out)


def marginal_cost(c: CostSpec, v):
    """Derivative L'(v); maps a trading rate to its costate."""
    v = np.asarray(v, dtype=float)
    if c.variant == QUADRATIC:
        out = 2.0 * c.eta * v
    else:
        out = np.sign(v) * c.k * c.eta * np.abs(v) ** (c.k - 1.0)
    return out if out.ndim else float(out)


def hamiltonian(c: CostSpec, z):
    """Convex conjugate H(z) = sup_v (v z - L(v))."""
    z = np.asarray(z, dtype=float)
    if c.variant == QUADRATIC:
        out = z**2 / (4.0 * c.eta)
    else:
        k = c.k
        out = (k - 1.0) * c.eta ** (-1.0 / (k - 1.0)) * (np.abs(z) / k) ** (k / (k - 1.0))
    return out if out.ndim else float(out)


def hamiltonian_prime(c: CostSpec, z):
    """H'(z): the trading rate induced by costate z (inverse of marginal_cost)."""
    z = np.asarray(z, dtype=float)
    if c.variant == QUADRATIC:
        out = z / (2.0 * c.eta)
    else:
        out = np.sign(z) * (np.abs(z) / (c.k * c.eta)) ** (1.0 / (c.k - 1.0))
    return out if out.ndim else float(out)


def cost_curvature(c: CostSpec, v):
    """L''(v), used by Newton-type solvers.

    For the power family with k < 2 this blows up at v = 0; callers must
    clamp it themselves (see the transcription solver).
    """
    v = np.asarray(v, dtype=float)
    if c.variant == QUADRATIC:
        out = np.full_like(v, 2.0 * c.eta)
    else:
        k = c.k
        with np.errstate(divide="ignore"):
            out = k * (k - 1.0) * c.eta * np.abs(v) ** (k - 2.0)
    return out if out.ndim else float(out)
