"""Exotic-book representation: frozen bucket Vegas, target ratios, Vega exposure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .pricing import VegaProfile


@dataclass(frozen=True)
class ExoticBook:
    """The book seen through its frozen market-model Vega buckets (any sign)."""

    vega_mm: np.ndarray

    def __post_init__(self):
        vm = np.atleast_1d(np.asarray(self.vega_mm, dtype=float))
        object.__setattr__(self, "vega_mm", vm)
        if not np.all(np.isfinite(vm)):
            raise DomainError("vega_mm entries must be finite")


@dataclass(frozen=True)
class TargetVector:
    """Per-bucket hedge targets: v_i = vega_mm_i / vega_bs_i (option units)."""

    v: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        object.__setattr__(self, "v", v)
        if not np.all(np.isfinite(v)):
            raise DomainError("target entries must be finite")

    def __len__(self) -> int:
        return len(self.v)


def target_ratios(b: ExoticBook, vp: VegaProfile) -> TargetVector:
    """Elementwise vega_mm / vega_bs; the position -v cancels every bucket."""
    if b.vega_mm.shape != vp.vega_bs.shape:
        raise DomainError("book and Vega profile have different lengths")
    if np.any(vp.vega_bs <= 0.0):
        raise DomainError("vega_bs entries must be strictly positive")
    return TargetVector(v=b.vega_mm / vp.vega_bs)


def exposure(q: np.ndarray, v: TargetVector, vp: VegaProfile) -> float:
    """Residual sqrt-variance exposure of holdings q: sum_i (q_i + v_i) * vega_sv_i."""
    q = np.atleast_1d(np.asarray(q, dtype=float))
    if q.shape != v.v.shape or q.shape != vp.vega_sv.shape:
        raise DomainError("dimension mismatch between q, target and Vega profile")
    return float(np.dot(q + v.v, vp.vega_sv))
