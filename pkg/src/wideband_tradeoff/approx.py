"""Approximations to spectral efficiency near the Shannon limit.

All of them are built from C'(0) and C''(0) alone:

* c1_affine: the wideband-slope line in dB, an approximate upper bound.
* c2_nonlinear: (2 c1 / c2) (1/ebn0 - c1), a lower bound near the limit.
* c1_eps: the affine line with its slope raised by epsilon.
* averaged_estimate: mean of c1_affine and c2_nonlinear.

Nothing is extrapolated below the Shannon limit; values within a 1e-12
relative rounding band of the limit evaluate to exactly zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from wideband_tradeoff.channel_models import DerivativesAtZero
from wideband_tradeoff.errors import DomainError
from wideband_tradeoff.tradeoff import LIMIT_RTOL, from_db, shannon_limit, wideband_slope

DEFAULT_EPSILON = 0.01
# absolute dB slack matching LIMIT_RTOL on the linear scale
_GAMMA_ATOL = 10.0 * LIMIT_RTOL / math.log(10.0)


@dataclass(frozen=True)
class ApproxEvaluation:
    gamma_db: float
    c1_value: float
    c2_value: float
    avg_value: float
    c1_eps_value: Optional[float] = None
    epsilon: Optional[float] = None


def _db_offset(derivs: DerivativesAtZero, gamma_db: float) -> float:
    gamma_db = float(gamma_db)
    if not math.isfinite(gamma_db):
        raise DomainError(f"gamma_db must be finite, got {gamma_db!r}")
    offset = gamma_db - shannon_limit(derivs).gamma_min_db
    if offset < -_GAMMA_ATOL:
        raise DomainError(f"gamma_db {gamma_db!r} is below the Shannon limit")
    return max(offset, 0.0)


def c1_affine(derivs: DerivativesAtZero, gamma_db: float) -> float:
    return wideband_slope(derivs).slope_db * _db_offset(derivs, gamma_db)


def c1_eps(derivs: DerivativesAtZero, gamma_db: float, epsilon: float) -> float:
    epsilon = float(epsilon)
    if not (math.isfinite(epsilon) and epsilon >= 0):
        raise DomainError(f"epsilon must be finite and >= 0, got {epsilon!r}")
    return (wideband_slope(derivs).slope_db + epsilon) * _db_offset(derivs, gamma_db)


def c2_nonlinear(derivs: DerivativesAtZero, ebn0: float) -> float:
    """Nonlinear lower bound at linear energy per bit ``ebn0``."""
    ebn0 = float(ebn0)
    ebn0_min = shannon_limit(derivs).ebn0_min
    if not (math.isfinite(ebn0) and ebn0 > 0):
        raise DomainError(f"ebn0 must be finite and > 0, got {ebn0!r}")
    if ebn0 < ebn0_min * (1.0 - LIMIT_RTOL):
        raise DomainError(f"ebn0 {ebn0!r} is below the Shannon limit {ebn0_min!r}")
    value = 2.0 * derivs.c1 / derivs.c2 * (1.0 / ebn0 - derivs.c1)
    return max(value, 0.0)


def c2_nonlinear_db(derivs: DerivativesAtZero, gamma_db: float) -> float:
    """``c2_nonlinear`` with ebn0 = 10^(gamma_db/10)."""
    if _db_offset(derivs, gamma_db) == 0.0:
        return 0.0
    return c2_nonlinear(derivs, from_db(gamma_db))


def averaged_estimate(derivs: DerivativesAtZero, gamma_db: float) -> float:
    return 0.5 * (c1_affine(derivs, gamma_db) + c2_nonlinear_db(derivs, gamma_db))


def evaluate_all(
    derivs: DerivativesAtZero, gamma_db: float, epsilon: Optional[float] = None
) -> ApproxEvaluation:
    upper = c1_affine(derivs, gamma_db)
    lower = c2_nonlinear_db(derivs, gamma_db)
    return ApproxEvaluation(
        gamma_db=float(gamma_db),
        c1_value=upper,
        c2_value=lower,
        avg_value=0.5 * (upper + lower),
        c1_eps_value=None if epsilon is None else c1_eps(derivs, gamma_db, epsilon),
        epsilon=None if epsilon is None else float(epsilon),
    )
