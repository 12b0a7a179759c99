"""Checks of the true curve against the approximations.

Every check returns a :class:`ValidationReport`. ``worst_violation`` is
signed in b/s/Hz: positive means the claimed inequality is broken by that
much, negative is the smallest margin. A report passes iff
``worst_violation <= tolerance``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from wideband_tradeoff.approx import (
    DEFAULT_EPSILON,
    averaged_estimate,
    c1_affine,
    c1_eps,
    c2_nonlinear,
)
from wideband_tradeoff.channel_models import ChannelModel, DerivativesAtZero, derivatives_at_zero
from wideband_tradeoff.errors import DomainError
from wideband_tradeoff.tradeoff import (
    EfficiencyCurve,
    from_db,
    shannon_limit,
    true_spectral_efficiency,
    wideband_slope,
)

DEFAULT_TOL = 1e-9
SLOPE_RTOL = 1e-3
# second differences below this are treated as rounding noise, not curvature
CONVEXITY_FLOOR = 1e-12


@dataclass(frozen=True)
class ValidationReport:
    check_name: str
    passed: bool
    worst_violation: float
    worst_gamma_db: float
    n_points: int
    tolerance: float
    details: dict = field(default_factory=dict, compare=False)


def _report(name, violations, gammas, tol, details=None) -> ValidationReport:
    violations = np.asarray(violations, dtype=float)
    if violations.size == 0:
        raise DomainError(f"{name}: nothing to check")
    i = int(np.argmax(violations))
    worst = float(violations[i])
    return ValidationReport(
        check_name=name,
        passed=worst <= tol,
        worst_violation=worst,
        worst_gamma_db=float(gammas[i]),
        n_points=int(violations.size),
        tolerance=float(tol),
        details=details or {},
    )


def check_lower_bound(
    curve: EfficiencyCurve, derivs: DerivativesAtZero, tol: float = DEFAULT_TOL
) -> ValidationReport:
    """c2_nonlinear(ebn0) <= se_true at every curve point."""
    violations = [c2_nonlinear(derivs, p.ebn0) - p.se for p in curve.points]
    return _report("lower_bound", violations, curve.gamma_db, tol)


def _prefix_length(ok: list[bool]) -> int:
    n = 0
    for flag in ok:
        if not flag:
            break
        n += 1
    return n


def check_sandwich(
    curve: EfficiencyCurve,
    derivs: DerivativesAtZero,
    epsilon: float = DEFAULT_EPSILON,
    tol: float = DEFAULT_TOL,
) -> ValidationReport:
    """c2_nonlinear <= se_true <= c1_eps pointwise.

    The worst violation is taken over the full curve. ``details`` holds
    the passing prefix: the number of leading points (the limit point
    included) on which both inequalities hold, and the last gamma of
    that prefix.
    """
    lower = [c2_nonlinear(derivs, p.ebn0) - p.se for p in curve.points]
    upper = [p.se - c1_eps(derivs, p.gamma_db, epsilon) for p in curve.points]
    violations = np.maximum(lower, upper)
    prefix = _prefix_length([v <= tol for v in violations])
    gammas = curve.gamma_db
    details = {
        "epsilon": float(epsilon),
        "prefix_points": prefix,
        "prefix_gamma_db": gammas[prefix - 1] if prefix else None,
        "worst_lower_violation": float(max(lower)),
        "worst_upper_violation": float(max(upper)),
    }
    return _report("sandwich", violations, gammas, tol, details)


def second_differences(
    se_of_gamma: Callable[[float], float], gamma_min_db: float, span_db: float, step_db: float
) -> tuple[np.ndarray, np.ndarray]:
    """Central second differences of ``se_of_gamma`` centred on (gamma_min, gamma_min + span].

    Returns (centres, differences). The grid is gamma_min + k*step for
    k = 0..n+1 with n = round(span / step), so the left-most stencil
    touches the limit point itself.
    """
    n = int(round(span_db / step_db))
    grid = gamma_min_db + step_db * np.arange(n + 2)
    values = np.array([se_of_gamma(float(g)) for g in grid])
    return grid[1:-1], values[2:] - 2.0 * values[1:-1] + values[:-2]


def convexity_probe(
    model: Optional[ChannelModel] = None,
    span_db: float = 1.0,
    step_db: float = 0.05,
    se_of_gamma: Optional[Callable[[float], float]] = None,
    gamma_min_db: Optional[float] = None,
) -> ValidationReport:
    """Probe local convexity of the curve in dB just above the limit.

    Passes when every central second difference on (gamma_min,
    gamma_min + span_db] exceeds a 1e-12 rounding floor. Either a
    ``model`` (the true curve is solved) or ``se_of_gamma`` together with
    ``gamma_min_db`` supplies the curve.

    ``details["increasing_toward_limit"]`` records whether the second
    differences grow monotonically as gamma decreases to the limit.
    """
    if not (span_db > 0 and step_db > 0 and step_db <= span_db / 4):
        raise DomainError(f"need 0 < step_db <= span_db/4, got span={span_db!r} step={step_db!r}")
    if se_of_gamma is None:
        if model is None:
            raise DomainError("convexity_probe needs a model or se_of_gamma")
        gamma_min_db = shannon_limit(derivatives_at_zero(model)).gamma_min_db

        def se_of_gamma(g: float) -> float:
            return true_spectral_efficiency(model, from_db(g))

    elif gamma_min_db is None:
        raise DomainError("se_of_gamma requires gamma_min_db")

    centres, d2 = second_differences(se_of_gamma, gamma_min_db, span_db, step_db)
    details = {
        "min_second_difference": float(d2.min()),
        "max_second_difference": float(d2.max()),
        "increasing_toward_limit": bool(np.all(np.diff(d2) < 0)),
    }
    return _report("convexity", CONVEXITY_FLOOR - d2, centres, 0.0, details)


def check_slope_equality(
    model: Optional[ChannelModel] = None,
    derivs: Optional[DerivativesAtZero] = None,
    eps_db: float = 1e-4,
    se_of_gamma: Optional[Callable[[float], float]] = None,
    rtol: float = SLOPE_RTOL,
) -> ValidationReport:
    """One-sided slope of the curve at the limit against the wideband slope.

    ``worst_violation`` is the relative slope error here, not b/s/Hz.
    By default the true curve of ``model`` is differentiated; pass
    ``se_of_gamma`` to differentiate another curve instead.
    """
    if not 1e-8 <= eps_db <= 1e-2:
        raise DomainError(f"eps_db must lie in [1e-8, 1e-2], got {eps_db!r}")
    if derivs is None:
        if model is None:
            raise DomainError("check_slope_equality needs a model or derivs")
        derivs = derivatives_at_zero(model)
    if se_of_gamma is None:
        if model is None:
            raise DomainError("check_slope_equality needs a model or se_of_gamma")

        def se_of_gamma(g: float) -> float:
            return true_spectral_efficiency(model, from_db(g))

    gamma_min = shannon_limit(derivs).gamma_min_db
    target = wideband_slope(derivs).slope_db
    slope = (se_of_gamma(gamma_min + eps_db) - se_of_gamma(gamma_min)) / eps_db
    rel_err = abs(slope - target) / target
    details = {"numerical_slope_db": slope, "wideband_slope_db": target, "eps_db": eps_db}
    return _report("slope_equality", [rel_err], [gamma_min], rtol, details)


@dataclass(frozen=True)
class ErrorReport:
    """Signed errors (approximation minus truth) along a curve."""

    gamma_db: np.ndarray
    se_true: np.ndarray
    err_c1: np.ndarray
    err_c2: np.ndarray
    err_avg: np.ndarray

    @property
    def max_abs_c1(self) -> float:
        return float(np.max(np.abs(self.err_c1)))

    @property
    def max_abs_c2(self) -> float:
        return float(np.max(np.abs(self.err_c2)))

    @property
    def max_abs_avg(self) -> float:
        return float(np.max(np.abs(self.err_avg)))

    @property
    def average_improves(self) -> bool:
        return self.max_abs_avg < self.max_abs_c1 and self.max_abs_avg < self.max_abs_c2

    def rows(self):
        return zip(*(a.tolist() for a in (self.gamma_db, self.err_c1, self.err_c2, self.err_avg)))

    def summary(self) -> dict:
        return {
            "max_abs_err_c1": self.max_abs_c1,
            "max_abs_err_c2": self.max_abs_c2,
            "max_abs_err_avg": self.max_abs_avg,
            "average_improves": self.average_improves,
        }


def error_report(curve: EfficiencyCurve, derivs: DerivativesAtZero) -> ErrorReport:
    gammas = np.array(curve.gamma_db)
    truth = np.array(curve.se)
    upper = np.array([c1_affine(derivs, g) for g in gammas])
    lower = np.array([c2_nonlinear(derivs, p.ebn0) for p in curve.points])
    avg = 0.5 * (upper + lower)
    return ErrorReport(gammas, truth, upper - truth, lower - truth, avg - truth)


def averaged_within_bracket(curve: EfficiencyCurve, derivs: DerivativesAtZero, epsilon: float) -> bool:
    """|avg - truth| <= max(c1_eps - truth, truth - c2) wherever the sandwich holds."""
    for p in curve.points:
        lower = c2_nonlinear(derivs, p.ebn0)
        upper = c1_eps(derivs, p.gamma_db, epsilon)
        if not lower <= p.se <= upper:
            continue
        avg = averaged_estimate(derivs, p.gamma_db)
        if abs(avg - p.se) > max(upper - p.se, p.se - lower) + math.ulp(max(upper, 1.0)):
            return False
    return True
