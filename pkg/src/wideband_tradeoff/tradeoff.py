"""Exact tradeoff quantities: Eb/N0 as a function of SNR and its inverse.

The energy per bit is h(snr) = snr / C(snr); its limit at zero SNR,
1 / C'(0), is the Shannon limit. The true spectral efficiency at a
given Eb/N0 is found by inverting h with bracketed bisection on the SNR.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from wideband_tradeoff.channel_models import (
    LOG2E,
    ChannelModel,
    DerivativesAtZero,
    capacity,
    capacity_derivative,
    derivatives_at_zero,
)
from wideband_tradeoff.errors import (
    ConvergenceError,
    DomainError,
    NoSolutionError,
    OutOfRangeError,
)

MAX_ITERATIONS = 200
RESIDUAL_RTOL = 1e-12
# relative slack when deciding whether an Eb/N0 sits on the Shannon limit
LIMIT_RTOL = 1e-12
_BRACKET_START = 1e-6


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


def from_db(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class TradeoffPoint:
    """One point on the tradeoff curve.

    ``ebn0 * se == snr`` holds to the solver residual; ``gamma_db`` is
    ``ebn0`` in dB.
    """

    snr: float
    se: float
    ebn0: float
    gamma_db: float


@dataclass(frozen=True)
class EfficiencyCurve:
    channel: ChannelModel
    points: tuple[TradeoffPoint, ...]

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    @property
    def gamma_db(self) -> list[float]:
        return [p.gamma_db for p in self.points]

    @property
    def se(self) -> list[float]:
        return [p.se for p in self.points]

    @property
    def ebn0(self) -> list[float]:
        return [p.ebn0 for p in self.points]


class ShannonLimit(NamedTuple):
    ebn0_min: float
    gamma_min_db: float


class WidebandSlope(NamedTuple):
    slope_linear: float
    slope_db: float


def ebn0_of_snr(model: ChannelModel, snr: float) -> float:
    """h(snr) = snr / C(snr), with the Shannon limit 1/C'(0) at snr = 0."""
    c = capacity(model, snr)
    if snr == 0:
        return 1.0 / derivatives_at_zero(model).c1
    if c <= 0:
        raise DomainError(f"capacity is {c!r} at positive snr {snr!r}")
    return snr / c


def shannon_limit(derivs: DerivativesAtZero) -> ShannonLimit:
    ebn0_min = 1.0 / derivs.c1
    return ShannonLimit(ebn0_min, to_db(ebn0_min))


def wideband_slope(derivs: DerivativesAtZero) -> WidebandSlope:
    """Slope of spectral efficiency at the Shannon limit.

    Returns the slope against linear Eb/N0, -2 c1^3 / c2, and against
    Eb/N0 in dB, -ln(10) c1^2 / (5 c2).
    """
    c1, c2 = derivs.c1, derivs.c2
    return WidebandSlope(-2.0 * c1**3 / c2, -math.log(10.0) * c1 * c1 / (5.0 * c2))


def h_prime_at_zero(derivs: DerivativesAtZero) -> float:
    return -derivs.c2 / (2.0 * derivs.c1 * derivs.c1)


def h_double_prime(model: ChannelModel, snr: float) -> float:
    """Second derivative of h at ``snr`` > 0.

    Evaluates (-s C C'' - 2 C C' + 2 s C'^2) / C^3 directly. The quotient
    is 0/0 at snr = 0, which is rejected. Near zero the numerator cancels
    to O(snr^3), so expect roughly snr^-2 ulps of relative error.
    """
    snr = float(snr)
    if not (snr > 0):
        raise DomainError(f"h'' needs snr > 0, got {snr!r}")
    if snr >= model.snr_max:
        raise DomainError(f"snr {snr!r} is not strictly inside the model domain")
    c = capacity_derivative(model, snr, 0)
    d1 = capacity_derivative(model, snr, 1)
    d2 = capacity_derivative(model, snr, 2)
    return (-snr * c * d2 - 2.0 * c * d1 + 2.0 * snr * d1 * d1) / c**3


def _check_above_limit(ebn0: float, ebn0_min: float) -> bool:
    """True if ``ebn0`` is on the limit (within LIMIT_RTOL); raise if below."""
    if not (math.isfinite(ebn0) and ebn0 > 0):
        raise DomainError(f"ebn0 must be finite and > 0, got {ebn0!r}")
    if ebn0 < ebn0_min * (1.0 - LIMIT_RTOL):
        raise NoSolutionError(f"Eb/N0 {ebn0!r} is below the Shannon limit {ebn0_min!r}")
    return ebn0 <= ebn0_min * (1.0 + LIMIT_RTOL)


def solve_snr(model: ChannelModel, ebn0: float) -> float:
    """SNR at which h(snr) equals ``ebn0``; 0 on the Shannon limit."""
    ebn0 = float(ebn0)
    if _check_above_limit(ebn0, shannon_limit(derivatives_at_zero(model)).ebn0_min):
        return 0.0

    def h(x: float) -> float:
        return x / capacity(model, x)

    snr_max = model.snr_max
    lo, hi = 0.0, min(_BRACKET_START, snr_max)
    while h(hi) < ebn0:
        if hi >= snr_max:
            raise OutOfRangeError(
                f"Eb/N0 {ebn0!r} is not reached within the tabulated domain (h={h(hi)!r} at end)"
            )
        lo, hi = hi, min(2.0 * hi, snr_max)
        if not math.isfinite(hi):
            raise ConvergenceError(f"could not bracket Eb/N0 {ebn0!r}")

    # invariant: h(lo) < ebn0 <= h(hi), with h(0) read as the limit
    for _ in range(MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if h(mid) < ebn0:
            lo = mid
        else:
            hi = mid

    candidates = [x for x in (lo, hi) if x > 0]
    best = min(candidates, key=lambda x: abs(h(x) - ebn0))
    residual = abs(h(best) - ebn0)
    if residual > RESIDUAL_RTOL * ebn0:
        raise ConvergenceError(f"bisection residual {residual!r} at Eb/N0 {ebn0!r}")
    return best


def true_spectral_efficiency(model: ChannelModel, ebn0: float) -> float:
    """Spectral efficiency C attained at energy per bit ``ebn0`` (linear).

    Raises:
        NoSolutionError: ``ebn0`` is below the Shannon limit.
        OutOfRangeError: a tabulated model does not reach ``ebn0``.
    """
    snr = solve_snr(model, ebn0)
    return 0.0 if snr == 0 else capacity(model, snr)


def true_se_awgn_implicit(gain: float, ebn0: float) -> float:
    """Positive root of C = log2(e) ln(1 + gain * ebn0 * C), by bisection on C.

    g(C) = log2(e) ln(1 + gain*ebn0*C) - C has g(0) = 0, g'(0) > 0 above
    the limit and g -> -inf, so exactly one positive root exists. The
    bracket [0, C_up] doubles C_up from 1 until g(C_up) <= 0; lo = 0 is
    treated as the positive side.
    """
    gain = float(gain)
    if not (math.isfinite(gain) and gain > 0):
        raise DomainError(f"gain must be finite and > 0, got {gain!r}")
    ebn0 = float(ebn0)
    if _check_above_limit(ebn0, 1.0 / (gain * LOG2E)):
        return 0.0
    k = gain * ebn0

    def g(c: float) -> float:
        return LOG2E * math.log1p(k * c) - c

    lo, hi = 0.0, 1.0
    while g(hi) > 0:
        lo, hi = hi, 2.0 * hi
    for _ in range(MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    if lo == 0:
        return hi
    return min((lo, hi), key=lambda c: abs(g(c)))


def _point_at(model: ChannelModel, ebn0: float) -> TradeoffPoint:
    snr = solve_snr(model, ebn0)
    se = 0.0 if snr == 0 else capacity(model, snr)
    return TradeoffPoint(snr=snr, se=se, ebn0=ebn0, gamma_db=to_db(ebn0))


def generate_curve(
    model: ChannelModel, gamma_offset_max_db: float = 10.0, n_points: int = 200
) -> EfficiencyCurve:
    """Tradeoff curve sampled uniformly in dB above the Shannon limit.

    The first point is the limit itself (se = 0). It is followed by
    ``n_points`` points uniform in gamma over
    [gamma_min + delta, gamma_min + gamma_offset_max_db] with
    delta = gamma_offset_max_db / (10 n_points), so the curve holds
    ``n_points + 1`` points.
    """
    if n_points < 2:
        raise DomainError(f"n_points must be >= 2, got {n_points!r}")
    if not (math.isfinite(gamma_offset_max_db) and gamma_offset_max_db > 0):
        raise DomainError(f"gamma_offset_max_db must be > 0, got {gamma_offset_max_db!r}")
    ebn0_min, gamma_min = shannon_limit(derivatives_at_zero(model))
    delta = gamma_offset_max_db / (10.0 * n_points)
    span = gamma_offset_max_db - delta
    points = [TradeoffPoint(snr=0.0, se=0.0, ebn0=ebn0_min, gamma_db=gamma_min)]
    for k in range(n_points):
        offset = delta + span * k / (n_points - 1)
        points.append(_point_at(model, from_db(gamma_min + offset)))
    return EfficiencyCurve(channel=model, points=tuple(points))
