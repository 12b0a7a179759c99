"""Channel capacity models C(snr) and their derivatives at zero SNR.

Two kinds are supported:

* ``awgn``: C(snr) = log2(e) * ln(1 + gain * snr), with closed-form
  derivatives. Only |A|^2 enters the capacity, so the gain is stored as a
  single positive real.
* ``tabulated``: samples (snr, capacity) starting at (0, 0), joined by a
  monotone piecewise-cubic (PCHIP) interpolant. Derivatives at zero are
  either declared or estimated by finite differences on the interpolant.

The continuous-time quantities (bandwidth, power, noise density) never
appear: the SNR snr = P / (B N0) is the only interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from wideband_tradeoff.errors import ConvergenceError, DomainError, InvalidChannelError
from wideband_tradeoff.numdiff import (
    default_schedule,
    fd_first_derivative_at_zero,
    fd_second_derivative_at_zero,
)

LOG2E = 1.0 / math.log(2.0)

AWGN = "awgn"
TABULATED = "tabulated"


def _check_finite_nonneg(name: str, x: float) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0:
        raise DomainError(f"{name} must be finite and >= 0, got {x!r}")
    return x


@dataclass(frozen=True)
class DerivativesAtZero:
    """C'(0) and C''(0) of a capacity function.

    Attributes:
        c1: first derivative, b/s/Hz per unit SNR. Must be > 0.
        c2: second derivative, b/s/Hz per unit SNR^2. Must be < 0.
    """

    c1: float
    c2: float

    def __post_init__(self):
        if not (math.isfinite(self.c1) and self.c1 > 0):
            raise InvalidChannelError(f"C'(0) must be finite and > 0, got {self.c1!r}")
        if not (math.isfinite(self.c2) and self.c2 < 0):
            raise InvalidChannelError(f"C''(0) must be finite and < 0, got {self.c2!r}")


@dataclass(frozen=True)
class ChannelModel:
    kind: str
    gain: Optional[float] = None
    samples: Optional[tuple[tuple[float, float], ...]] = None
    declared_derivs: Optional[DerivativesAtZero] = None

    def __post_init__(self):
        if self.kind == AWGN:
            if self.gain is None or not math.isfinite(self.gain) or self.gain <= 0:
                raise InvalidChannelError(f"awgn gain must be finite and > 0, got {self.gain!r}")
            if self.samples is not None:
                raise InvalidChannelError("awgn models take no samples")
        elif self.kind == TABULATED:
            if self.gain is not None:
                raise InvalidChannelError("tabulated models take no gain")
            self._validate_samples()
        else:
            raise InvalidChannelError(f"unknown channel kind {self.kind!r}")

    def _validate_samples(self):
        samples = self.samples
        if samples is None or len(samples) < 3:
            raise InvalidChannelError("tabulated model needs at least 3 samples")
        arr = np.asarray(samples, dtype=float)
        if arr.ndim != 2 or arr.shape[1] != 2 or not np.all(np.isfinite(arr)):
            raise InvalidChannelError("samples must be finite (snr, capacity) pairs")
        if arr[0, 0] != 0.0 or arr[0, 1] != 0.0:
            raise InvalidChannelError("first sample must be (0, 0)")
        if np.any(np.diff(arr[:, 0]) <= 0):
            raise InvalidChannelError("sample snr values must be strictly increasing")
        if np.any(np.diff(arr[:, 1]) <= 0):
            raise InvalidChannelError("sample capacities must be strictly increasing")

    @classmethod
    def awgn(cls, gain: float = 1.0) -> "ChannelModel":
        return cls(kind=AWGN, gain=float(gain))

    @classmethod
    def tabulated(
        cls,
        samples: Sequence[Sequence[float]],
        derivs: Optional[DerivativesAtZero] = None,
    ) -> "ChannelModel":
        pairs = tuple((float(s), float(c)) for s, c in samples)
        return cls(kind=TABULATED, samples=pairs, declared_derivs=derivs)

    @property
    def snr_max(self) -> float:
        """Largest SNR at which the model is defined."""
        if self.kind == AWGN:
            return math.inf
        return self.samples[-1][0]

    @cached_property
    def interpolant(self) -> PchipInterpolator:
        if self.kind != TABULATED:
            raise AttributeError("only tabulated models have an interpolant")
        arr = np.asarray(self.samples, dtype=float)
        return PchipInterpolator(arr[:, 0], arr[:, 1], extrapolate=False)


def awgn_capacity(gain: float, snr: float) -> float:
    """Capacity of the AWGN channel in b/s/Hz.

    Args:
        gain: channel gain A, finite and > 0.
        snr: signal-to-noise ratio, finite and >= 0.

    Returns:
        log2(e) * ln(1 + gain * snr).
    """
    gain = float(gain)
    if not math.isfinite(gain) or gain <= 0:
        raise DomainError(f"gain must be finite and > 0, got {gain!r}")
    snr = _check_finite_nonneg("snr", snr)
    return LOG2E * math.log1p(gain * snr)


def _check_in_domain(model: ChannelModel, snr: float) -> float:
    snr = _check_finite_nonneg("snr", snr)
    if snr > model.snr_max:
        raise DomainError(f"snr {snr!r} beyond the last tabulated sample {model.snr_max!r}")
    return snr


def capacity(model: ChannelModel, snr: float) -> float:
    """Capacity of ``model`` at ``snr`` in b/s/Hz."""
    if model.kind == AWGN:
        return awgn_capacity(model.gain, snr)
    snr = _check_in_domain(model, snr)
    return float(model.interpolant(snr))


def capacity_derivative(model: ChannelModel, snr: float, order: int) -> float:
    """d^order C / d snr^order at ``snr`` (order 0, 1 or 2)."""
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    if order == 0:
        return capacity(model, snr)
    snr = _check_in_domain(model, snr)
    if model.kind == AWGN:
        a = model.gain
        base = 1.0 + a * snr
        if order == 1:
            return LOG2E * a / base
        return -LOG2E * a * a / (base * base)
    return float(model.interpolant(snr, nu=order))


def derivatives_at_zero(model: ChannelModel) -> DerivativesAtZero:
    """C'(0) and C''(0) for ``model``.

    AWGN uses the closed forms c1 = A log2(e), c2 = -A^2 log2(e). Tabulated
    models return their declared derivatives if any, otherwise a
    finite-difference estimate on the interpolant.

    Raises:
        InvalidChannelError: if the estimate has c1 <= 0 or c2 >= 0, or
            the finite differences fail to converge.
    """
    if model.kind == AWGN:
        a = model.gain
        return DerivativesAtZero(c1=a * LOG2E, c2=-a * a * LOG2E)
    if model.declared_derivs is not None:
        return model.declared_derivs
    return _estimated_derivatives(model)


def _estimated_derivatives(model: ChannelModel) -> DerivativesAtZero:
    schedule = default_schedule(model.snr_max)
    f = model.interpolant
    try:
        c1 = fd_first_derivative_at_zero(lambda x: float(f(x)), schedule).value
        c2 = fd_second_derivative_at_zero(lambda x: float(f(x)), schedule).value
    except ConvergenceError as exc:
        raise InvalidChannelError(f"could not estimate derivatives at zero: {exc}") from exc
    return DerivativesAtZero(c1=c1, c2=c2)


def has_estimated_derivatives(model: ChannelModel) -> bool:
    return model.kind == TABULATED and model.declared_derivs is None
