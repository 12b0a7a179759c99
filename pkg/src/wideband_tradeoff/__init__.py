"""Spectral efficiency versus energy-per-bit in the wideband regime.

Exact tradeoff curves, the affine wideband-slope approximation, the
nonlinear lower bound and their average, plus validators for the
relationships between them.
"""

from wideband_tradeoff.approx import (
    ApproxEvaluation,
    averaged_estimate,
    c1_affine,
    c1_eps,
    c2_nonlinear,
    c2_nonlinear_db,
    evaluate_all,
)
from wideband_tradeoff.channel_models import (
    ChannelModel,
    DerivativesAtZero,
    awgn_capacity,
    capacity,
    capacity_derivative,
    derivatives_at_zero,
)
from wideband_tradeoff.errors import (
    ConvergenceError,
    DomainError,
    InvalidChannelError,
    NoSolutionError,
    OutOfRangeError,
    WidebandError,
)
from wideband_tradeoff.tradeoff import (
    EfficiencyCurve,
    TradeoffPoint,
    ebn0_of_snr,
    generate_curve,
    h_double_prime,
    h_prime_at_zero,
    shannon_limit,
    true_se_awgn_implicit,
    true_spectral_efficiency,
    wideband_slope,
)

__version__ = "0.1.0"

__all__ = [
    "ApproxEvaluation",
    "ChannelModel",
    "ConvergenceError",
    "DerivativesAtZero",
    "DomainError",
    "EfficiencyCurve",
    "InvalidChannelError",
    "NoSolutionError",
    "OutOfRangeError",
    "TradeoffPoint",
    "WidebandError",
    "averaged_estimate",
    "awgn_capacity",
    "c1_affine",
    "c1_eps",
    "c2_nonlinear",
    "c2_nonlinear_db",
    "capacity",
    "capacity_derivative",
    "derivatives_at_zero",
    "ebn0_of_snr",
    "evaluate_all",
    "generate_curve",
    "h_double_prime",
    "h_prime_at_zero",
    "shannon_limit",
    "true_se_awgn_implicit",
    "true_spectral_efficiency",
    "wideband_slope",
]
