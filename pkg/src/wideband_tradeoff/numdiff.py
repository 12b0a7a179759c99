"""One-sided finite differences at zero with Richardson extrapolation.

Capacity functions are undefined for negative SNR, so only forward
stencils are used: nodes {0, h} for the first derivative and {0, h, 2h}
for the second. Both truncation errors expand in integer powers of h,
which is what the extrapolation table assumes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

from wideband_tradeoff.errors import ConvergenceError, DomainError

FIRST_DERIVATIVE_RTOL = 1e-4
SECOND_DERIVATIVE_RTOL = 1e-2
# absolute floor so that exactly-zero derivatives (straight lines) converge
_ATOL_FLOOR = 1e-10


@dataclass(frozen=True)
class StepSchedule:
    initial_step: float = 1e-2
    shrink_factor: float = 0.5
    levels: int = 6

    def __post_init__(self):
        if not (math.isfinite(self.initial_step) and self.initial_step > 0):
            raise DomainError(f"initial_step must be positive, got {self.initial_step!r}")
        if not 0 < self.shrink_factor < 1:
            raise DomainError(f"shrink_factor must lie in (0, 1), got {self.shrink_factor!r}")
        if self.levels < 3:
            raise DomainError(f"levels must be >= 3, got {self.levels!r}")

    def steps(self) -> list[float]:
        return [self.initial_step * self.shrink_factor**k for k in range(self.levels)]


def default_schedule(domain_max: float = math.inf) -> StepSchedule:
    """Schedule with initial step min(1e-2, domain_max / 4)."""
    # the second-derivative stencil reaches 2h, so 4h <= domain_max keeps it inside
    return StepSchedule(initial_step=min(1e-2, domain_max / 4))


class Estimate(NamedTuple):
    value: float
    error: float
    # diagonal of the Richardson table, one entry per level
    history: tuple[float, ...]


def richardson_table(estimates: list[float], shrink_factor: float) -> list[list[float]]:
    """Neville-style table for estimates with error c1*h + c2*h^2 + ...

    Row k holds the level-k raw estimate followed by its successive
    eliminations; ``table[k][k]`` is the fully extrapolated value.
    """
    table: list[list[float]] = []
    for k, raw in enumerate(estimates):
        row = [raw]
        for j in range(1, k + 1):
            factor = shrink_factor**-j
            row.append(row[j - 1] + (row[j - 1] - table[k - 1][j - 1]) / (factor - 1.0))
        table.append(row)
    return table


def _evaluate(f: Callable[[float], float], x: float) -> float:
    y = float(f(x))
    if not math.isfinite(y):
        raise ConvergenceError(f"non-finite function value {y!r} at {x!r}")
    return y


def _extrapolate(raw: list[float], schedule: StepSchedule, rtol: float, what: str) -> Estimate:
    table = richardson_table(raw, schedule.shrink_factor)
    diagonal = tuple(row[-1] for row in table)
    value = diagonal[-1]
    error = abs(diagonal[-1] - diagonal[-2])
    if error > rtol * abs(value) + _ATOL_FLOOR:
        raise ConvergenceError(
            f"{what} did not converge: estimate {value!r}, last-level change {error!r}"
        )
    return Estimate(value, error, diagonal)


def fd_first_derivative_at_zero(
    f: Callable[[float], float], schedule: StepSchedule | None = None
) -> Estimate:
    """Forward-difference estimate of f'(0), Richardson-refined.

    Returns the extrapolated value and the change between the last two
    diagonal entries as its error estimate.

    Raises:
        ConvergenceError: on non-finite evaluations or if the error
            estimate exceeds 1e-4 relative.
    """
    schedule = schedule or default_schedule()
    f0 = _evaluate(f, 0.0)
    raw = [(_evaluate(f, h) - f0) / h for h in schedule.steps()]
    return _extrapolate(raw, schedule, FIRST_DERIVATIVE_RTOL, "first derivative")


def fd_second_derivative_at_zero(
    f: Callable[[float], float], schedule: StepSchedule | None = None
) -> Estimate:
    """Forward second difference (f(2h) - 2 f(h) + f(0)) / h^2, Richardson-refined."""
    schedule = schedule or default_schedule()
    f0 = _evaluate(f, 0.0)
    raw = [(_evaluate(f, 2 * h) - 2 * _evaluate(f, h) + f0) / (h * h) for h in schedule.steps()]
    return _extrapolate(raw, schedule, SECOND_DERIVATIVE_RTOL, "second derivative")
