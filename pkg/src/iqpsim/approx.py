"""Multiplicative-error metrics and error-budget formulas.

These quantify how well an approximate output distribution tracks an exact
one in the multiplicative sense P/c <= P_ap <= c*P, and the per-step error
budget an approximation scheme must hit for the composed factor over n
recursive marginals to stay below sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .circuit import OutcomeString

# Probabilities at or below this are treated as exact zeros.
ZERO_THRESHOLD = 1e-15


@dataclass(frozen=True)
class ErrorReport:
    c: float
    worst_outcome: OutcomeString | None


def multiplicative_error(
    p: Mapping[OutcomeString, float], p_ap: Mapping[OutcomeString, float]
) -> ErrorReport:
    """Smallest c with P/c <= P_ap <= c*P pointwise; inf on support mismatch.

    Outcomes where both distributions vanish contribute nothing (the
    sandwich is vacuous there).
    """
    if set(p) != set(p_ap):
        raise ValueError("distributions must share one outcome domain")
    worst = 1.0
    worst_outcome: OutcomeString | None = None
    for outcome, value in p.items():
        approx = p_ap[outcome]
        exact_zero = value <= ZERO_THRESHOLD
        approx_zero = approx <= ZERO_THRESHOLD
        if exact_zero and approx_zero:
            continue
        if exact_zero or approx_zero:
            return ErrorReport(c=math.inf, worst_outcome=outcome)
        ratio = max(value / approx, approx / value)
        if ratio > worst:
            worst = ratio
            worst_outcome = outcome
    return ErrorReport(c=worst, worst_outcome=worst_outcome)


def epsilon_budget(n: int) -> float:
    """Per-step error bound (2^(1/2n) - 1) / (2^(1/2n) + 1).

    Composing n copies of this bound gives exactly sqrt(2); for large n the
    bound behaves as ln(2) / (4n).
    """
    if n < 1:
        raise ValueError("qubit count must be positive")
    t = 2.0 ** (1.0 / (2.0 * n))
    return (t - 1.0) / (t + 1.0)


def per_step_error_compose(epsilons: Sequence[float]) -> float:
    """prod_k (1 + eps_k) / (1 - eps_k)."""
    factor = 1.0
    for eps in epsilons:
        if not 0.0 <= eps < 1.0:
            raise ValueError(f"per-step error {eps} outside [0, 1)")
        factor *= (1.0 + eps) / (1.0 - eps)
    return factor


def gate_norm_error(eps: float) -> float:
    """Squared operator norm of I - D(eps, S): 2 (1 - cos eps)."""
    return 2.0 * (1.0 - math.cos(eps))


__all__ = [
    "ErrorReport",
    "multiplicative_error",
    "epsilon_budget",
    "per_step_error_compose",
    "gate_norm_error",
    "ZERO_THRESHOLD",
]
