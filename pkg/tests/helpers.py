"""Standard-error helpers for Monte Carlo assertions."""

import math


def binomial_se(p: float, reps: int) -> float:
    return math.sqrt(p * (1.0 - p) / reps)


def combined_se(p: float, *reps: int) -> float:
    """Standard error of the difference of independent proportions with common mean p."""
    return math.sqrt(sum(p * (1.0 - p) / r for r in reps))
