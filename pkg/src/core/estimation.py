"""
Paired-difference estimator of the equicorrelation.

Consecutive entries are paired (x₁,x₂), (x₃,x₄), …; with odd n the final
entry is ignored, so m = ⌊n/2⌋ pairs are used. Each pair contributes
Y_i = 1 − (x_{2i−1} − x_{2i})²/2 and the estimate is max(0, mean Y_i).
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from src.core.errors import ArgumentError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RhoEstimate:
    """Clamped estimate, number of pairs used, and the unclamped mean."""
    value: float
    m: int
    raw_mean: float


def rho_hat_star(x: Union[Sequence[float], np.ndarray]) -> RhoEstimate:
    """
    Estimate ρ from one data vector.

    Args:
        x: Test statistics, length n >= 2, all finite

    Returns:
        RhoEstimate with value = max(0, raw_mean) and m = ⌊n/2⌋

    Raises:
        ArgumentError: for n < 2 or non-finite entries
    """
    values = np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ArgumentError(f"need a vector of at least 2 statistics, got shape {values.shape}", "x")
    if not np.all(np.isfinite(values)):
        raise ArgumentError("statistics must be finite", "x")

    m = values.size // 2
    differences = values[0:2 * m:2] - values[1:2 * m:2]
    raw_mean = 1.0 - 0.5 * float(np.mean(differences * differences))
    # raw_mean <= 1 since every Y_i <= 1
    assert raw_mean <= 1.0
    estimate = RhoEstimate(value=max(0.0, raw_mean), m=m, raw_mean=raw_mean)
    logger.debug(f"rho_hat_star over {m} pairs: raw_mean={raw_mean:.6g}, value={estimate.value:.6g}")
    return estimate


def consistency_tolerance(rho: float, n: int, z: float = 3.0) -> float:
    """
    z standard deviations of the mean of the Y_i under the null.

    Var(Y_i) = 2(1 − ρ)², so the sd of the mean over ⌊n/2⌋ pairs is
    √2 (1 − ρ) / √⌊n/2⌋.
    """
    return z * math.sqrt(2.0) * (1.0 - rho) / math.sqrt(n // 2)
