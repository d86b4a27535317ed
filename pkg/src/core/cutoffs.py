"""
Common-cutoff formulas for single-step procedures.

Argument order is (n, alpha, rho) everywhere:
- proposed_cutoff: √(1−ρ)·a_n − √ρ·Φ⁻¹(α), with ρ known or estimated
- bonferroni_cutoff: Φ⁻¹(1 − α/n)
- common_cutoff: either of the two, selected by CutoffKind
- block_beta / block_cutoffs: per-block level β = 1 − (1−α)^{1/m} and cutoffs
"""

import logging
import math
from enum import Enum
from typing import List, Optional

from src.core.errors import ArgumentError, require_correlation, require_int_at_least, require_open_unit
from src.core.model import BlockStructure
from src.core.special_functions import a_n_exact, inverse_normal_cdf, inverse_normal_sf

logger = logging.getLogger(__name__)


class CutoffKind(Enum):
    PROPOSED = "proposed"        # rho known or estimated
    BONFERRONI = "bonferroni"
    BLOCK = "block"              # one proposed cutoff per block


def proposed_cutoff(n: int, alpha: float, rho: float) -> float:
    """
    Cutoff c_n(α, ρ) of the proposed single-step procedure.

    ρ = 0 is admitted only so that the estimated-ρ procedure stays defined when
    the estimator clamps at zero; the asymptotic theory assumes ρ > 0.

    Args:
        n: Number of hypotheses (>= 2)
        alpha: Target level in (0, 1)
        rho: Equicorrelation in [0, 1)

    Returns:
        The common right-sided cutoff
    """
    n = require_int_at_least(n, 2, "n")
    alpha = require_open_unit(alpha, "alpha")
    rho = require_correlation(rho, "rho", allow_zero=True)
    return math.sqrt(1.0 - rho) * a_n_exact(n) - math.sqrt(rho) * inverse_normal_cdf(alpha)


def bonferroni_cutoff(n: int, alpha: float) -> float:
    """Φ⁻¹(1 − α/n), evaluated from the upper tail q = α/n."""
    n = require_int_at_least(n, 1, "n")
    alpha = require_open_unit(alpha, "alpha")
    return inverse_normal_sf(alpha / n)


def common_cutoff(kind: CutoffKind, n: int, alpha: float, rho: Optional[float] = None) -> float:
    """
    The single cutoff shared by all n statistics.

    Args:
        kind: PROPOSED or BONFERRONI; BLOCK has no common cutoff
        n: Number of hypotheses
        alpha: Target level in (0, 1)
        rho: Equicorrelation, required for PROPOSED and ignored by BONFERRONI

    Returns:
        The common right-sided cutoff
    """
    if kind is CutoffKind.BONFERRONI:
        return bonferroni_cutoff(n, alpha)
    if kind is CutoffKind.BLOCK:
        raise ArgumentError("block cutoffs differ per block; use block_cutoffs", "kind")
    if rho is None:
        raise ArgumentError("the proposed cutoff needs rho", "rho")
    return proposed_cutoff(n, alpha, rho)


def block_beta(alpha: float, m: int) -> float:
    """Per-block level β = 1 − (1 − α)^{1/m}, as −expm1(log1p(−α)/m)."""
    alpha = require_open_unit(alpha, "alpha")
    m = require_int_at_least(m, 1, "m")
    return -math.expm1(math.log1p(-alpha) / m)


def block_cutoffs(alpha: float, blocks: BlockStructure) -> List[float]:
    """Cutoff c_{k_j}(β, ρ_j) for every block j."""
    beta = block_beta(alpha, blocks.m)
    cutoffs = [proposed_cutoff(size, beta, rho) for size, rho in blocks.blocks]
    logger.debug(f"Block cutoffs for alpha={alpha}, m={blocks.m}: beta={beta:.6g}, cutoffs={cutoffs}")
    return cutoffs
