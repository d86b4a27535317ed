"""
Deterministic evaluation of FWER, k-FWER and disjunctive power.

Conditionally on the shared factor Z the statistics are independent, so every
quantity is a one-dimensional expectation over Z:

    X_i = √ρ Z + √(1−ρ) W_i + μ_i,
    P(X_i <= c | Z = z) = Φ((c + √ρ z − μ_i)/√(1−ρ)),

and products over i are sums of log Φ terms.

Exceedance probabilities are integrated directly as −expm1(Σ log Φ(·)), never
as 1 − E[Φⁿ], so values near 0 keep their relative accuracy.
"""

import logging
import math
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import special

from src.core.cutoffs import block_cutoffs
from src.core.errors import ArgumentError, DomainError, require_correlation, require_int_at_least
from src.core.model import AlternativeConfig, BlockStructure
from src.engines.quadrature import QuadratureRule, default_rule

logger = logging.getLogger(__name__)


def _standardized(cutoff: float, rho: float, z: np.ndarray, mu: float = 0.0) -> np.ndarray:
    return (cutoff + math.sqrt(rho) * z - mu) / math.sqrt(1.0 - rho)


def _clip_probability(value: float) -> float:
    return min(1.0, max(0.0, value))


def exact_fwer_equicorr(
    n: int,
    cutoff: float,
    rho: float,
    n0: Optional[int] = None,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """
    FWER of a common cutoff when n0 of the n hypotheses are true nulls.

    Args:
        n: Number of hypotheses
        cutoff: Common right-sided cutoff
        rho: Equicorrelation in (0, 1)
        n0: True nulls, 1 <= n0 <= n (default n, the global null)
        rule: Quadrature rule (default composite Legendre grid)

    Returns:
        1 − E_Z[Φ^{n0}((cutoff + √ρ Z)/√(1−ρ))]
    """
    n = require_int_at_least(n, 1, "n")
    n0 = n if n0 is None else require_int_at_least(n0, 1, "n0")
    if n0 > n:
        raise DomainError(f"n0 = {n0} exceeds n = {n}", "n0", n0)
    rho = require_correlation(rho, "rho")
    cutoff = float(cutoff)
    rule = rule or default_rule()

    def integrand(z: np.ndarray) -> np.ndarray:
        return -np.expm1(n0 * special.log_ndtr(_standardized(cutoff, rho, z)))

    return _clip_probability(rule.expectation(integrand))


def exact_kfwer_equicorr(
    n0: int,
    k: int,
    cutoff: float,
    rho: float,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """
    Probability of at least k false rejections among n0 true nulls.

    Given Z = z the exceedance count is Binomial(n0, p(z)) with
    p(z) = Φ̄((cutoff + √ρ z)/√(1−ρ)); its upper tail P(B >= k) is the
    regularised incomplete beta function, evaluated by scipy's bdtrc.
    """
    n0 = require_int_at_least(n0, 1, "n0")
    k = require_int_at_least(k, 1, "k")
    if k > n0:
        raise DomainError(f"k = {k} exceeds n0 = {n0}", "k", k)
    rho = require_correlation(rho, "rho")
    cutoff = float(cutoff)
    rule = rule or default_rule()

    def integrand(z: np.ndarray) -> np.ndarray:
        p = special.ndtr(-_standardized(cutoff, rho, z))
        return special.bdtrc(k - 1, n0, p)

    return _clip_probability(rule.expectation(integrand))


def exact_anypwr_from_groups(
    cutoff: float,
    rho: float,
    groups: Mapping[float, int],
    rule: Optional[QuadratureRule] = None,
) -> float:
    """
    P(at least one of the grouped coordinates exceeds the cutoff).

    Args:
        cutoff: Common cutoff
        rho: Equicorrelation in (0, 1)
        groups: Mean μ >= 0 → number of coordinates carrying it
        rule: Quadrature rule

    Returns:
        1 − E_Z[Π_groups Φ^{count}((cutoff + √ρ Z − μ)/√(1−ρ))]
    """
    rho = require_correlation(rho, "rho")
    cutoff = float(cutoff)
    cleaned = []
    for mu, count in groups.items():
        count = require_int_at_least(count, 1, "count")
        mu = float(mu)
        if not (math.isfinite(mu) and mu >= 0.0):
            raise DomainError(f"means must be finite and >= 0, got {mu}", "mu", mu)
        cleaned.append((mu, count))
    if not cleaned:
        raise DomainError("power is undefined without false nulls", "n1", 0)
    rule = rule or default_rule()

    def integrand(z: np.ndarray) -> np.ndarray:
        log_keep = np.zeros_like(z)
        for mu, count in cleaned:
            log_keep = log_keep + count * special.log_ndtr(_standardized(cutoff, rho, z, mu))
        return -np.expm1(log_keep)

    return _clip_probability(rule.expectation(integrand))


def exact_anypwr(cutoff: float, rho: float, alt: AlternativeConfig, rule: Optional[QuadratureRule] = None) -> float:
    """Disjunctive power: probability of rejecting at least one false null."""
    if alt.n1 == 0:
        raise DomainError("power is undefined under the global null (n1 = 0)", "n1", 0)
    return exact_anypwr_from_groups(cutoff, rho, alt.mean_groups(), rule)


def exact_fwer_block(
    blocks: BlockStructure,
    per_block_n0: Sequence[int],
    alpha: float,
    rule: Optional[QuadratureRule] = None,
) -> float:
    """
    FWER of the block procedure with independent blocks.

    Args:
        blocks: Block sizes and within-block correlations
        per_block_n0: True nulls in each block (0 <= n0_j <= k_j)
        alpha: Target level

    Returns:
        1 − Π_j (1 − FWER_j), FWER_j at the block cutoff with n0_j true nulls
    """
    counts = list(per_block_n0)
    if len(counts) != blocks.m:
        raise ArgumentError(f"{len(counts)} true-null counts given for {blocks.m} blocks", "per_block_n0")
    cutoffs = block_cutoffs(alpha, blocks)
    log_keep = []
    for j, ((size, rho), cutoff, n0) in enumerate(zip(blocks.blocks, cutoffs, counts)):
        n0 = require_int_at_least(n0, 0, "n0_j")
        if n0 > size:
            raise ArgumentError(f"block {j + 1} has {n0} true nulls but only {size} members", "per_block_n0")
        if n0 == 0:
            continue
        block_fwer = exact_fwer_equicorr(size, cutoff, rho, n0, rule)
        log_keep.append(math.log1p(-block_fwer) if block_fwer < 1.0 else -math.inf)
    result = -math.expm1(math.fsum(log_keep)) if log_keep else 0.0
    logger.debug(f"Block FWER over {blocks.m} blocks at alpha={alpha}: {result:.6g}")
    return _clip_probability(result)


def fwer_independent(n: int, cutoff: float) -> float:
    """1 − Φⁿ(cutoff), the ρ = 0 limit of the equicorrelated FWER."""
    n = require_int_at_least(n, 1, "n")
    return float(-np.expm1(n * special.log_ndtr(float(cutoff))))
