"""
Single-step test procedures applied to a concrete vector of statistics.

Every procedure rejects H_{0i} iff x[i] is strictly greater than the cutoff
that covers index i; a statistic equal to its cutoff is kept.
"""

import logging
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from src.core.cutoffs import CutoffKind, block_cutoffs, bonferroni_cutoff, proposed_cutoff
from src.core.errors import ArgumentError, require_int_at_least, require_open_unit
from src.core.estimation import rho_hat_star
from src.core.model import AlternativeConfig, BlockStructure, RejectionSummary, count_errors

logger = logging.getLogger(__name__)


class ProcedureKind(Enum):
    TEST_I = "test-i"            # known rho
    TEST_II = "test-ii"          # rho estimated from the same vector
    TEST_III = "test-iii"        # block-equicorrelated, per-block cutoffs
    BONFERRONI = "bonferroni"

    @classmethod
    def parse(cls, text: str) -> "ProcedureKind":
        normalized = text.strip().lower().replace("_", "-")
        for kind in cls:
            if kind.value == normalized:
                return kind
        raise ArgumentError(f"unknown procedure {text!r}", "procedure", text)

    @property
    def cutoff_kind(self) -> CutoffKind:
        if self is ProcedureKind.BONFERRONI:
            return CutoffKind.BONFERRONI
        if self is ProcedureKind.TEST_III:
            return CutoffKind.BLOCK
        return CutoffKind.PROPOSED


def apply_procedure(
    x: Union[Sequence[float], np.ndarray],
    kind: ProcedureKind,
    alpha: float,
    *,
    rho: Optional[float] = None,
    blocks: Optional[BlockStructure] = None,
    alt: Optional[AlternativeConfig] = None,
) -> RejectionSummary:
    """
    Run one procedure on a statistic vector.

    Args:
        x: Test statistics, length n >= 2
        kind: Which procedure to apply
        alpha: Target FWER level in (0, 1)
        rho: Known equicorrelation, required for TEST_I only
        blocks: Block structure, required for TEST_III only
        alt: Optional truth labels; when given, v_n and s_n are filled in

    Returns:
        RejectionSummary with the decision vector, cutoff(s) and ρ used
    """
    values = np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ArgumentError(f"need a vector of at least 2 statistics, got shape {values.shape}", "x")
    if not np.all(np.isfinite(values)):
        raise ArgumentError("statistics must be finite", "x")
    alpha = require_open_unit(alpha, "alpha")
    n = values.size

    if kind is ProcedureKind.TEST_I:
        if rho is None:
            raise ArgumentError("TEST_I needs a known rho", "rho")
        cutoff = proposed_cutoff(n, alpha, rho)
        rejected = values > cutoff
        cutoff_used, rho_used = cutoff, float(rho)
    elif kind is ProcedureKind.TEST_II:
        estimate = rho_hat_star(values)
        cutoff = proposed_cutoff(n, alpha, estimate.value)
        rejected = values > cutoff
        cutoff_used, rho_used = cutoff, estimate.value
    elif kind is ProcedureKind.TEST_III:
        if blocks is None:
            raise ArgumentError("TEST_III needs a block structure", "blocks")
        if blocks.n != n:
            raise ArgumentError(f"blocks cover n = {blocks.n} but the vector has length {n}", "blocks")
        cutoffs = block_cutoffs(alpha, blocks)
        rejected = np.empty(n, dtype=bool)
        for block, cutoff in zip(blocks.slices(), cutoffs):
            rejected[block] = values[block] > cutoff
        cutoff_used, rho_used = tuple(cutoffs), blocks.rhos
    elif kind is ProcedureKind.BONFERRONI:
        cutoff = bonferroni_cutoff(n, alpha)
        rejected = values > cutoff
        cutoff_used, rho_used = cutoff, float("nan")
    else:
        raise ArgumentError(f"unsupported procedure {kind!r}", "kind")

    v_n = s_n = None
    if alt is not None:
        v_n, s_n = count_errors(rejected, alt)

    summary = RejectionSummary(rejected=rejected, cutoff_used=cutoff_used, rho_used=rho_used, v_n=v_n, s_n=s_n)
    logger.debug(f"{kind.value}: n={n}, alpha={alpha}, rejected={summary.n_rejected}")
    return summary


def cutoff_vector(summary: RejectionSummary, blocks: Optional[BlockStructure] = None) -> np.ndarray:
    """Per-index cutoff, expanding per-block cutoffs when present."""
    n = summary.rejected.size
    if isinstance(summary.cutoff_used, tuple):
        if blocks is None:
            raise ArgumentError("per-block cutoffs need the block structure to expand", "blocks")
        expanded = np.empty(n)
        for block, cutoff in zip(blocks.slices(), summary.cutoff_used):
            expanded[block] = cutoff
        return expanded
    return np.full(n, float(summary.cutoff_used))


def kfwer_decision(summary: RejectionSummary, alt: AlternativeConfig, k: int) -> bool:
    """True iff the run made at least k false rejections (v_n >= k)."""
    k = require_int_at_least(k, 1, "k")
    v_n = summary.v_n
    if v_n is None:
        v_n, _ = count_errors(summary.rejected, alt)
    return v_n >= k
