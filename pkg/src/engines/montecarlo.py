"""
Seeded Monte Carlo engines for FWER, k-FWER and disjunctive power.

Schemes:
- FAST_H0: conditional scheme under the global null with known ρ. Given the
  shared factor γ, the maximum of n0 statistics is drawn in one shot as
  U = Φ⁻¹(V^{1/n0}) and compared with (c + √ρ γ)/√(1−ρ). The k-FWER variant
  draws the exceedance count Binomial(n0, p(γ)) instead.
- FULL_VECTOR: generates the whole statistic vector per replication and runs
  the configured procedure on it (estimated ρ, alternatives, blocks, power).

Work units draw from keyed substreams (see substreams.py) and return integer
counts, so estimates do not depend on the number of worker threads.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from src.core.cutoffs import common_cutoff, proposed_cutoff
from src.core.errors import ArgumentError, require_correlation, require_int_at_least
from src.core.model import (
    AlternativeConfig,
    BlockStructure,
    CorrelationKnowledge,
    EstimateWithError,
    ProcedureConfig,
)
from src.core.procedures import ProcedureKind, apply_procedure
from src.core.special_functions import inverse_normal_sf
from src.engines.substreams import (
    FAST_CHUNK,
    STREAM_DIRECT,
    STREAM_FAST_FWER,
    STREAM_FAST_KFWER,
    STREAM_FULL_VECTOR,
    chunk_bounds,
    derive_seed,
    normals,
    open_uniform,
    substream,
)
from src.simulators.gaussian_generator import EquicorrelatedGenerator

logger = logging.getLogger(__name__)

DEFAULT_FAST_REPS = 100_000
DEFAULT_FULL_REPS = 10_000
FULL_VECTOR_BATCH = 64
DIRECT_MAX_N = 50


class Metric(Enum):
    FWER = "fwer"
    KFWER = "kfwer"
    ANYPWR = "anypwr"


class Scheme(Enum):
    FAST_H0 = "fast-h0"
    FULL_VECTOR = "full-vector"


@dataclass(frozen=True)
class SimulationPlan:
    """
    Everything one simulation run needs.

    data_rho is the equicorrelation that generates the data; it defaults to
    the known ρ of the config and must be given when the procedure estimates
    ρ. With blocks, the block correlations generate the data instead.
    """
    config: ProcedureConfig
    alt: Optional[AlternativeConfig] = None
    blocks: Optional[BlockStructure] = None
    metric: Metric = Metric.FWER
    k: int = 1
    reps: int = DEFAULT_FULL_REPS
    seed: int = 0
    scheme: Scheme = Scheme.FULL_VECTOR
    procedure: Optional[ProcedureKind] = None
    data_rho: Optional[float] = None
    cross_rho: float = 0.0
    workers: int = field(default=1, compare=False)

    def __post_init__(self):
        n = self.config.n
        if self.alt is None:
            object.__setattr__(self, "alt", AlternativeConfig.global_null(n))
        if self.data_rho is None and self.config.rho.is_known:
            object.__setattr__(self, "data_rho", self.config.rho.rho)
        object.__setattr__(self, "reps", require_int_at_least(self.reps, 1, "reps"))
        object.__setattr__(self, "seed", derive_seed(self.seed))
        object.__setattr__(self, "workers", require_int_at_least(self.workers, 1, "workers"))
        if self.procedure is None:
            object.__setattr__(self, "procedure", self._default_procedure())
        self.validate()

    def _default_procedure(self) -> ProcedureKind:
        if self.blocks is not None:
            return ProcedureKind.TEST_III
        return ProcedureKind.TEST_I if self.config.rho.is_known else ProcedureKind.TEST_II

    def validate(self) -> None:
        n = self.config.n
        if self.alt.n != n:
            raise ArgumentError(f"alternative has n = {self.alt.n} but config has n = {n}", "alt")
        if self.blocks is not None and self.blocks.n != n:
            raise ArgumentError(f"blocks cover n = {self.blocks.n} but config has n = {n}", "blocks")
        if self.procedure is ProcedureKind.TEST_III and self.blocks is None:
            raise ArgumentError("the block procedure needs a block structure", "blocks")
        if self.procedure is ProcedureKind.TEST_I and not self.config.rho.is_known:
            raise ArgumentError("the known-rho procedure needs a known rho", "rho")
        if self.blocks is None and self.data_rho is None:
            raise ArgumentError("a data-generating rho is required when rho is estimated", "data_rho")
        if self.cross_rho and self.blocks is None:
            raise ArgumentError("cross_rho needs a block structure", "cross_rho")

        if self.metric is Metric.KFWER:
            k = require_int_at_least(self.k, 1, "k")
            if k > self.alt.n0:
                raise ArgumentError(f"k = {k} exceeds the {self.alt.n0} true nulls", "k", k)
        if self.metric is Metric.ANYPWR and self.alt.n1 == 0:
            raise ArgumentError("power needs at least one false null", "alt")

        if self.scheme is Scheme.FAST_H0:
            if not self.alt.is_global_null:
                raise ArgumentError("the fast scheme runs under the global null only", "alt")
            if not self.config.rho.is_known:
                raise ArgumentError("the fast scheme needs a known rho", "rho")
            if self.metric not in (Metric.FWER, Metric.KFWER):
                raise ArgumentError("the fast scheme estimates FWER or k-FWER only", "metric")
            if self.blocks is not None:
                raise ArgumentError("the fast scheme does not support blocks", "blocks")
            if self.procedure not in (ProcedureKind.TEST_I, ProcedureKind.BONFERRONI):
                raise ArgumentError(
                    f"the fast scheme runs test-i or bonferroni, not {self.procedure.value}", "procedure"
                )

    @property
    def threshold(self) -> int:
        """Error count at which a replication counts as a success."""
        return self.k if self.metric is Metric.KFWER else 1


def _run_units(task: Callable[[Tuple[int, int]], int], units: Sequence[Tuple[int, int]], workers: int) -> int:
    """Sum integer counts over work units, serially or on a thread pool."""
    if workers == 1 or len(units) == 1:
        return sum(task(unit) for unit in units)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(task, units))


def _fast_fwer_chunk(n0: int, cutoff: float, rho: float, seed: int, unit: Tuple[int, int]) -> int:
    index, size = unit
    rng = substream(seed, STREAM_FAST_FWER, index)
    gamma = normals(rng, size)
    v = open_uniform(rng, size)
    # q = 1 − V^{1/n0} without forming V^{1/n0}, which rounds to 1 for large n0
    q = -np.expm1(np.log(v) / n0)
    maximum = inverse_normal_sf(q)
    threshold = (cutoff + math.sqrt(rho) * gamma) / math.sqrt(1.0 - rho)
    return int(np.count_nonzero(maximum > threshold))


def _fast_kfwer_chunk(n0: int, k: int, cutoff: float, rho: float, seed: int, unit: Tuple[int, int]) -> int:
    index, size = unit
    rng = substream(seed, STREAM_FAST_KFWER, index)
    gamma = normals(rng, size)
    exceed_probability = special.ndtr(-(cutoff + math.sqrt(rho) * gamma) / math.sqrt(1.0 - rho))
    exceedances = rng.binomial(n0, exceed_probability)
    return int(np.count_nonzero(exceedances >= k))


def simulate_fwer_fast(
    n: int,
    alpha: float,
    rho: float,
    reps: int = DEFAULT_FAST_REPS,
    seed: int = 0,
    n0: Optional[int] = None,
    cutoff: Optional[float] = None,
    workers: int = 1,
) -> EstimateWithError:
    """
    FWER of the known-ρ procedure under the global null by the conditional scheme.

    Args:
        n: Number of hypotheses (sets the cutoff)
        alpha: Target level
        rho: Known equicorrelation in (0, 1)
        reps: Replications
        seed: Master seed
        n0: True nulls entering the maximum (default n)
        cutoff: Override for the common cutoff (default proposed_cutoff(n, alpha, rho))
        workers: Worker threads

    Returns:
        Proportion of replications with at least one false rejection
    """
    rho = require_correlation(rho, "rho")
    cutoff = proposed_cutoff(n, alpha, rho) if cutoff is None else float(cutoff)
    n = require_int_at_least(n, 2, "n")
    n0 = n if n0 is None else require_int_at_least(n0, 1, "n0")
    reps = require_int_at_least(reps, 1, "reps")
    seed = derive_seed(seed)
    workers = require_int_at_least(workers, 1, "workers")

    start = time.perf_counter()
    units = chunk_bounds(reps, FAST_CHUNK)
    successes = _run_units(lambda unit: _fast_fwer_chunk(n0, cutoff, rho, seed, unit), units, workers)
    result = EstimateWithError.from_count(successes, reps, seed)
    logger.info(
        f"Fast FWER n={n}, alpha={alpha}, rho={rho}: {result.estimate:.6g} (se {result.std_error:.2g}, "
        f"{reps} reps, {time.perf_counter() - start:.2f}s)"
    )
    return result


def simulate_kfwer_fast(
    n: int,
    k: int,
    alpha: float,
    rho: float,
    reps: int = DEFAULT_FAST_REPS,
    seed: int = 0,
    n0: Optional[int] = None,
    cutoff: Optional[float] = None,
    workers: int = 1,
) -> EstimateWithError:
    """k-FWER under the global null: per replication, Binomial(n0, p(γ)) >= k."""
    rho = require_correlation(rho, "rho")
    cutoff = proposed_cutoff(n, alpha, rho) if cutoff is None else float(cutoff)
    n = require_int_at_least(n, 2, "n")
    n0 = n if n0 is None else require_int_at_least(n0, 1, "n0")
    k = require_int_at_least(k, 1, "k")
    if k > n0:
        raise ArgumentError(f"k = {k} exceeds n0 = {n0}", "k", k)
    reps = require_int_at_least(reps, 1, "reps")
    seed = derive_seed(seed)
    workers = require_int_at_least(workers, 1, "workers")

    start = time.perf_counter()
    units = chunk_bounds(reps, FAST_CHUNK)
    successes = _run_units(lambda unit: _fast_kfwer_chunk(n0, k, cutoff, rho, seed, unit), units, workers)
    result = EstimateWithError.from_count(successes, reps, seed)
    logger.info(
        f"Fast k-FWER n={n}, k={k}, alpha={alpha}, rho={rho}: {result.estimate:.6g} "
        f"(se {result.std_error:.2g}, {reps} reps, {time.perf_counter() - start:.2f}s)"
    )
    return result


class _FullVectorRunner:
    """Runs the configured procedure on freshly generated vectors."""

    def __init__(self, plan: SimulationPlan):
        self.plan = plan
        self.generator = EquicorrelatedGenerator(
            plan.config.n,
            rho=plan.data_rho,
            alt=plan.alt,
            blocks=plan.blocks,
            cross_rho=plan.cross_rho,
        )
        self.procedure_rho = plan.config.rho.rho

    def _replication(self, index: int) -> bool:
        plan = self.plan
        x = self.generator.sample(substream(plan.seed, STREAM_FULL_VECTOR, index))
        summary = apply_procedure(
            x, plan.procedure, plan.config.alpha, rho=self.procedure_rho, blocks=plan.blocks, alt=plan.alt
        )
        if plan.metric is Metric.ANYPWR:
            return summary.s_n >= 1
        return summary.v_n >= plan.threshold

    def count(self, unit: Tuple[int, int]) -> int:
        start, size = unit
        return sum(self._replication(index) for index in range(start, start + size))


def simulate_full(plan: SimulationPlan) -> EstimateWithError:
    """
    Estimate the plan's metric by full-vector simulation.

    Every replication generates X from the one-factor (or block) model,
    applies the procedure (estimating ρ first for TEST_II) and records whether
    the metric's event happened.
    """
    if plan.scheme is Scheme.FAST_H0:
        n, alpha, rho = plan.config.n, plan.config.alpha, plan.config.rho.rho
        cutoff = common_cutoff(plan.procedure.cutoff_kind, n, alpha, rho)
        if plan.metric is Metric.KFWER:
            return simulate_kfwer_fast(n, plan.k, alpha, rho, plan.reps, plan.seed, cutoff=cutoff,
                                       workers=plan.workers)
        return simulate_fwer_fast(n, alpha, rho, plan.reps, plan.seed, cutoff=cutoff, workers=plan.workers)

    start = time.perf_counter()
    runner = _FullVectorRunner(plan)
    units = [(begin, min(FULL_VECTOR_BATCH, plan.reps - begin)) for begin in range(0, plan.reps, FULL_VECTOR_BATCH)]
    successes = _run_units(runner.count, units, plan.workers)
    result = EstimateWithError.from_count(successes, plan.reps, plan.seed)
    logger.info(
        f"Full-vector {plan.metric.value} ({plan.procedure.value}) n={plan.config.n}, alpha={plan.config.alpha}, "
        f"rho={plan.config.rho.to_text()}: {result.estimate:.6g} (se {result.std_error:.2g}, "
        f"{plan.reps} reps, {time.perf_counter() - start:.2f}s)"
    )
    return result


def simulate_block_fwer(
    blocks: BlockStructure,
    alpha: float,
    per_block_alt: Optional[AlternativeConfig] = None,
    reps: int = DEFAULT_FULL_REPS,
    seed: int = 0,
    cross_rho: float = 0.0,
    workers: int = 1,
) -> EstimateWithError:
    """
    FWER of the block procedure.

    Args:
        blocks: Block structure; block j holds the next k_j indices
        alpha: Target level
        per_block_alt: False-null means over the concatenated index space
        reps: Replications
        seed: Master seed
        cross_rho: Extra correlation λ shared by all statistics across blocks
        workers: Worker threads
    """
    plan = SimulationPlan(
        config=ProcedureConfig(n=blocks.n, alpha=alpha, rho=CorrelationKnowledge.estimate()),
        alt=per_block_alt,
        blocks=blocks,
        metric=Metric.FWER,
        reps=reps,
        seed=seed,
        scheme=Scheme.FULL_VECTOR,
        procedure=ProcedureKind.TEST_III,
        cross_rho=cross_rho,
        workers=workers,
    )
    return simulate_full(plan)


def simulate_power(plan: SimulationPlan) -> EstimateWithError:
    """Disjunctive power: proportion of replications with s_n >= 1."""
    if plan.metric is not Metric.ANYPWR:
        raise ArgumentError(f"power simulation needs metric anypwr, got {plan.metric.value}", "metric")
    if plan.alt.n1 == 0:
        raise ArgumentError("power needs at least one false null", "alt")
    return simulate_full(plan)


def equicorrelation_cholesky(n: int, rho: float) -> np.ndarray:
    """Lower Cholesky factor of (1 − ρ) I + ρ 11ᵀ."""
    covariance = np.full((n, n), rho) + (1.0 - rho) * np.eye(n)
    return np.linalg.cholesky(covariance)


def _direct_chunk(factor: np.ndarray, cutoff: float, seed: int, unit: Tuple[int, int]) -> int:
    index, size = unit
    rng = substream(seed, STREAM_DIRECT, index)
    z = normals(rng, (size, factor.shape[0]))
    x = z @ factor.T
    return int(np.count_nonzero(x.max(axis=1) > cutoff))


def simulate_fwer_direct(
    n: int,
    alpha: float,
    rho: float,
    reps: int = DEFAULT_FAST_REPS,
    seed: int = 0,
    cutoff: Optional[float] = None,
    workers: int = 1,
) -> EstimateWithError:
    """
    Brute-force FWER under the global null from full multivariate normal draws.

    Uses a Cholesky factor of the equicorrelation matrix, without the
    one-factor conditioning; limited to n <= 50.
    """
    n = require_int_at_least(n, 2, "n")
    if n > DIRECT_MAX_N:
        raise ArgumentError(f"direct sampling is limited to n <= {DIRECT_MAX_N}, got {n}", "n", n)
    rho = require_correlation(rho, "rho")
    cutoff = proposed_cutoff(n, alpha, rho) if cutoff is None else float(cutoff)
    reps = require_int_at_least(reps, 1, "reps")
    seed = derive_seed(seed)
    factor = equicorrelation_cholesky(n, rho)
    units = chunk_bounds(reps, FAST_CHUNK)
    successes = _run_units(lambda unit: _direct_chunk(factor, cutoff, seed, unit), units,
                           require_int_at_least(workers, 1, "workers"))
    result = EstimateWithError.from_count(successes, reps, seed)
    logger.info(f"Direct FWER n={n}, alpha={alpha}, rho={rho}: {result.estimate:.6g} ({reps} reps)")
    return result


def bonferroni_power_plan(plan: SimulationPlan) -> SimulationPlan:
    """The same plan with the Bonferroni cutoff in place of the proposed one."""
    return replace(plan, procedure=ProcedureKind.BONFERRONI)
