"""
Equicorrelated Gaussian data generator.

Produces test-statistic vectors from the one-factor model

    X_i = √ρ γ + √(1−ρ) W_i + μ_i

and, when a block structure is given, its block version with an optional
second shared factor η carrying cross-block correlation λ:

    X_i = √λ η + √(ρ_j − λ) γ_j + √(1−ρ_j) W_i + μ_i    (i in block j)
"""

import logging
import math
from pathlib import Path
from typing import Optional

import numpy as np
from numpy.random import Generator

from src.core.errors import ArgumentError, DomainError, require_correlation, require_int_at_least
from src.core.model import AlternativeConfig, BlockStructure
from src.engines.substreams import STREAM_DATA, normals, substream

logger = logging.getLogger(__name__)


class EquicorrelatedGenerator:
    """
    Draws one statistic vector per call from a fixed model.

    Randomness is consumed in a fixed order (η if λ > 0, then one γ per block,
    then the n idiosyncratic terms), so a substream always yields the same
    vector.
    """

    def __init__(
        self,
        n: int,
        rho: Optional[float] = None,
        alt: Optional[AlternativeConfig] = None,
        blocks: Optional[BlockStructure] = None,
        cross_rho: float = 0.0,
    ):
        """
        Args:
            n: Vector length
            rho: Equicorrelation in [0, 1) (ignored when blocks are given)
            alt: False-null means (default global null)
            blocks: Optional block structure covering all n indices
            cross_rho: Cross-block correlation λ, 0 <= λ <= min ρ_j
        """
        self.n = require_int_at_least(n, 1, "n")
        self.alt = alt or AlternativeConfig.global_null(self.n)
        if self.alt.n != self.n:
            raise ArgumentError(f"alternative has n = {self.alt.n}, generator has n = {self.n}", "alt")

        if blocks is None:
            if rho is None:
                raise ArgumentError("a data-generating rho is required without blocks", "rho")
            if cross_rho:
                raise ArgumentError("cross_rho needs a block structure", "cross_rho")
            blocks_rhos = [require_correlation(rho, "rho", allow_zero=True)]
            self._slices = [slice(0, self.n)]
        else:
            if blocks.n != self.n:
                raise ArgumentError(f"blocks cover n = {blocks.n}, generator has n = {self.n}", "blocks")
            blocks_rhos = list(blocks.rhos)
            self._slices = blocks.slices()

        cross_rho = float(cross_rho)
        if not (0.0 <= cross_rho <= min(blocks_rhos)):
            raise DomainError(f"cross_rho must lie in [0, min rho_j], got {cross_rho}", "cross_rho", cross_rho)

        self.cross_rho = cross_rho
        self._shared_scale = math.sqrt(cross_rho)
        self._block_scales = [math.sqrt(r - cross_rho) for r in blocks_rhos]
        self._noise_scales = np.empty(self.n)
        for block, r in zip(self._slices, blocks_rhos):
            self._noise_scales[block] = math.sqrt(1.0 - r)
        self._means = None if self.alt.is_global_null else self.alt.mean_vector()

    def sample(self, rng: Generator) -> np.ndarray:
        """One statistic vector of length n."""
        shared = normals(rng, 1)[0] * self._shared_scale if self.cross_rho > 0.0 else 0.0
        factors = normals(rng, len(self._slices))
        x = normals(rng, self.n) * self._noise_scales
        for block, scale, factor in zip(self._slices, self._block_scales, factors):
            x[block] += shared + scale * factor
        if self._means is not None:
            x += self._means
        return x

    def sample_keyed(self, seed: int, index: int) -> np.ndarray:
        """Vector number `index` of the data stream for `seed`."""
        return self.sample(substream(seed, STREAM_DATA, index))


def write_vector(path: Path, values: np.ndarray) -> None:
    """Newline-separated decimals, UTF-8, no header."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for value in values:
            handle.write(f"{float(value)!r}\n")
    logger.debug(f"Wrote {len(values)} statistics to {path}")

