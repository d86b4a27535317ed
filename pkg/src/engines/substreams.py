"""
Keyed random substreams for reproducible, worker-count-independent sampling.

Each unit of work (a chunk of fast-scheme replications or one full-vector
replication) draws from its own generator:

    Generator(Philox(SeedSequence(seed, spawn_key=(stream, index))))

SeedSequence hashes (seed, stream, index) into the Philox key, so any unit can
be regenerated in isolation and the order in which workers pick up units has
no effect on the result.
"""

import logging

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from scipy import special

from src.core.errors import DomainError

logger = logging.getLogger(__name__)

STREAM_FAST_FWER = 1
STREAM_FAST_KFWER = 2
STREAM_FULL_VECTOR = 3
STREAM_DIRECT = 4
STREAM_DATA = 5

FAST_CHUNK = 8192
UNIFORM_BITS = 52
_UNIFORM_SCALE = 2.0 ** -UNIFORM_BITS
_SEED_LIMIT = 2 ** 64


def derive_seed(seed: int) -> int:
    """Validate a master seed as an unsigned 64-bit integer."""
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) < _SEED_LIMIT:
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}", "seed", seed)
    return int(seed)


def substream(seed: int, stream: int, index: int) -> Generator:
    return Generator(Philox(SeedSequence(derive_seed(seed), spawn_key=(int(stream), int(index)))))


def open_uniform(rng: Generator, size) -> np.ndarray:
    """Uniforms (k + ½)·2⁻⁵² with k uniform on [0, 2⁵²): never 0, never 1."""
    k = rng.integers(0, 2 ** UNIFORM_BITS, size=size, dtype=np.int64)
    return (k.astype(np.float64) + 0.5) * _UNIFORM_SCALE


def normals(rng: Generator, size) -> np.ndarray:
    """Standard normals by inverse-cdf transform; each variate consumes one uniform."""
    return special.ndtri(open_uniform(rng, size))


def chunk_bounds(reps: int, chunk: int = FAST_CHUNK):
    """(chunk_index, size) pairs covering reps replications."""
    return [(index, min(chunk, reps - start)) for index, start in enumerate(range(0, reps, chunk))]
