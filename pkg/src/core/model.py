"""
Domain types shared by the procedures, the engines and the CLI.

Indices are 0-based throughout the Python API. The plain-text key-value
format used by the CLI (`key = value` per line) prints them 1-based.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.core.errors import (
    ArgumentError,
    DomainError,
    require_correlation,
    require_int_at_least,
    require_open_unit,
    require_probability,
)

logger = logging.getLogger(__name__)

ESTIMATE_TOKEN = "estimate"


@dataclass(frozen=True)
class CorrelationKnowledge:
    """Either a known equicorrelation ρ ∈ (0, 1) or a request to estimate it."""
    rho: Optional[float] = None

    def __post_init__(self):
        if self.rho is not None:
            object.__setattr__(self, "rho", require_correlation(self.rho, "rho"))

    @classmethod
    def known(cls, rho: float) -> "CorrelationKnowledge":
        return cls(rho=rho)

    @classmethod
    def estimate(cls) -> "CorrelationKnowledge":
        return cls(rho=None)

    @property
    def is_known(self) -> bool:
        return self.rho is not None

    def to_text(self) -> str:
        return ESTIMATE_TOKEN if self.rho is None else repr(self.rho)

    @classmethod
    def from_text(cls, text: str) -> "CorrelationKnowledge":
        text = text.strip()
        if text.lower() == ESTIMATE_TOKEN:
            return cls.estimate()
        return cls.known(_parse_float(text, "rho"))


@dataclass(frozen=True)
class ProcedureConfig:
    """Number of hypotheses, target level and what is known about ρ."""
    n: int
    alpha: float
    rho: CorrelationKnowledge = field(default_factory=CorrelationKnowledge.estimate)

    def __post_init__(self):
        object.__setattr__(self, "n", require_int_at_least(self.n, 2, "n"))
        object.__setattr__(self, "alpha", require_open_unit(self.alpha, "alpha"))
        if not isinstance(self.rho, CorrelationKnowledge):
            object.__setattr__(self, "rho", CorrelationKnowledge.known(self.rho))

    def to_text(self) -> str:
        return format_key_values({"n": str(self.n), "alpha": repr(self.alpha), "rho": self.rho.to_text()})

    @classmethod
    def from_text(cls, text: str) -> "ProcedureConfig":
        values = parse_key_values(text)
        missing = [key for key in ("n", "alpha", "rho") if key not in values]
        if missing:
            raise ArgumentError(f"config is missing keys: {', '.join(missing)}", missing[0])
        return cls(
            n=parse_count(values["n"], "n"),
            alpha=_parse_float(values["alpha"], "alpha"),
            rho=CorrelationKnowledge.from_text(values["rho"]),
        )


@dataclass(frozen=True)
class MeanSegment:
    """Indices start..stop-1 (0-based) all carry the same false-null mean mu."""
    start: int
    stop: int
    mu: float

    @property
    def size(self) -> int:
        return self.stop - self.start


@dataclass(frozen=True)
class AlternativeConfig:
    """
    Which null hypotheses are false and their means.

    Stored as sorted, disjoint segments of equal means so that configurations
    with n₁ in the hundreds of millions stay representable.
    """
    n: int
    segments: Tuple[MeanSegment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "n", require_int_at_least(self.n, 1, "n"))
        ordered = tuple(sorted(self.segments, key=lambda segment: segment.start))
        previous_stop = 0
        for segment in ordered:
            if segment.start < previous_stop or segment.stop <= segment.start or segment.stop > self.n:
                raise ArgumentError(
                    f"false-null indices must be distinct and within 0..{self.n - 1}", "false_null_means"
                )
            if not (math.isfinite(segment.mu) and segment.mu > 0.0):
                raise DomainError(f"false-null means must be > 0, got {segment.mu}", "mu", segment.mu)
            previous_stop = segment.stop
        object.__setattr__(self, "segments", ordered)

    @classmethod
    def global_null(cls, n: int) -> "AlternativeConfig":
        return cls(n=n)

    @classmethod
    def from_means(cls, n: int, means: Mapping[int, float]) -> "AlternativeConfig":
        """Build from a 0-based index → μ mapping."""
        for index in means:
            if not 0 <= int(index) < n:
                raise ArgumentError(f"index {index} outside 0..{n - 1}", "false_null_means", index)
        segments = tuple(MeanSegment(int(i), int(i) + 1, float(mu)) for i, mu in sorted(means.items()))
        return cls(n=n, segments=segments)

    @classmethod
    def homogeneous(cls, n: int, n1: int, mu: float) -> "AlternativeConfig":
        """The first n1 hypotheses are false with common mean mu."""
        n1 = require_int_at_least(n1, 0, "n1")
        if n1 > n:
            raise ArgumentError(f"n1 = {n1} exceeds n = {n}", "n1", n1)
        if n1 == 0:
            return cls.global_null(n)
        return cls(n=n, segments=(MeanSegment(0, n1, float(mu)),))

    @property
    def n1(self) -> int:
        return sum(segment.size for segment in self.segments)

    @property
    def n0(self) -> int:
        return self.n - self.n1

    @property
    def is_global_null(self) -> bool:
        return not self.segments

    @property
    def false_null_means(self) -> Dict[int, float]:
        return {i: segment.mu for segment in self.segments for i in range(segment.start, segment.stop)}

    def mean_groups(self) -> Dict[float, int]:
        """Distinct false-null means with their multiplicities."""
        groups: Dict[float, int] = {}
        for segment in self.segments:
            groups[segment.mu] = groups.get(segment.mu, 0) + segment.size
        return groups

    def mean_vector(self) -> np.ndarray:
        means = np.zeros(self.n)
        for segment in self.segments:
            means[segment.start:segment.stop] = segment.mu
        return means

    def true_null_mask(self) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        for segment in self.segments:
            mask[segment.start:segment.stop] = False
        return mask

    def true_nulls_per_block(self, blocks: "BlockStructure") -> List[int]:
        """k_{j0}: number of true nulls inside each block."""
        if blocks.n != self.n:
            raise ArgumentError(f"blocks cover n = {blocks.n} but the alternative has n = {self.n}", "blocks")
        counts = []
        for block in blocks.slices():
            false_in_block = sum(
                max(0, min(segment.stop, block.stop) - max(segment.start, block.start)) for segment in self.segments
            )
            counts.append(block.stop - block.start - false_in_block)
        return counts

    def means_to_text(self) -> str:
        """Comma-separated 1-based `index:mu` or `start-stop:mu` entries."""
        parts = []
        for segment in self.segments:
            if segment.size == 1:
                parts.append(f"{segment.start + 1}:{segment.mu!r}")
            else:
                parts.append(f"{segment.start + 1}-{segment.stop}:{segment.mu!r}")
        return ",".join(parts)

    def to_text(self) -> str:
        return format_key_values({"n": str(self.n), "false_null_means": self.means_to_text()})

    @classmethod
    def from_text(cls, text: str) -> "AlternativeConfig":
        values = parse_key_values(text)
        if "n" not in values:
            raise ArgumentError("alternative config is missing key: n", "n")
        n = parse_count(values["n"], "n")
        return cls(n=n, segments=parse_mean_segments(values.get("false_null_means", "")))


@dataclass(frozen=True)
class BlockStructure:
    """Contiguous blocks (k_j, ρ_j): block 1 holds the first k_1 indices, and so on."""
    blocks: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        if not self.blocks:
            raise ArgumentError("a block structure needs at least one block", "blocks")
        cleaned = []
        for size, rho in self.blocks:
            cleaned.append((require_int_at_least(size, 2, "k_j"), require_correlation(rho, "rho_j")))
        object.__setattr__(self, "blocks", tuple(cleaned))

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def n(self) -> int:
        return sum(size for size, _ in self.blocks)

    @property
    def sizes(self) -> Tuple[int, ...]:
        return tuple(size for size, _ in self.blocks)

    @property
    def rhos(self) -> Tuple[float, ...]:
        return tuple(rho for _, rho in self.blocks)

    def slices(self) -> List[slice]:
        bounds = []
        start = 0
        for size, _ in self.blocks:
            bounds.append(slice(start, start + size))
            start += size
        return bounds

    def to_text(self) -> str:
        return ",".join(f"{size}:{rho!r}" for size, rho in self.blocks)

    @classmethod
    def parse(cls, text: str) -> "BlockStructure":
        """Parse `k:rho,k:rho,...`; k accepts scientific notation such as 1e4."""
        blocks = []
        for item in _split_list(text):
            try:
                size_text, rho_text = item.split(":")
            except ValueError:
                raise ArgumentError(f"block entry {item!r} is not of the form k:rho", "blocks", item)
            blocks.append((parse_count(size_text, "k_j"), _parse_float(rho_text, "rho_j")))
        return cls(blocks=tuple(blocks))


@dataclass(frozen=True, eq=False)
class RejectionSummary:
    """Decisions of one procedure run, with error counts when truth labels are known."""
    rejected: np.ndarray
    cutoff_used: Union[float, Tuple[float, ...]]
    rho_used: Union[float, Tuple[float, ...]]
    v_n: Optional[int] = None
    s_n: Optional[int] = None

    @property
    def n_rejected(self) -> int:
        return int(np.count_nonzero(self.rejected))


@dataclass(frozen=True)
class EstimateWithError:
    """Monte Carlo proportion with its binomial standard error."""
    estimate: float
    std_error: float
    reps: int
    seed: int

    @classmethod
    def from_count(cls, successes: int, reps: int, seed: int) -> "EstimateWithError":
        reps = require_int_at_least(reps, 1, "reps")
        estimate = require_probability(successes / reps, "estimate")
        return cls(
            estimate=estimate,
            std_error=math.sqrt(estimate * (1.0 - estimate) / reps),
            reps=reps,
            seed=int(seed),
        )


def count_errors(rejected: Sequence[bool], alt: AlternativeConfig) -> Tuple[int, int]:
    """
    Count false and true rejections.

    Args:
        rejected: Boolean decision vector of length alt.n
        alt: Truth labels

    Returns:
        (v_n, s_n): rejections among true nulls, rejections among false nulls
    """
    rejected = np.asarray(rejected, dtype=bool)
    if rejected.shape != (alt.n,):
        raise ArgumentError(f"decision vector has length {rejected.size}, expected {alt.n}", "rejected")
    total = int(np.count_nonzero(rejected))
    s_n = sum(int(np.count_nonzero(rejected[segment.start:segment.stop])) for segment in alt.segments)
    return total - s_n, s_n


def parse_key_values(text: str) -> Dict[str, str]:
    """Parse `key = value` lines; blank lines and `#` comments are skipped."""
    values: Dict[str, str] = {}
    for line_number, raw_line in enumerate(text.splitlines(), 1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ArgumentError(f"line {line_number}: expected 'key = value', got {raw_line!r}", "config")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ArgumentError(f"line {line_number}: empty key", "config")
        values[key] = value
    return values


def format_key_values(values: Mapping[str, str]) -> str:
    return "".join(f"{key} = {value}\n" for key, value in values.items())


def parse_count(text: str, parameter: str) -> int:
    """Parse an integer count, accepting exact scientific notation such as 1e9."""
    text = str(text).strip()
    try:
        return int(text)
    except ValueError:
        pass
    value = _parse_float(text, parameter)
    if value != math.floor(value) or abs(value) > 2 ** 53:
        raise DomainError(f"{parameter} must be an integer, got {text!r}", parameter, text)
    return int(value)


def parse_mean_segments(text: str) -> Tuple[MeanSegment, ...]:
    segments = []
    for item in _split_list(text):
        try:
            index_text, mu_text = item.split(":")
        except ValueError:
            raise ArgumentError(f"mean entry {item!r} is not of the form index:mu", "false_null_means", item)
        mu = _parse_float(mu_text, "mu")
        if "-" in index_text:
            start_text, stop_text = index_text.split("-", 1)
            start, stop = parse_count(start_text, "index"), parse_count(stop_text, "index")
        else:
            start = stop = parse_count(index_text, "index")
        if start < 1 or stop < start:
            raise ArgumentError(f"invalid 1-based index range {index_text!r}", "false_null_means", index_text)
        segments.append(MeanSegment(start - 1, stop, mu))
    return tuple(segments)


def _split_list(text: str) -> Iterable[str]:
    return [item.strip() for item in text.split(",") if item.strip()]


def _parse_float(text: str, parameter: str) -> float:
    try:
        return float(str(text).strip())
    except ValueError:
        raise DomainError(f"{parameter} must be a number, got {text!r}", parameter, text)
