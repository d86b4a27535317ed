"""
Quadrature rules for expectations over a standard normal latent factor.

A rule holds nodes z_i and weights w_i with the normal density already folded
into the weights, so that

    E[f(Z)] ≈ Σ w_i f(z_i),   Σ w_i = 1 (to ~1e−15 on the default grid).

Two kinds are available:
- COMPOSITE_LEGENDRE (default): Gauss–Legendre panels tiling [−12, 12]
- GAUSS_HERMITE: classical Hermite rule rescaled to the N(0, 1) measure
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermgauss
from numpy.polynomial.legendre import leggauss

from src.core.errors import ArgumentError, require_int_at_least

logger = logging.getLogger(__name__)

Z_LIMIT = 12.0
DEFAULT_PANELS = 256
DEFAULT_ORDER = 16
DEFAULT_HERMITE_ORDER = 120


class RuleKind(Enum):
    COMPOSITE_LEGENDRE = "composite-legendre"
    GAUSS_HERMITE = "gauss-hermite"


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and normal-weighted weights for E[f(Z)], Z ~ N(0, 1)."""
    nodes: np.ndarray
    weights: np.ndarray
    kind: RuleKind

    def __post_init__(self):
        if self.nodes.ndim != 1 or self.nodes.shape != self.weights.shape:
            raise ArgumentError("nodes and weights must be 1-D arrays of equal length", "rule")

    @property
    def size(self) -> int:
        return self.nodes.size

    def total_weight(self) -> float:
        return math.fsum(self.weights)

    def expectation(self, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
        """Σ w_i f(z_i) with compensated summation in fixed node order."""
        values = np.asarray(integrand(self.nodes), dtype=float)
        return math.fsum(self.weights * values)


@lru_cache(maxsize=8)
def composite_legendre_rule(
    panels: int = DEFAULT_PANELS,
    order: int = DEFAULT_ORDER,
    limit: float = Z_LIMIT,
) -> QuadratureRule:
    """
    Gauss–Legendre rule of the given order on each of `panels` equal panels of
    [−limit, limit], with weights multiplied by φ(z).

    Mass outside ±12 is below 1e−32 and is dropped.
    """
    panels = require_int_at_least(panels, 1, "panels")
    order = require_int_at_least(order, 1, "order")
    reference_nodes, reference_weights = leggauss(order)
    edges = np.linspace(-limit, limit, panels + 1)
    half_widths = 0.5 * np.diff(edges)
    midpoints = 0.5 * (edges[:-1] + edges[1:])

    nodes = (midpoints[:, None] + half_widths[:, None] * reference_nodes[None, :]).ravel()
    weights = (half_widths[:, None] * reference_weights[None, :]).ravel()
    weights = weights * np.exp(-0.5 * nodes * nodes) / math.sqrt(2.0 * math.pi)

    rule = QuadratureRule(nodes=nodes, weights=weights, kind=RuleKind.COMPOSITE_LEGENDRE)
    logger.debug(f"Built composite Legendre rule: {panels} panels x {order} nodes, total weight {rule.total_weight():.16f}")
    return rule


@lru_cache(maxsize=8)
def gauss_hermite_rule(order: int = DEFAULT_HERMITE_ORDER) -> QuadratureRule:
    """Hermite rule for ∫ e^{−x²} g(x) dx mapped by z = √2 x onto the N(0, 1) measure."""
    order = require_int_at_least(order, 1, "order")
    x, w = hermgauss(order)
    rule = QuadratureRule(nodes=math.sqrt(2.0) * x, weights=w / math.sqrt(math.pi), kind=RuleKind.GAUSS_HERMITE)
    logger.debug(f"Built Gauss-Hermite rule of order {order}, total weight {rule.total_weight():.16f}")
    return rule


def default_rule() -> QuadratureRule:
    return composite_legendre_rule()


def refined_rule(rule: QuadratureRule) -> QuadratureRule:
    """The same family with twice as many nodes; used for convergence checks."""
    if rule.kind is RuleKind.GAUSS_HERMITE:
        return gauss_hermite_rule(2 * rule.size)
    return composite_legendre_rule(panels=2 * (rule.size // DEFAULT_ORDER), order=DEFAULT_ORDER)
