"""
Log-safe standard-normal primitives and Gumbel limit functions.

Every other module goes through this layer for Φ, φ and Φ⁻¹. Conventions:
- Powers Φⁿ are always evaluated as exp(n · log Φ), never by multiplication
- Upper-tail entry points take q = 1 − p directly; callers holding q = 1/n
  must not form 1 − q themselves
- b_n is exactly 1/a_n

All functions accept scalars or numpy arrays and return a float for scalar
input.
"""

import logging
import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy import special

from src.core.errors import DomainError, require_int_at_least

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_4PI = math.log(4.0 * math.pi)

# Newton refinements applied on top of the rational starting point
NEWTON_STEPS = 2


@dataclass(frozen=True)
class ExtremeSequenceTerm:
    """Centering and scaling constants for the maximum of n standard normals."""
    n: int
    a_n: float
    b_n: float


def _as_output(result: np.ndarray, template: ArrayLike) -> ArrayLike:
    if np.ndim(template) == 0:
        return float(result)
    return result


def log_normal_pdf(x: ArrayLike) -> ArrayLike:
    """log φ(x) = −x²/2 − ½ log 2π, finite for every finite x."""
    x_arr = np.asarray(x, dtype=float)
    return _as_output(-0.5 * x_arr * x_arr - _LOG_SQRT_2PI, x)


def normal_pdf(x: ArrayLike) -> ArrayLike:
    """Standard normal density φ(x)."""
    return _as_output(np.exp(log_normal_pdf(np.asarray(x, dtype=float))), x)


def normal_cdf(x: ArrayLike) -> ArrayLike:
    """Standard normal cdf Φ(x)."""
    return _as_output(special.ndtr(np.asarray(x, dtype=float)), x)


def normal_sf(x: ArrayLike) -> ArrayLike:
    """Upper tail 1 − Φ(x), computed as Φ(−x) without cancellation."""
    return _as_output(special.ndtr(-np.asarray(x, dtype=float)), x)


def log_normal_cdf(x: ArrayLike) -> ArrayLike:
    """log Φ(x); accurate deep in the lower tail (x = −40 gives ≈ −804.6084)."""
    return _as_output(special.log_ndtr(np.asarray(x, dtype=float)), x)


def log_normal_sf(x: ArrayLike) -> ArrayLike:
    """log(1 − Φ(x))."""
    return _as_output(special.log_ndtr(-np.asarray(x, dtype=float)), x)


def _lower_quantile(p: np.ndarray) -> np.ndarray:
    """
    Quantile for lower-tail probabilities p ∈ (0, 0.5].

    Starts from the Cephes rational approximation and polishes with Newton
    steps on log Φ(x) − log p, which stays well conditioned in the far tail.
    """
    x = special.ndtri(p)
    log_p = np.log(p)
    for _ in range(NEWTON_STEPS):
        log_cdf = special.log_ndtr(x)
        # f'(x) = φ(x) / Φ(x)
        slope = np.exp(-0.5 * x * x - _LOG_SQRT_2PI - log_cdf)
        x = x - (log_cdf - log_p) / slope
    return x


def _check_open_unit_array(values: np.ndarray, parameter: str) -> None:
    if not np.all((values > 0.0) & (values < 1.0)):
        bad = values[~((values > 0.0) & (values < 1.0))]
        raise DomainError(f"{parameter} must lie in (0, 1), got {bad.ravel()[0]!r}", parameter, bad.ravel()[0])


def inverse_normal_cdf(p: ArrayLike) -> ArrayLike:
    """
    Quantile Φ⁻¹(p) for a lower-tail probability p ∈ (0, 1).

    Args:
        p: Lower-tail probability (scalar or array)

    Returns:
        x with Φ(x) = p

    Raises:
        DomainError: if any p is outside (0, 1)
    """
    p_arr = np.atleast_1d(np.asarray(p, dtype=float))
    _check_open_unit_array(p_arr, "p")
    lower = p_arr <= 0.5
    result = np.empty_like(p_arr)
    result[lower] = _lower_quantile(p_arr[lower])
    # 1 − p is exact for p ∈ [0.5, 1)
    result[~lower] = -_lower_quantile(1.0 - p_arr[~lower])
    return _as_output(result.reshape(np.shape(p)), p)


def inverse_normal_sf(q: ArrayLike) -> ArrayLike:
    """
    Upper-tail quantile Φ⁻¹(1 − q) evaluated from q directly.

    Args:
        q: Upper-tail probability in (0, 1), e.g. 1/n or α/n

    Returns:
        x with 1 − Φ(x) = q
    """
    q_arr = np.atleast_1d(np.asarray(q, dtype=float))
    _check_open_unit_array(q_arr, "q")
    small = q_arr <= 0.5
    result = np.empty_like(q_arr)
    result[small] = -_lower_quantile(q_arr[small])
    result[~small] = _lower_quantile(1.0 - q_arr[~small])
    return _as_output(result.reshape(np.shape(q)) + 0.0, q)


def a_n_exact(n: int) -> float:
    """a_n = Φ⁻¹(1 − 1/n), the Gaussian extreme-value centering constant."""
    n = require_int_at_least(n, 2, "n")
    return inverse_normal_sf(1.0 / n)


def a_n_asymptotic(n: int) -> float:
    """√(2 log n) − (log log n + log 4π) / (2√(2 log n))."""
    n = require_int_at_least(n, 3, "n")
    root = math.sqrt(2.0 * math.log(n))
    return root - (math.log(math.log(n)) + _LOG_4PI) / (2.0 * root)


def b_n(n: int) -> float:
    """Scaling constant, taken as exactly 1/a_n."""
    n = require_int_at_least(n, 3, "n")
    return 1.0 / a_n_exact(n)


def extreme_sequence_term(n: int) -> ExtremeSequenceTerm:
    n = require_int_at_least(n, 3, "n")
    a = a_n_exact(n)
    return ExtremeSequenceTerm(n=n, a_n=a, b_n=1.0 / a)


def log_normal_cdf_power(x: ArrayLike, n: float) -> ArrayLike:
    """n · log Φ(x)."""
    return _as_output(n * special.log_ndtr(np.asarray(x, dtype=float)), x)


def normal_cdf_power(x: ArrayLike, n: float) -> ArrayLike:
    """Φⁿ(x) as exp(n · log Φ(x))."""
    return _as_output(np.exp(n * special.log_ndtr(np.asarray(x, dtype=float))), x)


def normal_max_exceedance(x: ArrayLike, n: float) -> ArrayLike:
    """1 − Φⁿ(x) without cancellation when Φⁿ(x) is close to 1."""
    return _as_output(-np.expm1(n * special.log_ndtr(np.asarray(x, dtype=float))), x)


def normalized_max_cdf(x: ArrayLike, n: int) -> ArrayLike:
    """Φⁿ(a_n + b_n x), which tends to gumbel_h(x)."""
    term = extreme_sequence_term(n)
    return normal_cdf_power(term.a_n + term.b_n * np.asarray(x, dtype=float), n)


def a_n_power_log(n: int, t: float) -> float:
    """n · log Φ(a_n + t); tends to −∞, −1 or 0 as t < 0, t = 0, t > 0."""
    return log_normal_cdf_power(a_n_exact(n) + t, n)


def phi_power_log(d: int, n: int, t: float) -> float:
    """d · log Φ(a_n + t) for a secondary exponent sequence d = d_n."""
    d = require_int_at_least(d, 1, "d")
    return log_normal_cdf_power(a_n_exact(n) + t, d)


def gumbel_h(x: ArrayLike) -> ArrayLike:
    """Gumbel cdf H(x) = exp(−e^{−x})."""
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        return _as_output(np.exp(-np.exp(-x_arr)), x)


def gumbel_hk(x: ArrayLike, k: int) -> ArrayLike:
    """
    Limit cdf of the normalised k-th largest value.

    H^{(k)}(x) = Σ_{i<k} e^{−(e^{−x} + i x)} / i!, which is the Poisson(e^{−x})
    cdf at k − 1.

    Args:
        x: Normalised threshold
        k: Rank of the extreme (k = 1 is the maximum)
    """
    k = require_int_at_least(k, 1, "k")
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore"):
        rate = np.exp(-x_arr)
    finite = np.isfinite(rate)
    # rate = inf means x → −∞ where the cdf is 0
    values = np.where(finite, special.pdtr(k - 1, np.where(finite, rate, 0.0)), 0.0)
    return _as_output(values, x)


def gumbel_hk_product_form(x: ArrayLike, k: int) -> ArrayLike:
    """H(x) · Σ_{i<k} (−log H(x))^i / i!, evaluated term by term."""
    k = require_int_at_least(k, 1, "k")
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        minus_log_h = np.exp(-x_arr)
        h = np.exp(-minus_log_h)
        term = np.ones_like(h)
        total = np.ones_like(h)
        for i in range(1, k):
            term = term * minus_log_h / i
            total = total + term
        # H underflows to 0 below x ≈ −6.6; the cdf is 0 there
        values = np.where(h > 0.0, h * total, 0.0)
    return _as_output(values, x)
