"""
Tests for the standard-normal primitives, extreme-value constants and
Gumbel limit functions.
"""

import math

import numpy as np
import pytest

from src.core.errors import DomainError
from src.core.special_functions import (
    a_n_asymptotic,
    a_n_exact,
    a_n_power_log,
    b_n,
    extreme_sequence_term,
    gumbel_h,
    gumbel_hk,
    gumbel_hk_product_form,
    inverse_normal_cdf,
    inverse_normal_sf,
    log_normal_cdf,
    log_normal_sf,
    normal_cdf,
    normal_cdf_power,
    normal_max_exceedance,
    normal_pdf,
    normal_sf,
    normalized_max_cdf,
    phi_power_log,
)


def test_normal_pdf_and_cdf_reference_values():
    """Test φ and Φ against closed-form reference values."""
    assert normal_pdf(0.0) == pytest.approx(1.0 / math.sqrt(2.0 * math.pi), rel=1e-15)
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-12)
    assert normal_sf(1.959963984540054) == pytest.approx(0.025, rel=1e-10)


def test_log_normal_cdf_deep_lower_tail():
    """Test that log Φ stays finite and accurate far in the lower tail."""
    assert log_normal_cdf(-40.0) == pytest.approx(-804.6084, abs=1e-3)
    assert log_normal_sf(40.0) == pytest.approx(-804.6084, abs=1e-3)
    assert math.isfinite(log_normal_cdf(-1e3))


def test_array_input_keeps_shape_and_scalar_returns_float():
    """Test that arrays keep their shape while scalars come back as float."""
    values = normal_cdf(np.array([[-1.0, 0.0], [1.0, 2.0]]))
    assert values.shape == (2, 2)
    assert isinstance(normal_cdf(0.3), float)
    assert isinstance(inverse_normal_cdf(0.3), float)


def test_inverse_normal_cdf_reference_values():
    """Test Φ⁻¹ against well-known quantiles."""
    assert inverse_normal_cdf(0.975) == pytest.approx(1.959963984540054, abs=1e-12)
    assert inverse_normal_cdf(0.05) == pytest.approx(-1.6448536269514722, abs=1e-12)
    assert inverse_normal_cdf(0.5) == pytest.approx(0.0, abs=1e-15)


def test_inverse_normal_cdf_far_tail_round_trip():
    """Test that quantiles of tiny probabilities reproduce the probability."""
    for p in (1e-300, 1e-100, 1e-20, 1e-9):
        x = inverse_normal_cdf(p)
        assert math.isfinite(x)
        assert normal_cdf(x) == pytest.approx(p, rel=1e-10)


def test_inverse_normal_sf_matches_upper_quantile():
    """Test that the upper-tail entry point agrees with Φ⁻¹(1 − q)."""
    assert inverse_normal_sf(0.025) == pytest.approx(1.959963984540054, abs=1e-12)
    assert normal_sf(inverse_normal_sf(1e-12)) == pytest.approx(1e-12, rel=1e-10)


def test_quantile_round_trip_on_both_halves():
    """Test x → Φ → Φ⁻¹ on [−8, 0] and x → 1 − Φ → upper quantile on [0, 8], within 1e−9."""
    lower = np.linspace(-8.0, 0.0, 81)
    np.testing.assert_allclose(inverse_normal_cdf(normal_cdf(lower)), lower, rtol=0, atol=1e-9)
    upper = np.linspace(0.0, 8.0, 81)
    np.testing.assert_allclose(inverse_normal_sf(normal_sf(upper)), upper, rtol=0, atol=1e-9)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_inverse_normal_cdf_rejects_out_of_domain(p):
    """Test that probabilities outside (0, 1) raise a domain error."""
    with pytest.raises(DomainError):
        inverse_normal_cdf(p)


def test_a_n_exact_reference_values():
    """Test a_n = Φ⁻¹(1 − 1/n) at n = 10⁵ and 10⁹."""
    assert a_n_exact(10 ** 5) == pytest.approx(4.2648908, abs=1e-6)
    assert a_n_exact(10 ** 9) == pytest.approx(5.9978070, abs=1e-6)
    assert a_n_exact(1e9) == a_n_exact(10 ** 9)


def test_a_n_exact_rejects_small_or_fractional_n():
    """Test the domain of a_n."""
    with pytest.raises(DomainError):
        a_n_exact(1)
    with pytest.raises(DomainError):
        a_n_exact(2.5)
    with pytest.raises(DomainError):
        a_n_asymptotic(2)


def test_a_n_asymptotic_gap_shrinks():
    """Test the asymptotic expansion gap: about 0.0153 at n = 10⁵ and shrinking."""
    gaps = [abs(a_n_exact(n) - a_n_asymptotic(n)) for n in (10 ** 3, 10 ** 5, 10 ** 9)]
    assert gaps[1] == pytest.approx(0.0153, abs=5e-4)
    assert gaps[0] > gaps[1] > gaps[2]


def test_b_n_is_reciprocal_of_a_n():
    """Test b_n = 1/a_n and the extreme-sequence factory."""
    assert b_n(1000) == 1.0 / a_n_exact(1000)
    term = extreme_sequence_term(1000)
    assert term.a_n == a_n_exact(1000)
    assert term.b_n == b_n(1000)
    with pytest.raises(DomainError):
        extreme_sequence_term(2)


@pytest.mark.parametrize("n", [10 ** 4, 10 ** 6, 10 ** 9])
def test_power_at_a_n_tends_to_inverse_e(n):
    """Test (1 − 1/n)ⁿ → e⁻¹, evaluated as Φⁿ(a_n)."""
    assert normal_cdf_power(a_n_exact(n), n) == pytest.approx(math.exp(-1.0), abs=0.01)


def test_normal_max_exceedance_is_complement_of_power():
    """Test 1 − Φⁿ(x) without cancellation."""
    x = 8.0
    exceedance = normal_max_exceedance(x, 10)
    assert exceedance == pytest.approx(10 * normal_sf(x), rel=1e-10)
    assert exceedance > 0.0


def test_power_log_three_case_limits():
    """Test n·log Φ(a_n + t) → −∞, −1, 0 for t < 0, t = 0, t > 0."""
    assert a_n_power_log(10 ** 9, -0.5) < a_n_power_log(10 ** 5, -0.5) < -5.0
    assert a_n_power_log(10 ** 9, -0.5) < -10.0
    assert a_n_power_log(10 ** 9, 0.0) == pytest.approx(-1.0, abs=1e-6)
    assert -0.1 < a_n_power_log(10 ** 9, 0.5) < 0.0
    assert a_n_power_log(10 ** 9, 0.5) > a_n_power_log(10 ** 5, 0.5)


def test_secondary_exponent_limit_vanishes():
    """Test d_n·log Φ(a_n + t) → 0 for d_n = ⌊n·exp(−√(2 log n))⌋ and t > −1."""
    def d(n):
        return int(math.floor(n * math.exp(-math.sqrt(2.0 * math.log(n)))))

    small = phi_power_log(d(10 ** 5), 10 ** 5, -0.5)
    large = phi_power_log(d(10 ** 9), 10 ** 9, -0.5)
    assert small < 0.0 and large < 0.0
    assert abs(large) < abs(small)
    assert abs(large) < 0.05


def test_normalized_max_cdf_approaches_gumbel():
    """Test Φⁿ(a_n + b_n x) → H(x), with the gap shrinking in n."""
    for x in (-1.0, 0.0, 1.0, 2.0):
        near = abs(normalized_max_cdf(x, 10 ** 9) - gumbel_h(x))
        far = abs(normalized_max_cdf(x, 10 ** 4) - gumbel_h(x))
        assert near < 0.02
        assert near <= far + 1e-12


def test_gumbel_reference_values():
    """Test H(0) = e⁻¹ and H⁽³⁾(0) = e⁻¹(1 + 1 + ½)."""
    assert gumbel_h(0.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    assert gumbel_hk(0.0, 1) == pytest.approx(math.exp(-1.0), rel=1e-14)
    assert gumbel_hk(0.0, 3) == pytest.approx(0.9196986, abs=1e-7)


def test_gumbel_hk_matches_product_form():
    """Test the Poisson form of H⁽ᵏ⁾ against the product-sum form."""
    x = np.linspace(-2.0, 5.0, 29)
    for k in range(1, 6):
        np.testing.assert_allclose(gumbel_hk(x, k), gumbel_hk_product_form(x, k), rtol=0, atol=1e-12)


def test_gumbel_hk_product_form_far_left_tail():
    """Test the product form is 0, not NaN, where H(x) underflows."""
    x = np.array([-10.0, -50.0, -800.0, -np.inf])
    for k in (1, 2, 5):
        values = gumbel_hk_product_form(x, k)
        assert not np.any(np.isnan(values))
        assert np.all(values == 0.0)
        np.testing.assert_allclose(gumbel_hk(x, k), values, rtol=0, atol=1e-300)
    assert gumbel_hk_product_form(-10.0, 2) == 0.0


def test_gumbel_hk_limits():
    """Test that H⁽ᵏ⁾ is a cdf: 0 at −∞, 1 at +∞, increasing in k."""
    assert gumbel_hk(-np.inf, 2) == 0.0
    assert gumbel_hk(50.0, 2) == pytest.approx(1.0, abs=1e-15)
    assert gumbel_hk(0.5, 1) < gumbel_hk(0.5, 2) < gumbel_hk(0.5, 3)
    with pytest.raises(DomainError):
        gumbel_hk(0.0, 0)
