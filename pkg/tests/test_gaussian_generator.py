"""
Tests for the equicorrelated data generator.
"""

import numpy as np
import pytest

from src.core.errors import ArgumentError, DomainError
from src.core.model import AlternativeConfig, BlockStructure
from src.simulators.gaussian_generator import EquicorrelatedGenerator, write_vector


def test_keyed_samples_are_reproducible():
    """Test that (seed, index) pins the vector."""
    generator = EquicorrelatedGenerator(100, rho=0.5)
    np.testing.assert_array_equal(generator.sample_keyed(1, 2), generator.sample_keyed(1, 2))
    assert not np.array_equal(generator.sample_keyed(1, 2), generator.sample_keyed(1, 3))


def test_sample_moments():
    """Test unit variances and pairwise correlation ρ over many vectors."""
    generator = EquicorrelatedGenerator(4, rho=0.6)
    draws = np.array([generator.sample_keyed(0, index) for index in range(20000)])
    np.testing.assert_allclose(draws.var(axis=0), 1.0, atol=0.05)
    correlation = np.corrcoef(draws.T)
    off_diagonal = correlation[~np.eye(4, dtype=bool)]
    np.testing.assert_allclose(off_diagonal, 0.6, atol=0.03)


def test_means_are_added_to_false_nulls():
    """Test the shift carried by false nulls."""
    alt = AlternativeConfig.homogeneous(1000, 500, 100.0)
    x = EquicorrelatedGenerator(1000, rho=0.3, alt=alt).sample_keyed(0, 0)
    assert x[:500].min() > x[500:].max()


def test_blocks_are_uncorrelated_without_cross_rho():
    """Test independence across blocks and λ between blocks."""
    blocks = BlockStructure(((2, 0.5), (2, 0.5)))
    independent = EquicorrelatedGenerator(4, blocks=blocks)
    linked = EquicorrelatedGenerator(4, blocks=blocks, cross_rho=0.3)
    a = np.array([independent.sample_keyed(0, i) for i in range(20000)])
    b = np.array([linked.sample_keyed(0, i) for i in range(20000)])
    assert abs(np.corrcoef(a[:, 0], a[:, 2])[0, 1]) < 0.03
    assert np.corrcoef(b[:, 0], b[:, 2])[0, 1] == pytest.approx(0.3, abs=0.03)
    assert np.corrcoef(b[:, 0], b[:, 1])[0, 1] == pytest.approx(0.5, abs=0.03)


def test_generator_validation():
    """Test missing ρ, size mismatches and λ outside [0, min ρ_j]."""
    with pytest.raises(ArgumentError):
        EquicorrelatedGenerator(10)
    with pytest.raises(ArgumentError):
        EquicorrelatedGenerator(10, rho=0.5, cross_rho=0.1)
    with pytest.raises(ArgumentError):
        EquicorrelatedGenerator(10, rho=0.5, alt=AlternativeConfig.global_null(9))
    with pytest.raises(DomainError):
        EquicorrelatedGenerator(4, blocks=BlockStructure(((2, 0.5), (2, 0.2))), cross_rho=0.3)


def test_write_vector(tmp_path):
    """Test one repr-formatted decimal per line."""
    path = tmp_path / "nested" / "x.txt"
    write_vector(path, np.array([1.5, -0.25]))
    assert path.read_text(encoding="utf-8") == "1.5\n-0.25\n"
