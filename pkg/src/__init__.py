"""
Equicorrelated FWER Toolkit Source Package

This package contains single-step multiple-testing procedures for
equicorrelated and block-equicorrelated Gaussian statistics, together with
a quadrature engine and a Monte Carlo engine that evaluate their error rates.
"""

__version__ = "0.1.0"
