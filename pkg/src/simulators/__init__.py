"""
Simulators Module

Seeded generators of equicorrelated Gaussian test statistics.
"""
