"""
Core Module

This module provides the statistical building blocks of the toolkit:
standard-normal primitives, domain types, cutoff formulas, the
paired-difference correlation estimator and the single-step test procedures.
"""
