"""
Engines Module

Deterministic (quadrature) and stochastic (Monte Carlo) evaluation of FWER,
k-FWER and disjunctive power.
"""
