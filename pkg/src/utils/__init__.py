"""
Utilities Module

This module provides shared utilities for the toolkit,
including logging configuration and signal handling.
"""
