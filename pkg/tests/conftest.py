"""
Shared fixtures for the test suite.

Monte Carlo assertions compare against an oracle probability p and use the
binomial standard error computed from p (see helpers.py), not from the
estimate.
"""

import sys
from pathlib import Path

import pytest

# Add repository root to path
sys.path.append(str(Path(__file__).parent.parent))

SAMPLE_DATA = Path(__file__).parent.parent / "sample_data"


@pytest.fixture
def write_statistics(tmp_path):
    """Write newline-separated statistics to a temporary file and return its path."""
    def _write(values, name="data.txt"):
        path = tmp_path / name
        path.write_text("".join(f"{value!r}\n" for value in values), encoding="utf-8")
        return path
    return _write


@pytest.fixture
def sample_data_dir():
    return SAMPLE_DATA
