#!/usr/bin/env python3
"""
Write a seeded equicorrelated Gaussian statistic vector for the CLI.

Example:
    python3 scripts/generate_sample_data.py --n 1000 --rho 0.5 --n1 10 --mu 4 \
        --out sample_data/n1000_rho05.txt
"""

import argparse
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add src to path for imports
sys.path.append(str(Path(__file__).parent.parent))
from src.core.model import AlternativeConfig
from src.simulators.gaussian_generator import EquicorrelatedGenerator, write_vector
from src.utils.logging_config import setup_logging_from_env

load_dotenv()

logger = setup_logging_from_env(__name__)


def main():
    """Generate one vector and write it as newline-separated decimals."""
    parser = argparse.ArgumentParser(description="Write an equicorrelated Gaussian sample vector")
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--rho", type=float, required=True)
    parser.add_argument("--n1", type=int, default=0, help="leading false nulls")
    parser.add_argument("--mu", type=float, default=3.0, help="common false-null mean")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, required=True)
    args = parser.parse_args()

    try:
        alt = AlternativeConfig.homogeneous(args.n, args.n1, args.mu)
        generator = EquicorrelatedGenerator(args.n, rho=args.rho, alt=alt)
        values = generator.sample_keyed(args.seed, 0)
        write_vector(args.out, values)
        logger.info(f"Wrote {args.n} statistics (rho={args.rho}, n1={args.n1}, seed={args.seed}) to {args.out}")
    except Exception as e:
        logger.error(f"Failed to generate sample data: {e}")
        sys.exit(1)


if __name__ == "__main__":
    main()
