#!/usr/bin/env python3
"""
Print the large-n behaviour of the extreme-value constants and of the
quadrature FWER, as a quick desk check of the limit statements. rho_band is
the 3-sigma band of the paired-difference estimator at each n.
"""

import math
import sys
from pathlib import Path

from dotenv import load_dotenv

# Add src to path for imports
sys.path.append(str(Path(__file__).parent.parent))
from src.core.cutoffs import bonferroni_cutoff, proposed_cutoff
from src.core.estimation import consistency_tolerance
from src.core.special_functions import a_n_asymptotic, a_n_exact, a_n_power_log
from src.engines.analytic import exact_fwer_equicorr
from src.utils.logging_config import setup_logging_from_env

load_dotenv()

logger = setup_logging_from_env(__name__)

SWEEP = (10 ** 3, 10 ** 5, 10 ** 7, 10 ** 9)


def check_limits(alpha: float = 0.05, rho: float = 0.5):
    print(f"{'n':>12} {'a_n':>10} {'gap':>10} {'nlogPhi(a_n)':>14} {'FWER_prop':>10} {'FWER_bonf':>10} "
          f"{'ratio_gap':>10} {'rho_band':>10}")
    for n in SWEEP:
        exact = a_n_exact(n)
        gap = exact - a_n_asymptotic(n)
        fwer_proposed = exact_fwer_equicorr(n, proposed_cutoff(n, alpha, rho), rho)
        fwer_bonferroni = exact_fwer_equicorr(n, bonferroni_cutoff(n, alpha), rho)
        ratio_gap = abs(proposed_cutoff(n, alpha, rho) / bonferroni_cutoff(n, alpha) - math.sqrt(1.0 - rho))
        print(f"{n:>12} {exact:>10.6f} {gap:>10.6f} {a_n_power_log(n, 0.0):>14.6f} "
              f"{fwer_proposed:>10.5f} {fwer_bonferroni:>10.5f} {ratio_gap:>10.5f} "
              f"{consistency_tolerance(rho, n):>10.6f}")


if __name__ == "__main__":
    try:
        check_limits()
    except Exception as e:
        logger.error(f"Limit check failed: {e}")
        sys.exit(1)
