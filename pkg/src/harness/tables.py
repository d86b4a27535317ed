"""
Catalogue of the published FWER tables.

Tables 1–4: known ρ, fast scheme plus quadrature, n = 10⁵..10⁹.
Tables 5–8: ρ estimated from the data, full-vector scheme, n = 5000..20000.
Each entry carries the published value of every cell so the `table` command
can print it beside the new estimate.
"""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Tuple

import numpy as np
from numpy.random import SeedSequence

from src.core.errors import ArgumentError

TABLE_RHOS = (0.1, 0.3, 0.5, 0.7, 0.9)
KNOWN_RHO_NS = (10 ** 5, 10 ** 6, 10 ** 7, 10 ** 8, 10 ** 9)
ESTIMATED_RHO_NS = (5000, 10000, 15000, 20000)


@dataclass(frozen=True)
class TableCell:
    n: int
    rho: float
    published: float
    index: int


@dataclass(frozen=True)
class TableSpec:
    table_id: int
    alpha: float
    estimate_rho: bool
    ns: Tuple[int, ...]
    rhos: Tuple[float, ...]
    published_rows: Tuple[Tuple[float, ...], ...]

    @property
    def method(self) -> str:
        return "mc-full" if self.estimate_rho else "mc-fast"

    @property
    def caption(self) -> str:
        procedure = "estimated rho" if self.estimate_rho else "known rho"
        return f"Table {self.table_id}: FWER estimates, {procedure}, alpha={self.alpha}"

    def cells(self) -> Iterator[TableCell]:
        index = 0
        for n, row in zip(self.ns, self.published_rows):
            for rho, published in zip(self.rhos, row):
                yield TableCell(n=n, rho=rho, published=published, index=index)
                index += 1

    def published_value(self, n: int, rho: float) -> float:
        for cell in self.cells():
            if cell.n == n and cell.rho == rho:
                return cell.published
        raise ArgumentError(f"table {self.table_id} has no cell n={n}, rho={rho}", "cell")


_PUBLISHED_VALUES: Dict[int, Tuple[float, Tuple[Tuple[float, ...], ...]]] = {
    1: (0.15, (
        (0.28962, 0.21452, 0.18832, 0.17333, 0.15934),
        (0.27451, 0.20666, 0.18595, 0.16903, 0.16220),
        (0.26408, 0.20615, 0.17941, 0.17016, 0.15893),
        (0.25683, 0.19816, 0.17827, 0.16727, 0.15984),
        (0.24858, 0.19308, 0.17489, 0.16758, 0.15672),
    )),
    2: (0.10, (
        (0.22970, 0.15726, 0.13247, 0.11740, 0.10814),
        (0.21290, 0.14909, 0.12761, 0.11701, 0.10554),
        (0.20621, 0.14240, 0.12532, 0.11484, 0.10702),
        (0.19780, 0.14016, 0.12377, 0.11231, 0.10618),
        (0.18983, 0.13928, 0.12076, 0.11420, 0.10436),
    )),
    3: (0.05, (
        (0.15635, 0.08987, 0.07137, 0.06079, 0.05550),
        (0.14217, 0.08468, 0.06880, 0.06020, 0.05474),
        (0.13468, 0.08094, 0.06775, 0.06006, 0.05407),
        (0.12773, 0.07784, 0.06654, 0.05923, 0.05272),
        (0.11952, 0.07520, 0.06518, 0.05708, 0.05432),
    )),
    4: (0.01, (
        (0.06749, 0.02528, 0.01717, 0.01345, 0.01113),
        (0.05937, 0.02299, 0.01561, 0.01375, 0.01091),
        (0.05204, 0.02091, 0.01543, 0.01305, 0.01060),
        (0.04668, 0.01975, 0.01460, 0.01288, 0.01107),
        (0.04325, 0.01920, 0.01422, 0.01178, 0.01084),
    )),
    5: (0.15, (
        (0.3074, 0.2290, 0.1916, 0.1724, 0.1638),
        (0.3103, 0.2212, 0.1927, 0.1798, 0.1635),
        (0.3037, 0.2248, 0.1982, 0.1781, 0.1539),
        (0.3097, 0.2262, 0.1857, 0.1783, 0.1617),
    )),
    6: (0.10, (
        (0.2513, 0.1600, 0.1403, 0.1196, 0.1117),
        (0.2499, 0.1660, 0.1336, 0.1203, 0.1106),
        (0.2445, 0.1665, 0.1352, 0.1191, 0.1083),
        (0.2392, 0.1563, 0.1328, 0.1197, 0.1124),
    )),
    7: (0.05, (
        (0.1845, 0.0974, 0.0807, 0.0607, 0.0584),
        (0.1728, 0.0969, 0.0769, 0.0642, 0.0551),
        (0.1690, 0.0935, 0.0736, 0.0637, 0.0541),
        (0.1678, 0.0963, 0.0689, 0.0641, 0.0567),
    )),
    8: (0.01, (
        (0.0884, 0.0326, 0.0186, 0.0143, 0.0138),
        (0.0826, 0.0280, 0.0182, 0.0145, 0.0144),
        (0.0790, 0.0304, 0.0169, 0.0124, 0.0104),
        (0.0773, 0.0273, 0.0184, 0.0138, 0.0125),
    )),
}


def get_table(table_id: int) -> TableSpec:
    """Catalogue entry for tables 1..8."""
    if table_id not in _PUBLISHED_VALUES:
        raise ArgumentError(f"table must be one of 1..8, got {table_id}", "table", table_id)
    alpha, rows = _PUBLISHED_VALUES[table_id]
    estimate_rho = table_id >= 5
    return TableSpec(
        table_id=table_id,
        alpha=alpha,
        estimate_rho=estimate_rho,
        ns=ESTIMATED_RHO_NS if estimate_rho else KNOWN_RHO_NS,
        rhos=TABLE_RHOS,
        published_rows=rows,
    )


def all_tables() -> List[TableSpec]:
    return [get_table(table_id) for table_id in sorted(_PUBLISHED_VALUES)]


def cell_seed(seed: int, table_id: int, cell_index: int) -> int:
    """Independent 64-bit seed for one table cell, derived from the master seed."""
    state = SeedSequence(entropy=int(seed), spawn_key=(int(table_id), int(cell_index))).generate_state(1, np.uint64)
    return int(state[0])
