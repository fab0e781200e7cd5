"""Discrepancy ledger: which analytic forms the finite-difference oracle confirms."""
import logging
from dataclasses import dataclass
from functools import partial
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from .core import PerceptionMatrix, SystemConfig, equilibrium_gaps
from .dwarf import single_hop_map
from .jacobian import (
    Parity,
    StarVariant,
    finite_difference_jacobian,
    jacobian_single_hop,
    jacobian_star,
)
from .mdwarf import force_table, multihop_map
from .spectral import char_poly_single_hop, eigenvalues, root_agreement

logger = logging.getLogger(__name__)

FD_TOLERANCE = 1e-5
ZERO_EIGENVALUE_TOLERANCE = 1e-8


@dataclass(frozen=True)
class StarLedgerEntry:
    n: int
    errors: Dict[str, float]
    matching_variant: Optional[str]


@dataclass(frozen=True)
class SingleHopLedgerEntry:
    n: int
    fd_error: float
    min_eigen_modulus: float
    has_zero_eigenvalue: bool
    root_agreement: float


@dataclass(frozen=True)
class DiscrepancyLedger:
    star: Tuple[StarLedgerEntry, ...]
    single_hop: Tuple[SingleHopLedgerEntry, ...]
    tolerance: float = FD_TOLERANCE

    @property
    def certified_variant(self) -> Optional[str]:
        """The star variant matched at every size, if there is one."""
        matches = {entry.matching_variant for entry in self.star}
        if len(matches) == 1:
            return matches.pop()
        return None


def star_entry(n: int, period: float = 1000.0, tolerance: float = FD_TOLERANCE) -> StarLedgerEntry:
    config = SystemConfig(n, period)
    table = force_table(PerceptionMatrix.full(n))
    numeric = finite_difference_jacobian(partial(multihop_map, perception=table, config=config), equilibrium_gaps(n, period))
    errors = {
        variant.value: float(np.max(np.abs(numeric.entries - jacobian_star(config, variant).entries)))
        for variant in StarVariant
    }
    best = min(errors, key=errors.get)
    matching = best if errors[best] <= tolerance else None
    logger.info("Star n=%d: FD matches %s (errors %s)", n, matching or "no variant", errors)
    return StarLedgerEntry(n, errors, matching)


def single_hop_entry(n: int, period: float = 1000.0) -> SingleHopLedgerEntry:
    config = SystemConfig(n, period)
    parity = Parity.of(n)
    analytic = jacobian_single_hop(config, parity)
    numeric = finite_difference_jacobian(partial(single_hop_map, config=config), equilibrium_gaps(n, period))
    values = eigenvalues(analytic)
    smallest = float(np.min(np.abs(values)))
    entry = SingleHopLedgerEntry(
        n=n,
        fd_error=float(np.max(np.abs(numeric.entries - analytic.entries))),
        min_eigen_modulus=smallest,
        has_zero_eigenvalue=smallest <= ZERO_EIGENVALUE_TOLERANCE,
        root_agreement=root_agreement(char_poly_single_hop(config, parity), values),
    )
    logger.info("Single-hop n=%d: zero eigenvalue %s, min |lambda| %.6g", n, entry.has_zero_eigenvalue, smallest)
    return entry


def discrepancy_ledger(
    ns_single: Iterable[int] = (4, 5, 6, 7, 8, 10, 12),
    ns_star: Iterable[int] = (6, 8, 10, 12),
    period: float = 1000.0,
    tolerance: float = FD_TOLERANCE,
) -> DiscrepancyLedger:
    return DiscrepancyLedger(
        star=tuple(star_entry(n, period, tolerance) for n in ns_star),
        single_hop=tuple(single_hop_entry(n, period) for n in ns_single),
        tolerance=tolerance,
    )
