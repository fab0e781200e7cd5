"""Jacobians of the single-hop and multi-hop maps, analytic and finite-difference."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np
from scipy.linalg import circulant

from .core import GapVector, PerceptionMatrix, SystemConfig, inverse_square_sum, partial_inverse_square_sum
from .errors import DesyncError, DomainError, NumericalError, ProbeError, UnsupportedSizeError
from .mdwarf import ForceTable, validate_state, as_force_table

logger = logging.getLogger(__name__)

FD_RELATIVE_STEP = 1e-6


class Provenance(str, Enum):
    ANALYTIC_SINGLE_HOP = "analytic-single-hop"
    ANALYTIC_MULTIHOP = "analytic-multihop"
    ANALYTIC_STAR = "analytic-star"
    FINITE_DIFFERENCE = "finite-difference"


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"

    @classmethod
    def of(cls, n: int) -> "Parity":
        return cls.EVEN if n % 2 == 0 else cls.ODD


class StarVariant(str, Enum):
    """Star Jacobian forms.

    ``mask-exact`` is the derivative of the multi-hop map under full perception.
    ``closed-form`` and ``printed`` are the A/j^2 banded circulants whose
    diagonal uses the n/2-2 and the n-2 summation limit respectively.
    """

    MASK_EXACT = "mask-exact"
    CLOSED_FORM = "closed-form"
    PRINTED = "printed"


@dataclass(frozen=True, eq=False)
class JacobianMatrix:
    entries: np.ndarray
    provenance: Provenance
    variant: Optional[StarVariant] = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float, copy=True)
        provenance = Provenance(self.provenance)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise DomainError(f"Jacobian must be square, got shape {entries.shape}")
        if not np.all(np.isfinite(entries)):
            raise NumericalError("Jacobian has non-finite entries", provenance=provenance.value)
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "provenance", provenance)
        if self.variant is not None:
            object.__setattr__(self, "variant", StarVariant(self.variant))

    @property
    def n(self) -> int:
        return int(self.entries.shape[0])

    @property
    def label(self) -> str:
        if self.variant is None:
            return self.provenance.value
        return f"{self.provenance.value}/{self.variant.value}"


def _check_parity(config: SystemConfig, parity: Union[Parity, str]) -> Parity:
    parity = Parity(parity)
    if Parity.of(config.n) is not parity:
        raise DomainError(f"n={config.n} is not {parity.value}")
    return parity


def jacobian_single_hop(config: SystemConfig, parity: Union[Parity, str]) -> JacobianMatrix:
    """Jacobian of the single-hop map at equilibrium.

    Rows 0..n-3 are unit shifts. The last two rows carry +-A*S_{j+1} at the
    first ``reach`` columns and the mirrored columns, where S_s is the partial
    inverse-square sum starting at s.
    """
    _check_parity(config, parity)
    n = config.n
    if n < 4:
        raise UnsupportedSizeError(f"single-hop Jacobian needs n >= 4, got {n}")
    a = config.amplification
    weights = a * np.array([partial_inverse_square_sum(j + 1, n) for j in range(config.reach)])
    near = np.arange(config.reach)
    far = n - 1 - near

    entries = np.zeros((n, n))
    entries[np.arange(n - 2), np.arange(1, n - 1)] = 1.0
    entries[n - 2, n - 1] = 1.0
    entries[n - 2, near] += weights
    entries[n - 2, far] -= weights
    entries[n - 1, 0] = 1.0
    entries[n - 1, near] -= weights
    entries[n - 1, far] += weights
    return JacobianMatrix(entries, Provenance.ANALYTIC_SINGLE_HOP)


def force_gradient(x: np.ndarray, table: ForceTable, period: float) -> np.ndarray:
    """dF_i/dgap_k for every node i at state ``x``, built from the force weights."""
    n = x.size
    gradient = np.zeros((n, n))
    for i in range(n):
        for d in range(1, table.reach + 1):
            ahead = (i + np.arange(d)) % n
            behind = (i - 1 - np.arange(d)) % n
            gradient[i, ahead] += table.w_minus[i, d - 1] * period / np.sum(x[ahead]) ** 2
            gradient[i, behind] -= table.w_plus[i, d - 1] * period / np.sum(x[behind]) ** 2
    return gradient


def jacobian_multihop(
    gaps: GapVector,
    perception: Union[PerceptionMatrix, ForceTable],
    config: SystemConfig,
) -> JacobianMatrix:
    """Jacobian of the synchronous multi-hop map at any admissible state."""
    if config.n < 6:
        raise UnsupportedSizeError(f"multi-hop Jacobian needs n >= 6, got {config.n}")
    validate_state(gaps, perception, config)
    gradient = force_gradient(gaps.gaps, as_force_table(perception), config.period)
    entries = np.eye(config.n) + config.coupling * (np.roll(gradient, -1, axis=0) - gradient)
    return JacobianMatrix(entries, Provenance.ANALYTIC_MULTIHOP)


def star_variant_row(config: SystemConfig, variant: Union[StarVariant, str] = StarVariant.MASK_EXACT) -> np.ndarray:
    """First row of the star circulant for the given variant."""
    variant = StarVariant(variant)
    n = config.n
    if n < 6 or n % 2:
        raise UnsupportedSizeError(f"star Jacobian is defined for even n >= 6, got {n}")
    a = config.amplification
    half = n // 2
    row = np.zeros(n)
    if variant is StarVariant.MASK_EXACT:
        reach = config.reach
        offsets = [0, 1, n - 1, reach, n - reach]
        values = [1.0 - 4.0 * a + 2.0 * a / reach ** 2, 2.0 * a, 2.0 * a, -a / reach ** 2, -a / reach ** 2]
        np.add.at(row, offsets, values)
        return row
    limit = half - 2 if variant is StarVariant.CLOSED_FORM else n - 2
    row[0] = 1.0 - 2.0 * a * (1.0 + inverse_square_sum(1, limit))
    row[1] = row[n - 1] = 2.0 * a
    for d in range(2, half - 1):
        row[d] = row[n - d] = a / d ** 2
    return row


def jacobian_star(config: SystemConfig, variant: Union[StarVariant, str] = StarVariant.MASK_EXACT) -> JacobianMatrix:
    """Circulant Jacobian of the star topology under two-hop perception at equilibrium."""
    row = star_variant_row(config, variant)
    # scipy's circulant takes the first column
    return JacobianMatrix(circulant(row).T, Provenance.ANALYTIC_STAR, StarVariant(variant))


def finite_difference_jacobian(
    step_map: Callable[[np.ndarray], np.ndarray],
    point: Union[GapVector, np.ndarray],
    h: Optional[float] = None,
) -> JacobianMatrix:
    """Central-difference Jacobian of ``step_map`` at ``point``.

    ``h`` defaults to 1e-6 times the period for gap vectors and 1e-6 otherwise.
    """
    if isinstance(point, GapVector):
        x = np.array(point.gaps, dtype=float)
        if h is None:
            h = point.period * FD_RELATIVE_STEP
        if np.any(x <= 2 * h):
            raise DomainError(f"probe step {h!r} too large for the smallest gap {x.min()!r}")
    else:
        x = np.array(point, dtype=float)
        if h is None:
            h = FD_RELATIVE_STEP
    if not h > 0:
        raise DomainError(f"finite-difference step must be positive, got {h!r}")

    columns = []
    for j in range(x.size):
        up, down = x.copy(), x.copy()
        up[j] += h
        down[j] -= h
        try:
            column = (np.asarray(step_map(up), dtype=float) - np.asarray(step_map(down), dtype=float)) / (2 * h)
        except DesyncError as e:
            raise ProbeError(e.message, column=j) from e
        except (ArithmeticError, ValueError) as e:
            raise ProbeError(str(e), column=j) from e
        logger.debug("Probed column %d (max |entry| %.3g)", j, float(np.max(np.abs(column))))
        columns.append(column)
    return JacobianMatrix(np.column_stack(columns), Provenance.FINITE_DIFFERENCE)


def fd_check(
    analytic: JacobianMatrix,
    step_map: Callable[[np.ndarray], np.ndarray],
    point: Union[GapVector, np.ndarray],
    h: Optional[float] = None,
) -> float:
    """Largest absolute entry difference between ``analytic`` and the FD Jacobian."""
    numeric = finite_difference_jacobian(step_map, point, h)
    if numeric.entries.shape != analytic.entries.shape:
        raise DomainError(f"shape mismatch: analytic {analytic.entries.shape}, FD {numeric.entries.shape}")
    return float(np.max(np.abs(numeric.entries - analytic.entries)))
