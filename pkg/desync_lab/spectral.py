"""Characteristic polynomials, spectra, eigenvalue bounds and stability thresholds."""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import linalg
from scipy.optimize import linear_sum_assignment

from .core import (
    AMPLIFICATION_EXPONENT,
    AMPLIFICATION_SCALE,
    ZETA_2,
    PerceptionMatrix,
    SystemConfig,
    equilibrium_gaps,
    inverse_square_sum,
    partial_inverse_square_sum,
)
from .errors import ConfigError, DomainError, NumericalError, UnsupportedSizeError
from .jacobian import (
    JacobianMatrix,
    Parity,
    StarVariant,
    jacobian_multihop,
    jacobian_single_hop,
    jacobian_star,
)
from .mdwarf import force_table, multihop_forces

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-8
CONTAINMENT_TOLERANCE = 1e-12


class StabilityMode(str, Enum):
    SINGLE_HOP_EVEN = "single-hop-even"
    SINGLE_HOP_ODD = "single-hop-odd"
    STAR = "star"
    GENERAL = "general"


class Verdict(str, Enum):
    STABLE = "stable"
    NOT_CERTIFIED = "not-certified"


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Monic polynomial, coefficients in ascending order a_0..a_n."""

    coefficients: np.ndarray
    parity: Parity

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float, copy=True)
        if coefficients.ndim != 1 or coefficients.size < 2:
            raise DomainError("a characteristic polynomial needs degree >= 1")
        if coefficients[-1] != 1.0:
            raise DomainError(f"polynomial is not monic (leading coefficient {coefficients[-1]!r})")
        coefficients.setflags(write=False)
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "parity", Parity(self.parity))

    @property
    def degree(self) -> int:
        return int(self.coefficients.size - 1)

    def __call__(self, z):
        return P.polyval(z, self.coefficients)


def char_poly_single_hop(config: SystemConfig, parity: Union[Parity, str]) -> CharPoly:
    """det(lambda*I - J) of the single-hop equilibrium Jacobian.

    lambda^n - A * sum_m (lambda^(n-m) + lambda^m) / m^2 + 2*A*S_1 - 1 over
    m = 1..reach. For even n the exponent n/2 is absent.
    """
    parity = Parity(parity)
    n = config.n
    if Parity.of(n) is not parity:
        raise DomainError(f"n={n} is not {parity.value}")
    if n < 4:
        raise UnsupportedSizeError(f"characteristic polynomial needs n >= 4, got {n}")
    a = config.amplification
    coefficients = np.zeros(n + 1)
    coefficients[n] = 1.0
    for m in range(1, config.reach + 1):
        coefficients[n - m] -= a / m ** 2
        coefficients[m] -= a / m ** 2
    coefficients[0] = 2.0 * a * partial_inverse_square_sum(1, n) - 1.0
    return CharPoly(coefficients, parity)


def coefficient_sum_bound(poly: CharPoly) -> float:
    """Every root z of a monic polynomial satisfies |z| <= max(1, sum |a_i|)."""
    return max(1.0, float(np.sum(np.abs(poly.coefficients[:-1]))))


def polynomial_roots(poly: CharPoly) -> np.ndarray:
    """Roots as eigenvalues of the companion matrix."""
    return linalg.eigvals(P.polycompanion(poly.coefficients))


def _entries(matrix: Union[JacobianMatrix, np.ndarray]) -> Tuple[np.ndarray, str]:
    if isinstance(matrix, JacobianMatrix):
        return matrix.entries, matrix.label
    return np.asarray(matrix, dtype=float), "array"


def eigenvalues(matrix: Union[JacobianMatrix, np.ndarray]) -> np.ndarray:
    """Eigenvalues of a dense matrix, each checked against its eigenvector residual."""
    entries, label = _entries(matrix)
    if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
        raise DomainError(f"eigenvalues need a square matrix, got shape {entries.shape}")
    if not np.all(np.isfinite(entries)):
        raise NumericalError("matrix has non-finite entries", provenance=label)
    try:
        values, vectors = linalg.eig(entries)
    except linalg.LinAlgError as e:
        raise NumericalError(f"eigen-solve did not converge: {e}", provenance=label) from e
    scale = max(float(np.linalg.norm(entries, 2)), 1.0)
    residual = float(np.max(np.linalg.norm(entries @ vectors - vectors * values, axis=0)))
    logger.debug("Eigen-solve residual %.3g for %s", residual, label)
    if residual > RESIDUAL_TOLERANCE * scale:
        raise NumericalError(f"eigen residual {residual:.3g} exceeds tolerance", provenance=label)
    return values


def spectral_radius(values: np.ndarray) -> float:
    return float(np.max(np.abs(values)))


def constrained_spectral_radius(matrix: Union[JacobianMatrix, np.ndarray]) -> float:
    """Spectral radius on the sum-zero subspace.

    The maps conserve the total of the gaps, so the all-ones vector is a left
    eigenvector for eigenvalue 1 and its orthogonal complement is invariant.
    """
    entries, _ = _entries(matrix)
    basis = linalg.null_space(np.ones((1, entries.shape[0])))
    return spectral_radius(eigenvalues(basis.T @ entries @ basis))


def circulant_eigenvalues(first_row: np.ndarray) -> np.ndarray:
    """lambda_j = sum_k c_k * omega^(j*k), omega = exp(2*pi*i/n)."""
    first_row = np.asarray(first_row, dtype=float)
    return np.fft.ifft(first_row) * first_row.size


def root_agreement(roots: Union[CharPoly, np.ndarray], values: np.ndarray) -> float:
    """Largest distance between optimally paired roots and eigenvalues."""
    if isinstance(roots, CharPoly):
        roots = polynomial_roots(roots)
    roots = np.asarray(roots, dtype=complex)
    values = np.asarray(values, dtype=complex)
    if roots.size != values.size:
        raise DomainError(f"cannot pair {roots.size} roots with {values.size} eigenvalues")
    cost = np.abs(roots[:, None] - values[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(np.max(cost[rows, cols]))


@dataclass(frozen=True)
class GershgorinDisc:
    center: complex
    radius: float

    @property
    def reach(self) -> float:
        return abs(self.center) + self.radius

    def contains(self, z: complex, tolerance: float = 0.0) -> bool:
        return abs(z - self.center) <= self.radius + tolerance


@dataclass(frozen=True)
class Certificate:
    name: str
    bound: float
    satisfied: bool
    # true when the bound concerns a different matrix than the one analysed
    informational: bool = False


@dataclass(frozen=True)
class GershgorinCertificate:
    discs: Tuple[GershgorinDisc, ...]
    satisfied: bool

    @property
    def bound(self) -> float:
        return max(disc.reach for disc in self.discs)

    def as_certificate(self, name: str = "gershgorin") -> Certificate:
        return Certificate(name, self.bound, self.satisfied)


def gershgorin_certificate(matrix: Union[JacobianMatrix, np.ndarray]) -> GershgorinCertificate:
    """One disc per row; satisfied when every disc lies inside the closed unit disc."""
    entries, _ = _entries(matrix)
    diagonal = np.diag(entries)
    radii = np.sum(np.abs(entries), axis=1) - np.abs(diagonal)
    discs = tuple(GershgorinDisc(complex(c), float(r)) for c, r in zip(diagonal, radii))
    satisfied = max(disc.reach for disc in discs) <= 1.0 + CONTAINMENT_TOLERANCE
    return GershgorinCertificate(discs, satisfied)


def closed_form_star_certificate(
    config: SystemConfig,
    variant: Union[StarVariant, str] = StarVariant.CLOSED_FORM,
    tolerance: float = CONTAINMENT_TOLERANCE,
) -> Certificate:
    """Gershgorin test of the banded star circulant without building the matrix.

    Works for any even n >= 6, including sizes far beyond a dense eigensolve.
    """
    variant = StarVariant(variant)
    if variant is StarVariant.MASK_EXACT:
        raise DomainError("the closed-form certificate covers the banded star variants only")
    n = config.n
    if n < 6 or n % 2:
        raise UnsupportedSizeError(f"star certificate is defined for even n >= 6, got {n}")
    a = config.amplification
    limit = n // 2 - 2 if variant is StarVariant.CLOSED_FORM else n - 2
    center = 1.0 - 2.0 * a * (1.0 + inverse_square_sum(1, limit))
    radius = 2.0 * a * (1.0 + inverse_square_sum(1, n // 2 - 2))
    bound = abs(center) + radius
    return Certificate("gershgorin-closed-form", bound, bound <= 1.0 + tolerance)


@dataclass(frozen=True)
class StabilityThresholds:
    """Largest real node counts certified by the three closed-form criteria."""

    single_hop_eigen: float
    single_hop_hirst_macey: float
    star_gershgorin: float

    def as_dict(self) -> Dict[str, float]:
        return {
            "single_hop_eigen": self.single_hop_eigen,
            "single_hop_hirst_macey": self.single_hop_hirst_macey,
            "star_gershgorin": self.star_gershgorin,
        }

    def max_nodes(self) -> Dict[str, int]:
        return {name: int(math.floor(value)) for name, value in self.as_dict().items()}


def _solve_power(scale: float) -> float:
    # largest n with scale * n^0.126 <= 1
    return (1.0 / scale) ** (1.0 / AMPLIFICATION_EXPONENT)


def stability_thresholds() -> StabilityThresholds:
    return StabilityThresholds(
        single_hop_eigen=_solve_power(AMPLIFICATION_SCALE * ZETA_2),
        single_hop_hirst_macey=_solve_power(2.0 * AMPLIFICATION_SCALE * ZETA_2),
        star_gershgorin=_solve_power(2.0 * AMPLIFICATION_SCALE * (1.0 + ZETA_2)),
    )


@dataclass(frozen=True, eq=False)
class StabilityReport:
    n: int
    mode: StabilityMode
    eigenvalues: np.ndarray
    spectral_radius: float
    margin: float
    certificates: Tuple[Certificate, ...]
    thresholds: StabilityThresholds
    verdict: Verdict
    perception_mode: Optional[str] = None
    variant: Optional[str] = None
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def certificate(self, name: str) -> Certificate:
        for certificate in self.certificates:
            if certificate.name == name:
                return certificate
        raise KeyError(name)


def _equilibrium_drift(config: SystemConfig, perception: PerceptionMatrix) -> float:
    gaps = equilibrium_gaps(config.n, config.period)
    return float(np.max(np.abs(multihop_forces(gaps.gaps, force_table(perception), config.period))))


def stability_report(
    config: SystemConfig,
    mode: Union[StabilityMode, str],
    perception: Optional[PerceptionMatrix] = None,
    tolerance: float = 1e-9,
    variant: Union[StarVariant, str] = StarVariant.MASK_EXACT,
) -> StabilityReport:
    """Jacobian, spectrum, certificates and verdict at equilibrium for one mode.

    Args:
        config: System to analyse.
        mode: single-hop-even, single-hop-odd, star or general.
        perception: Required for ``general``; ignored otherwise.
        tolerance: Slack on the closed unit disc for the spectral verdict.
        variant: Star Jacobian form used in ``star`` mode.

    Returns:
        StabilityReport with verdict "stable" when the spectral radius is at
        most 1 + tolerance or some certificate about this matrix holds.
    """
    mode = StabilityMode(mode)
    certificates: List[Certificate] = []
    diagnostics: Dict[str, Any] = {}
    perception_mode = None
    used_variant = None

    if mode in (StabilityMode.SINGLE_HOP_EVEN, StabilityMode.SINGLE_HOP_ODD):
        parity = Parity.EVEN if mode is StabilityMode.SINGLE_HOP_EVEN else Parity.ODD
        matrix = jacobian_single_hop(config, parity)
        poly = char_poly_single_hop(config, parity)
        bound = coefficient_sum_bound(poly)
        certificates.append(Certificate("hirst-macey", bound, bound <= 1.0 + tolerance))
        certificates.append(gershgorin_certificate(matrix).as_certificate())
    elif mode is StabilityMode.STAR:
        matrix = jacobian_star(config, variant)
        used_variant = matrix.variant.value
        perception_mode = "two-hop"
        certificates.append(gershgorin_certificate(matrix).as_certificate())
        if matrix.variant is StarVariant.MASK_EXACT:
            closed = closed_form_star_certificate(config, StarVariant.CLOSED_FORM)
            certificates.append(replace(closed, informational=True))
        else:
            certificates.append(closed_form_star_certificate(config, matrix.variant))
    else:
        if perception is None:
            raise ConfigError("general mode needs a perception matrix")
        perception_mode = perception.mode.value if perception.mode is not None else None
        drift = _equilibrium_drift(config, perception)
        if drift > 1e-9:
            logger.warning("Equilibrium is not a fixed point for this perception (max |F| = %.3g)", drift)
        diagnostics["equilibrium_max_force"] = drift
        matrix = jacobian_multihop(equilibrium_gaps(config.n, config.period), perception, config)
        certificates.append(gershgorin_certificate(matrix).as_certificate())

    values = eigenvalues(matrix)
    radius = spectral_radius(values)
    margin = 1.0 - constrained_spectral_radius(matrix)
    diagnostics["min_eigen_modulus"] = float(np.min(np.abs(values)))
    if mode in (StabilityMode.SINGLE_HOP_EVEN, StabilityMode.SINGLE_HOP_ODD):
        diagnostics["root_agreement"] = root_agreement(poly, values)

    stable = radius <= 1.0 + tolerance or any(c.satisfied for c in certificates if not c.informational)
    verdict = Verdict.STABLE if stable else Verdict.NOT_CERTIFIED
    logger.info("n=%d %s: spectral radius %.12g, margin %.3g, %s", config.n, mode.value, radius, margin, verdict.value)
    return StabilityReport(
        n=config.n,
        mode=mode,
        eigenvalues=values,
        spectral_radius=radius,
        margin=margin,
        certificates=tuple(certificates),
        thresholds=stability_thresholds(),
        verdict=verdict,
        perception_mode=perception_mode,
        variant=used_variant,
        diagnostics=diagnostics,
    )
