import asyncio
from typing import Callable, Iterable, List, Optional, Union

from ..core import PerceptionMatrix
from ..jacobian import Parity, StarVariant
from ..spectral import (
    CharPoly,
    StabilityMode,
    StabilityReport,
    StabilityThresholds,
    char_poly_single_hop,
    stability_report,
    stability_thresholds,
)
from .base import BaseAnalyzer


class SpectralAnalyzer(BaseAnalyzer):
    """Stability reports, characteristic polynomials and thresholds."""

    async def char_poly(self, n: int) -> CharPoly:
        return await self._run(char_poly_single_hop, self._system(n), Parity.of(n))

    async def thresholds(self) -> StabilityThresholds:
        return await self._run(stability_thresholds)

    async def report(
        self,
        n: int,
        mode: Union[StabilityMode, str],
        perception: Optional[PerceptionMatrix] = None,
        variant: Union[StarVariant, str] = StarVariant.MASK_EXACT,
        coupling: Optional[float] = None,
    ) -> StabilityReport:
        """
        Stability report at equilibrium.

        Args:
            n: Node count
            mode: single-hop-even, single-hop-odd, star or general
            perception: Required for general mode
            variant: Star Jacobian form (star mode only)
            coupling: Optional override of the coupling constant

        Example:
            report = await lab.spectral.report(8, "star")
            print(report.verdict, report.margin)
        """
        return await self._run(
            stability_report,
            self._system(n, coupling),
            mode,
            perception,
            tolerance=self.tolerance,
            variant=variant,
        )

    async def sweep(
        self,
        ns: Iterable[int],
        mode: Union[StabilityMode, str],
        perception_for: Optional[Callable[[int], PerceptionMatrix]] = None,
    ) -> List[StabilityReport]:
        """
        Reports for several node counts, computed concurrently.

        Args:
            ns: Node counts
            mode: Stability mode shared by every report
            perception_for: Builds the perception matrix for a node count (general mode)
        """
        tasks = [
            self.report(n, mode, perception_for(n) if perception_for is not None else None)
            for n in ns
        ]
        return list(await asyncio.gather(*tasks))
