from functools import partial
from typing import Iterable, Optional, Union

from ..core import GapVector, PerceptionMatrix, equilibrium_gaps
from ..dwarf import single_hop_map
from ..jacobian import (
    JacobianMatrix,
    Parity,
    StarVariant,
    fd_check,
    finite_difference_jacobian,
    jacobian_multihop,
    jacobian_single_hop,
    jacobian_star,
)
from ..ledger import DiscrepancyLedger, discrepancy_ledger
from ..mdwarf import force_table, multihop_map
from .base import BaseAnalyzer


class JacobianAnalyzer(BaseAnalyzer):
    """Analytic Jacobians and the finite-difference oracle."""

    async def single_hop(self, n: int, coupling: Optional[float] = None) -> JacobianMatrix:
        return await self._run(jacobian_single_hop, self._system(n, coupling), Parity.of(n))

    async def star(
        self,
        n: int,
        variant: Union[StarVariant, str] = StarVariant.MASK_EXACT,
        coupling: Optional[float] = None,
    ) -> JacobianMatrix:
        return await self._run(jacobian_star, self._system(n, coupling), variant)

    async def multihop(
        self,
        perception: PerceptionMatrix,
        gaps: Optional[GapVector] = None,
        coupling: Optional[float] = None,
    ) -> JacobianMatrix:
        """
        Multi-hop Jacobian at ``gaps`` (equilibrium when omitted).

        Args:
            perception: Perception matrix driving the force masks
            gaps: State to linearise at
            coupling: Optional override of the coupling constant
        """
        n = perception.n
        point = gaps if gaps is not None else equilibrium_gaps(n, self.period)
        return await self._run(jacobian_multihop, point, perception, self._system(n, coupling))

    async def finite_difference_single_hop(self, gaps: GapVector, coupling: Optional[float] = None) -> JacobianMatrix:
        step_map = partial(single_hop_map, config=self._system(gaps.n, coupling))
        return await self._run(finite_difference_jacobian, step_map, gaps)

    async def finite_difference_multihop(
        self,
        gaps: GapVector,
        perception: PerceptionMatrix,
        coupling: Optional[float] = None,
    ) -> JacobianMatrix:
        system = self._system(gaps.n, coupling)
        step_map = partial(multihop_map, perception=force_table(perception), config=system)
        return await self._run(finite_difference_jacobian, step_map, gaps)

    async def check_single_hop(self, n: int) -> float:
        """Max-abs difference between the analytic and FD single-hop Jacobians at equilibrium."""
        system = self._system(n)
        analytic = jacobian_single_hop(system, Parity.of(n))
        return await self._run(fd_check, analytic, partial(single_hop_map, config=system), equilibrium_gaps(n, self.period))

    async def ledger(
        self,
        ns_single: Iterable[int] = (4, 5, 6, 7, 8, 10, 12),
        ns_star: Iterable[int] = (6, 8, 10, 12),
    ) -> DiscrepancyLedger:
        return await self._run(discrepancy_ledger, tuple(ns_single), tuple(ns_star), self.period)
