from typing import List, Optional

from ..core import GapVector, PerceptionMatrix
from ..dwarf import SingleHopForce, single_hop_force, step_single_hop, sweep_single_hop
from ..mdwarf import ForceMasks, TotalForce, force_masks, step_multihop, total_force
from .base import BaseAnalyzer


class DynamicsAnalyzer(BaseAnalyzer):
    """Single-hop firings and synchronous multi-hop transitions."""

    async def single_hop_force(self, gaps: GapVector, coupling: Optional[float] = None) -> SingleHopForce:
        return await self._run(single_hop_force, gaps, self._system(gaps.n, coupling))

    async def step_single_hop(self, gaps: GapVector, coupling: Optional[float] = None) -> GapVector:
        """
        Fire the node in front of ``gaps[0]`` once and relabel.

        Raises:
            OvershootError: if the firing would close a gap
        """
        return await self._run(step_single_hop, gaps, self._system(gaps.n, coupling))

    async def sweep_single_hop(self, gaps: GapVector, coupling: Optional[float] = None) -> GapVector:
        return await self._run(sweep_single_hop, gaps, self._system(gaps.n, coupling))

    async def force_masks(self, perception: PerceptionMatrix, node: int) -> ForceMasks:
        return await self._run(force_masks, perception, node)

    async def total_forces(
        self,
        gaps: GapVector,
        perception: PerceptionMatrix,
        coupling: Optional[float] = None,
    ) -> List[TotalForce]:
        """Total force on every node, with the per-component breakdown."""
        system = self._system(gaps.n, coupling)
        return await self._run(lambda: [total_force(gaps, perception, i, system) for i in range(gaps.n)])

    async def step_multihop(
        self,
        gaps: GapVector,
        perception: PerceptionMatrix,
        coupling: Optional[float] = None,
    ) -> GapVector:
        return await self._run(step_multihop, gaps, perception, self._system(gaps.n, coupling))
