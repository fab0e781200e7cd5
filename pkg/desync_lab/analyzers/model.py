from pathlib import Path
from typing import Optional, Sequence, Union

from ..core import (
    GapVector,
    PerceptionMatrix,
    PerceptionMode,
    PhaseVector,
    Topology,
    TopologyKind,
    amplification,
    builtin_topology,
    coupling_constant,
    equilibrium_gaps,
    load_topology,
    perception_matrix,
    perturb,
    ring_gaps,
)
from ..errors import ConfigError
from .base import BaseAnalyzer


class ModelAnalyzer(BaseAnalyzer):
    """Constants, states, topologies and perception for the configured period."""

    async def coupling_constant(self, n: int) -> float:
        return await self._run(coupling_constant, n, self.period)

    async def amplification(self, n: int) -> float:
        return await self._run(amplification, n)

    async def equilibrium(self, n: int) -> GapVector:
        return await self._run(equilibrium_gaps, n, self.period)

    async def gaps_from_phases(self, phases: Sequence[float]) -> GapVector:
        """
        Convert firing phases to the gap state, anchored at node 0.

        Args:
            phases: One phase per node in [0, period)

        Returns:
            GapVector in ring order starting at node 0

        Example:
            gaps = await lab.model.gaps_from_phases([900, 100, 500])
        """
        return await self._run(lambda: ring_gaps(PhaseVector(phases, self.period)))

    async def perturbed(self, n: int, node: int, magnitude: float) -> GapVector:
        return await self._run(lambda: perturb(equilibrium_gaps(n, self.period), node, magnitude))

    async def topology(self, source: Union[TopologyKind, str, Path], n: Optional[int] = None) -> Topology:
        """
        Build a builtin topology or load one from a JSON file.

        Args:
            source: star, chain, full, ring or a path to {"n": ..., "edges": [...]}
            n: Node count, required for builtin kinds
        """
        if isinstance(source, str) and source in {k.value for k in TopologyKind}:
            if n is None:
                raise ConfigError("builtin topologies need a node count")
            return await self._run(builtin_topology, source, n)
        return await self._run(load_topology, source)

    async def perception(
        self,
        topology: Topology,
        mode: Optional[Union[PerceptionMode, str]] = None,
    ) -> PerceptionMatrix:
        return await self._run(perception_matrix, topology, mode or self.perception_mode)
