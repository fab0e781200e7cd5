import asyncio
from pathlib import Path
from typing import Iterable, List, Optional, Union

from ..export import Exportable, ExportFormat, export
from ..simulation import RunResult, SimConfig, run_simulation
from .base import BaseAnalyzer


class SimulationAnalyzer(BaseAnalyzer):
    """Simulation runs and exports."""

    async def run(self, config: SimConfig) -> RunResult:
        return await self._run(run_simulation, config)

    async def run_batch(self, configs: Iterable[SimConfig]) -> List[RunResult]:
        """
        Run independent simulations concurrently; results keep the input order.

        Example:
            configs = [SimConfig("multi-hop", n=8, rounds=500, seed=s, initial="random") for s in range(4)]
            results = await lab.simulation.run_batch(configs)
        """
        return list(await asyncio.gather(*(self.run(config) for config in configs)))

    async def export(
        self,
        obj: Exportable,
        path: Union[str, Path],
        fmt: Optional[Union[ExportFormat, str]] = None,
    ) -> Path:
        return await self._run(export, obj, path, fmt)
