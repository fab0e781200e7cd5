from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .analyzers import (
    DynamicsAnalyzer,
    JacobianAnalyzer,
    ModelAnalyzer,
    SimulationAnalyzer,
    SpectralAnalyzer,
)
from .core import PerceptionMode


class DesyncLab:
    def __init__(
        self,
        period: float = 1000.0,
        perception_mode: str = PerceptionMode.TWO_HOP.value,
        max_workers: Optional[int] = None,
        tolerance: float = 1e-9,
    ):
        self.period = float(period)
        self.perception_mode = PerceptionMode(perception_mode)
        self.max_workers = max_workers
        self.tolerance = tolerance
        self._executor: Optional[ThreadPoolExecutor] = None
        self._model: Optional[ModelAnalyzer] = None
        self._dynamics: Optional[DynamicsAnalyzer] = None
        self._jacobians: Optional[JacobianAnalyzer] = None
        self._spectral: Optional[SpectralAnalyzer] = None
        self._simulation: Optional[SimulationAnalyzer] = None

    async def init(self) -> None:
        """Start the worker pool and create the analyzers."""
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers, thread_name_prefix="desync")
            settings = dict(period=self.period, perception_mode=self.perception_mode, tolerance=self.tolerance)
            self._model = ModelAnalyzer(self._executor, **settings)
            self._dynamics = DynamicsAnalyzer(self._executor, **settings)
            self._jacobians = JacobianAnalyzer(self._executor, **settings)
            self._spectral = SpectralAnalyzer(self._executor, **settings)
            self._simulation = SimulationAnalyzer(self._executor, **settings)

    async def close(self) -> None:
        """Shut down the worker pool."""
        if self._executor:
            self._executor.shutdown(wait=True)
            self._executor = None
            self._model = None
            self._dynamics = None
            self._jacobians = None
            self._spectral = None
            self._simulation = None

    @property
    def model(self) -> ModelAnalyzer:
        """Constants, states, topologies and perception."""
        if self._model is None:
            raise RuntimeError("Lab not initialized. Call await lab.init() first.")
        return self._model

    @property
    def dynamics(self) -> DynamicsAnalyzer:
        """Single-hop and multi-hop transitions."""
        if self._dynamics is None:
            raise RuntimeError("Lab not initialized. Call await lab.init() first.")
        return self._dynamics

    @property
    def jacobians(self) -> JacobianAnalyzer:
        """Analytic and finite-difference Jacobians."""
        if self._jacobians is None:
            raise RuntimeError("Lab not initialized. Call await lab.init() first.")
        return self._jacobians

    @property
    def spectral(self) -> SpectralAnalyzer:
        """Stability reports and thresholds."""
        if self._spectral is None:
            raise RuntimeError("Lab not initialized. Call await lab.init() first.")
        return self._spectral

    @property
    def simulation(self) -> SimulationAnalyzer:
        """Simulation runs and exports."""
        if self._simulation is None:
            raise RuntimeError("Lab not initialized. Call await lab.init() first.")
        return self._simulation

    async def __aenter__(self):
        await self.init()
        return self

    async def __aexit__(self, exc_type, exc_val, exc_tb):
        await self.close()
