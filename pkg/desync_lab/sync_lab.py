"""Blocking wrapper around DesyncLab."""
import asyncio
from typing import TYPE_CHECKING, Any, Optional

from .core import PerceptionMode
from .lab import DesyncLab

if TYPE_CHECKING:
    from .analyzers import (
        DynamicsAnalyzer,
        JacobianAnalyzer,
        ModelAnalyzer,
        SimulationAnalyzer,
        SpectralAnalyzer,
    )

ANALYZERS = ("model", "dynamics", "jacobians", "spectral", "simulation")


class SyncDesyncLab:
    """Synchronous interface to DesyncLab for scripts and notebooks without an event loop.

    Example:
        with SyncDesyncLab(period=1000.0) as lab:
            report = lab.spectral.report(8, "star")
    """

    def __init__(
        self,
        period: float = 1000.0,
        perception_mode: str = PerceptionMode.TWO_HOP.value,
        max_workers: Optional[int] = None,
        tolerance: float = 1e-9,
    ):
        self._settings = dict(
            period=period,
            perception_mode=perception_mode,
            max_workers=max_workers,
            tolerance=tolerance,
        )
        self._async_lab: Optional[DesyncLab] = None
        self._loop: Optional[asyncio.AbstractEventLoop] = None

        if TYPE_CHECKING:
            self.model: ModelAnalyzer
            self.dynamics: DynamicsAnalyzer
            self.jacobians: JacobianAnalyzer
            self.spectral: SpectralAnalyzer
            self.simulation: SimulationAnalyzer

    def __enter__(self) -> "SyncDesyncLab":
        try:
            asyncio.get_running_loop()
        except RuntimeError:
            pass
        else:
            raise RuntimeError("SyncDesyncLab cannot run inside an event loop; use DesyncLab instead.")

        self._loop = asyncio.new_event_loop()
        self._async_lab = DesyncLab(**self._settings)
        self._loop.run_until_complete(self._async_lab.init())
        for name in ANALYZERS:
            setattr(self, name, SyncAnalyzerWrapper(getattr(self._async_lab, name), self._loop))
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if self._async_lab is not None:
            self._loop.run_until_complete(self._async_lab.close())
            self._async_lab = None
        if self._loop is not None:
            self._loop.close()
            self._loop = None
        for name in ANALYZERS:
            self.__dict__.pop(name, None)


class SyncAnalyzerWrapper:
    """Turns every coroutine method of an analyzer into a blocking call."""

    def __init__(self, async_analyzer: Any, loop: asyncio.AbstractEventLoop):
        self._async_analyzer = async_analyzer
        self._loop = loop

    def __getattr__(self, name: str) -> Any:
        attr = getattr(self._async_analyzer, name)

        if asyncio.iscoroutinefunction(attr):
            def sync_method(*args, **kwargs):
                return self._loop.run_until_complete(attr(*args, **kwargs))
            return sync_method

        return attr
