import asyncio
import functools
from concurrent.futures import Executor
from typing import Any, Callable, Optional, TypeVar

import numpy as np

from ..core import PerceptionMode, SystemConfig
from ..errors import DesyncError, NumericalError, StorageError

T = TypeVar("T")


class BaseAnalyzer:
    def __init__(
        self,
        executor: Executor,
        period: float = 1000.0,
        perception_mode: PerceptionMode = PerceptionMode.TWO_HOP,
        tolerance: float = 1e-9,
    ):
        self.executor = executor
        self.period = float(period)
        self.perception_mode = PerceptionMode(perception_mode)
        self.tolerance = tolerance

    def _system(self, n: int, coupling: Optional[float] = None) -> SystemConfig:
        return SystemConfig(n, self.period, coupling)

    async def _run(self, func: Callable[..., T], *args: Any, **kwargs: Any) -> T:
        """Run a pure computation on the executor and normalise foreign failures."""
        loop = asyncio.get_running_loop()
        call = functools.partial(func, *args, **kwargs)
        name = getattr(func, "__name__", "computation")
        try:
            return await loop.run_in_executor(self.executor, call)
        except DesyncError:
            raise
        except (np.linalg.LinAlgError, FloatingPointError) as e:
            raise NumericalError(f"{name} failed: {e}") from e
        except OSError as e:
            raise StorageError(f"{name} failed ({e.strerror or e})", e.filename) from e
