from .core import (
    GapVector,
    PerceptionMatrix,
    PerceptionMode,
    PhaseVector,
    SystemConfig,
    Topology,
    TopologyKind,
)
from .errors import DesyncError
from .lab import DesyncLab
from .simulation import SimConfig, run_simulation
from .spectral import StabilityMode, stability_report, stability_thresholds
from .sync_lab import SyncDesyncLab

__version__ = "0.1.0"
__all__ = [
    "DesyncError",
    "DesyncLab",
    "GapVector",
    "PerceptionMatrix",
    "PerceptionMode",
    "PhaseVector",
    "SimConfig",
    "StabilityMode",
    "SyncDesyncLab",
    "SystemConfig",
    "Topology",
    "TopologyKind",
    "run_simulation",
    "stability_report",
    "stability_thresholds",
]
