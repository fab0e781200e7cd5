from .base import BaseAnalyzer
from .dynamics import DynamicsAnalyzer
from .jacobians import JacobianAnalyzer
from .model import ModelAnalyzer
from .simulation import SimulationAnalyzer
from .spectral import SpectralAnalyzer

__all__ = [
    "BaseAnalyzer",
    "DynamicsAnalyzer",
    "JacobianAnalyzer",
    "ModelAnalyzer",
    "SimulationAnalyzer",
    "SpectralAnalyzer",
]
