"""Quantum emitter coupled to a whispering-gallery cavity at a chiral
exceptional point: cascaded master equation, analytic LDOS, emission
spectra, bound-state analysis, entanglement and photon-blockade figures
of merit."""

__version__ = "0.1.0"

from .params import DriveSpec, ModelParams
from .hilbert import SpaceLayout
from .master import DensityMatrix, Liouvillian, build_liouvillian, evolve, steady_state
from .ldos import FitResult, SpectrumSeries
from .spectra import EigenMode

__all__ = [
    "__version__",
    "DriveSpec", "ModelParams", "SpaceLayout",
    "DensityMatrix", "Liouvillian", "build_liouvillian", "evolve", "steady_state",
    "FitResult", "SpectrumSeries", "EigenMode",
]
