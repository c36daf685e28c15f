"""Dead leaves model: perfect simulation, closed-form moments and Monte Carlo checks."""

from .closedform import alpha, beta1, beta3, intensity_1d, intensity_2d, pcf_1d, sigma0_sq, sigma1_sq, sigma2_sq
from .dlm1d import Tessellation1D, simulate
from .dlm2d import PlanarTessellation, simulate2d
from .dlrm import DLRMRealization, evaluate_xi, evolve_xi, simulate_dlrm
from .engine import ReversedStream, SimulationWindow, forward_stream, substream
from .grains import GrainLaw1D, GrainLaw2D, law_from_dict
from .marks import MarkMeasure, TestFunction

__version__ = "0.1.0"

__all__ = [
    "DLRMRealization",
    "GrainLaw1D",
    "GrainLaw2D",
    "MarkMeasure",
    "PlanarTessellation",
    "ReversedStream",
    "SimulationWindow",
    "Tessellation1D",
    "TestFunction",
    "alpha",
    "beta1",
    "beta3",
    "evaluate_xi",
    "evolve_xi",
    "forward_stream",
    "intensity_1d",
    "intensity_2d",
    "law_from_dict",
    "pcf_1d",
    "sigma0_sq",
    "sigma1_sq",
    "sigma2_sq",
    "simulate",
    "simulate2d",
    "simulate_dlrm",
    "substream",
]
