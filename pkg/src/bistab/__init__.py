"""Steady states, stability and hysteresis of two tunnel-coupled optomechanical cavities."""

from .model import DriveParams, ModelMode, PhotonPair, SystemParams, hz
from .roots import RootSet, Stability, SteadyStateSolution, brute_force_roots, find_all_roots, solve_exact_complex
from .stability import classify_roots, classify_solution
from .sweep import Axis, SweepSpec, critical_values, run_hysteresis, run_sweep

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "DriveParams",
    "ModelMode",
    "PhotonPair",
    "RootSet",
    "Stability",
    "SteadyStateSolution",
    "SweepSpec",
    "SystemParams",
    "brute_force_roots",
    "classify_roots",
    "classify_solution",
    "critical_values",
    "find_all_roots",
    "hz",
    "run_hysteresis",
    "run_sweep",
    "solve_exact_complex",
]
