"""Monte Carlo solvers for stochastic PDEs by backward branching diffusions."""

from .noise_field import BoundaryPolicy, GridSpec, NoiseMode, NoiseRealization, NoiseSign, build_realization
from .stats import Estimate

__all__ = [
    "BoundaryPolicy",
    "Estimate",
    "GridSpec",
    "NoiseMode",
    "NoiseRealization",
    "NoiseSign",
    "build_realization",
]
