"""The equation ``dPhi/dt = Laplacian Phi - Phi^3 + xi`` by ternary branching (DB2).

Adding and subtracting ``Phi`` provides a rate-1 clock and turns the source
into ``Phi - Phi^3 + xi``. At a ring each of three outcomes has probability
1/3: split into three particles (weight -3), carry on (weight +3), or stop and
sample the noise (weight +3 times the noise sign).

``literal_menu=True`` gives the carry-on rule weight -3 instead. Under that menu
every ring contributes -3 regardless of outcome (a five-ring path with two
splits, one carry-on and two noise samples gives ``-3^5``), but it solves
``dPhi/dt = Laplacian Phi - 2 Phi - Phi^3 + xi``.
Only the one-dimensional lattice is implemented.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import branching_engine as engine
from .branching_engine import BranchingSpec, BranchTypeRule
from .diffusion_paths import DiffusionParams, SpaceTimePoint
from .initial import InitialCondition
from .noise_field import NoiseMode, NoiseRealization, NoiseSign
from .stats import Estimate

THIRD = 1.0 / 3.0


@dataclass(frozen=True)
class Db2Params:
    t: float
    x: float
    dim: int = 1
    sigma_bar: float = 2.0
    noise_sign: NoiseSign = NoiseSign.PLUS_XI

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dim}")
        if self.dim != 1:
            raise NotImplementedError("only the d=1 noise lattice is implemented")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")

    @property
    def point(self) -> SpaceTimePoint:
        return SpaceTimePoint(self.t, self.x)


def db2_spec(
    noise_sign: NoiseSign = NoiseSign.PLUS_XI,
    sigma_bar: float = 2.0,
    max_events: int = engine.DEFAULT_MAX_EVENTS,
    literal_menu: bool = False,
) -> BranchingSpec:
    # the last probability absorbs rounding so the three sum to 1 exactly
    rules = (
        BranchTypeRule("cube", THIRD, offspring=3, weight=-3.0),
        BranchTypeRule("continue", THIRD, offspring=1, weight=-3.0 if literal_menu else 3.0),
        BranchTypeRule("noise", 1.0 - 2 * THIRD, offspring=0, weight=3.0 * noise_sign.factor,
                       samples_noise=True),
    )
    return BranchingSpec(1.0, rules, DiffusionParams(sigma_bar), max_events=max_events)


def db2_estimate(
    params: Db2Params,
    ic_phi: InitialCondition,
    noise: NoiseRealization,
    mode: NoiseMode = NoiseMode.FIXED_REALIZATION,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
    max_events: int = engine.DEFAULT_MAX_EVENTS,
    literal_menu: bool = False,
) -> Estimate:
    spec = db2_spec(params.noise_sign, params.sigma_bar, max_events, literal_menu)
    return engine.estimate(spec, params.point, ic_phi, noise, mode, n, seed, workers)
