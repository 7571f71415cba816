"""KPZ solved directly by a labelled branching process (DB1).

Adding and subtracting ``mu * h`` gives the equation a rate-``mu`` clock. At a
ring the particle, with probabilities proportional to ``(lam, mu, 1)``:

* ``deriv``: splits in two, each child carrying one more derivative label;
* ``continue``: carries on unchanged;
* ``noise``: stops and samples the noise.

Every ring multiplies the functional by ``gamma = (lam + mu + 1)/mu`` (with the
noise sign on noise rings), which makes
``probability * weight * mu`` equal the coefficient of each term.
Derivative labels are applied to the initial condition where the particle
lands; with constant diffusion coefficients derivatives commute with the
transport, so no path weights are needed.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import branching_engine as engine
from .branching_engine import BranchingSpec, BranchTypeRule
from .diffusion_paths import DiffusionParams, SpaceTimePoint
from .initial import ExpOf, InitialCondition
from .kpz_cole_hopf import KpzChParams, h_estimate_from_z, z_branching_estimate
from .noise_field import NoiseMode, NoiseRealization, NoiseSign
from .stats import Estimate


@dataclass(frozen=True)
class Db1Params:
    lam: float
    mu: float
    t: float
    x: float
    sigma_bar: float = 2.0
    noise_sign: NoiseSign = NoiseSign.MINUS_XI

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if not self.mu > 0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")

    @property
    def gamma(self) -> float:
        return (self.lam + self.mu + 1.0) / self.mu

    @property
    def point(self) -> SpaceTimePoint:
        return SpaceTimePoint(self.t, self.x)


def db1_spec(
    params: Db1Params,
    max_events: int = engine.DEFAULT_MAX_EVENTS,
    max_label_order: int = engine.DEFAULT_MAX_LABEL_ORDER,
) -> BranchingSpec:
    total = params.lam + params.mu + 1.0
    g = params.gamma
    rules = (
        BranchTypeRule("deriv", params.lam / total, offspring=2, weight=g, label_increment=1),
        BranchTypeRule("continue", params.mu / total, offspring=1, weight=g),
        BranchTypeRule("noise", 1.0 / total, offspring=0, weight=g * params.noise_sign.factor,
                       samples_noise=True),
    )
    return BranchingSpec(params.mu, rules, DiffusionParams(params.sigma_bar),
                         max_events=max_events, max_label_order=max_label_order)


def db1_estimate(
    params: Db1Params,
    ic_h: InitialCondition,
    noise: NoiseRealization,
    mode: NoiseMode = NoiseMode.FIXED_REALIZATION,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
    max_events: int = engine.DEFAULT_MAX_EVENTS,
    max_label_order: int = engine.DEFAULT_MAX_LABEL_ORDER,
) -> Estimate:
    spec = db1_spec(params, max_events, max_label_order)
    return engine.estimate(spec, params.point, ic_h, noise, mode, n, seed, workers)


@dataclass(frozen=True)
class CrossCheckReport:
    db1: Estimate
    z: Estimate
    h_cole_hopf: float
    h_cole_hopf_stderr: float

    @property
    def discrepancy(self) -> float:
        return abs(self.db1.mean - self.h_cole_hopf)

    @property
    def combined_stderr(self) -> float:
        return (self.db1.stderr**2 + self.h_cole_hopf_stderr**2) ** 0.5


def cross_check_cole_hopf(
    params: Db1Params,
    ic_h: InitialCondition,
    noise: NoiseRealization,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
    self_compare: bool = False,
) -> CrossCheckReport:
    """DB1 height against ``h_from_z`` of the Cole-Hopf branching estimate at the same point.

    Both use the fixed noise realization and the same noise sign. With
    ``self_compare`` the DB1 estimate is compared with itself, which checks the
    report plumbing.
    """
    if not params.lam > 0:
        raise ValueError("the Cole-Hopf pipeline needs lambda > 0")
    db1 = db1_estimate(params, ic_h, noise, NoiseMode.FIXED_REALIZATION, n, seed, workers)
    if self_compare:
        return CrossCheckReport(db1, db1, db1.mean, db1.stderr)
    ch = KpzChParams(params.lam, params.t, params.x, params.sigma_bar, params.noise_sign)
    z = z_branching_estimate(ch, ExpOf(params.lam, ic_h), noise, NoiseMode.FIXED_REALIZATION, n, seed, workers)
    h, h_err = h_estimate_from_z(z, params.t, params.lam)
    return CrossCheckReport(db1, z, h, h_err)
