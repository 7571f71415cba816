"""KPZ through the Cole-Hopf transform ``Z = e^{-t} e^{lambda h}``.

``Z`` solves ``dZ/dt = Z'' - Z + lambda Z xi``. Its backward process rings a
rate-1 clock; at every ring the path multiplies by ``lambda * xi`` at the ring
point and carries on. Summing over the clock analytically turns the same
expectation into ``E[e^{-t} Z0(X_t) exp(lambda * int xi dB)]``, which gives an
independent estimator of the same number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial

import numpy as np

from . import branching_engine as engine
from .branching_engine import BranchingSpec, BranchTypeRule
from .diffusion_paths import DiffusionParams, SpaceTimePoint, default_dt_path, simulate_paths
from .initial import ExpOf, InitialCondition
from .noise_field import NoiseMode, NoiseRealization, NoiseSign, path_noise_integrals
from .stats import Estimate, summarize
from .streams import Purpose, map_blocks

# Path-integral estimators hold the position fixed across a step; this many
# substeps per default step keeps that bias well under Monte Carlo error.
PATH_SUBSTEPS = 64


@dataclass(frozen=True)
class KpzChParams:
    lam: float
    t: float
    x: float
    sigma_bar: float = 2.0
    noise_sign: NoiseSign = NoiseSign.PLUS_XI

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"t must be >= 0, got {self.t}")

    @property
    def point(self) -> SpaceTimePoint:
        return SpaceTimePoint(self.t, self.x)


def z_spec(params: KpzChParams, max_events: int = engine.DEFAULT_MAX_EVENTS) -> BranchingSpec:
    rule = BranchTypeRule(
        "noise", 1.0, offspring=1, weight=params.lam * params.noise_sign.factor, samples_noise=True
    )
    return BranchingSpec(1.0, (rule,), DiffusionParams(params.sigma_bar), max_events=max_events)


def z_branching_estimate(
    params: KpzChParams,
    ic_z: InitialCondition,
    noise: NoiseRealization,
    mode: NoiseMode = NoiseMode.FIXED_REALIZATION,
    n: int = 100_000,
    seed: int = 0,
    workers: int | None = None,
) -> Estimate:
    return engine.estimate(z_spec(params), params.point, ic_z, noise, mode, n, seed, workers)


def _path_dt(noise: NoiseRealization, sigma_bar: float, dt_path: float | None) -> float:
    return dt_path if dt_path is not None else default_dt_path(noise.spec, sigma_bar, PATH_SUBSTEPS)


def _exponent_block(t, x, ic_h, noise, diffusion, sign, rng, size):
    s, X = simulate_paths(x, t, diffusion, rng, size)
    integral = path_noise_integrals(noise, s, X, t)
    return np.asarray(ic_h(X[:, -1]), dtype=float), sign * integral


def path_samples(t, x, ic, noise, n, seed, sigma_bar=2.0, noise_sign=NoiseSign.PLUS_XI, dt_path=None, workers=None):
    """Per-path ``(ic(X_t), sign * int xi dB)`` over pure diffusion paths.

    The exponential-functional, height-recovery and linear estimators all draw
    their paths here from the same stream family, so equal seeds give
    identical paths.
    """
    if not t <= noise.spec.t_max:
        raise ValueError(f"t={t} beyond noise horizon {noise.spec.t_max}")
    diffusion = DiffusionParams(sigma_bar, 0.0, _path_dt(noise, sigma_bar, dt_path))
    fn = partial(_exponent_block, t, x, ic, noise, diffusion, noise_sign.factor)
    return map_blocks(fn, n, seed, Purpose.PATH, workers)


def z_exponential_estimate(
    params: KpzChParams,
    ic_z: InitialCondition,
    noise: NoiseRealization,
    n: int = 100_000,
    seed: int = 0,
    dt_path: float | None = None,
    workers: int | None = None,
) -> Estimate:
    """``E[e^{-t} Z0(X_t) exp(lambda I)]``; overflowing samples surface as ``n_nonfinite``."""
    z0, integral = path_samples(params.t, params.x, ic_z, noise, n, seed, params.sigma_bar,
                                params.noise_sign, dt_path, workers)
    with np.errstate(over="ignore", invalid="ignore"):
        values = z0 * np.exp(params.lam * integral - params.t)
    return summarize(values)


def h_from_z(z_value: float, t: float, lam: float) -> float:
    if lam == 0:
        raise ValueError("lambda = 0: use stochastic_heat_estimate for the linear limit")
    if not z_value > 0:
        raise ValueError(f"Z estimate {z_value} is not positive; cannot take its logarithm")
    return (t + math.log(z_value)) / lam


def h_estimate_from_z(z: Estimate, t: float, lam: float) -> tuple[float, float]:
    """Height and its delta-method standard error from a Z estimate."""
    h = h_from_z(z.mean, t, lam)
    return h, z.stderr / (abs(lam) * z.mean)


def stochastic_heat_estimate(
    t: float,
    x: float,
    ic_h: InitialCondition,
    noise: NoiseRealization,
    n: int = 100_000,
    seed: int = 0,
    sigma_bar: float = 2.0,
    noise_sign: NoiseSign = NoiseSign.PLUS_XI,
    dt_path: float | None = None,
    workers: int | None = None,
) -> Estimate:
    """Linear (lambda = 0) solution ``E[h0(X_t) + sign * int xi dB]``."""
    h0, integral = path_samples(t, x, ic_h, noise, n, seed, sigma_bar, noise_sign, dt_path, workers)
    return summarize(h0 + integral)


@dataclass(frozen=True)
class LambdaLimitRow:
    lam: float
    h_exp: float
    h_exp_stderr: float
    h_linear: float
    h_linear_stderr: float
    exponent_variance: float

    @property
    def gap(self) -> float:
        return abs(self.h_exp - self.h_linear)

    @property
    def bound(self) -> float:
        return 3.0 * self.h_exp_stderr + self.lam * self.exponent_variance


def lambda_limit_check(
    lams,
    t: float,
    x: float,
    ic_h: InitialCondition,
    noise: NoiseRealization,
    n: int = 100_000,
    seed: int = 0,
    sigma_bar: float = 2.0,
    dt_path: float | None = None,
    workers: int | None = None,
) -> list[LambdaLimitRow]:
    """Height from the exponential functional at each lambda against the linear solution.

    Both pipelines use the same seed, hence the same paths, so the gap is the
    sample Jensen gap ``(1/lam) log mean e^{lam Y} - mean Y ~ lam Var(Y)/2``.
    """
    h0, integral = path_samples(t, x, ic_h, noise, n, seed, sigma_bar, NoiseSign.PLUS_XI, dt_path, workers)
    exponent = h0 + integral
    linear = summarize(exponent)
    var = float(np.var(exponent, ddof=1))
    rows = []
    for lam in lams:
        params = KpzChParams(lam, t, x, sigma_bar)
        z = z_exponential_estimate(params, ExpOf(lam, ic_h), noise, n, seed, dt_path, workers)
        h, h_err = h_estimate_from_z(z, t, lam)
        rows.append(LambdaLimitRow(lam, h, h_err, linear.mean, linear.stderr, var))
    return rows
