"""Derivative weights for transporting derivative labels along a diffusion.

For a step ``W ~ N(b*dt, sigma_bar*dt)`` integration by parts against the
Gaussian density gives

    d/dx  E h(x + W) = E[h(x + W) (W - b dt) / (sigma_bar dt)]
    d2/dx2 E h(x + W) = E[h(x + W) ((W - b dt)^2 - sigma_bar dt) / (sigma_bar dt)^2]

so derivatives can be estimated from function values at path endpoints.
With constant coefficients the derivative of a transported function is the
transported derivative, which is why the labelled branching solvers just
differentiate the initial condition where a particle lands. That shortcut is
checked here against closed-form semigroup images, together with the
negative case of a nonlinear functional label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Callable

import numpy as np

from .diffusion_paths import DiffusionParams
from .initial import InitialCondition
from .stats import Estimate, summarize
from .streams import Purpose, map_blocks


def _check_scale(sigma_bar, dt):
    if not sigma_bar * dt > 0:
        raise ValueError(f"sigma_bar*dt must be positive, got {sigma_bar * dt}")


def first_derivative_weight(w, b_bar: float, sigma_bar: float, dt: float):
    _check_scale(sigma_bar, dt)
    return (w - b_bar * dt) / (sigma_bar * dt)


def second_derivative_weight(w, b_bar: float, sigma_bar: float, dt: float):
    _check_scale(sigma_bar, dt)
    v = sigma_bar * dt
    return ((w - b_bar * dt) ** 2 - v) / v**2


_WEIGHTS = {1: first_derivative_weight, 2: second_derivative_weight}


def _derivative_block(order, h, x0, params, dt, rng, size):
    # scale a standard normal so equal seeds give common random numbers across dt
    g = rng.standard_normal(size)
    w = params.b_bar * dt + math.sqrt(params.sigma_bar * dt) * g
    weight = _WEIGHTS[order](w, params.b_bar, params.sigma_bar, dt)
    return (np.asarray(h(x0 + w), dtype=float) * weight,)


def estimate_derivative(
    order: int,
    h: InitialCondition,
    x0: float,
    params: DiffusionParams,
    dt: float,
    n: int,
    seed: int,
    workers: int | None = None,
) -> Estimate:
    """Weighted Monte Carlo estimate of ``d^order/dx^order E h(x0 + W_dt)``.

    This targets the derivative of the transported function, so as an
    estimate of ``h^(order)(x0)`` it carries an O(dt) bias (see
    :func:`derivative_bias`).
    """
    if order not in _WEIGHTS:
        raise ValueError(f"order must be 1 or 2, got {order}")
    fn = partial(_derivative_block, order, h, x0, params, dt)
    (values,) = map_blocks(fn, n, seed, Purpose.LABEL, workers)
    return summarize(values)


def derivative_bias(order: int, h: InitialCondition, x0: float, params: DiffusionParams, dt: float) -> float:
    """Exact gap between the estimator's target and ``h^(order)(x0)``, from the closed-form evolution."""
    evolved = h.evolve(dt, params.sigma_bar, params.b_bar)
    return float(evolved.derivative(x0, order) - h.derivative(x0, order))


def bias_slope(order, h, x0, params, dts, n, seed, workers=None) -> float:
    """Observed order of the dt-bias from successive differences over a halving sequence ``dts``.

    Estimates at every dt share their Gaussian draws, so the Monte Carlo error
    common to all of them cancels in the differences.
    """
    means = [estimate_derivative(order, h, x0, params, dt, n, seed, workers).mean for dt in dts]
    diffs = np.abs(np.diff(means))
    ratios = [dts[i] / dts[i + 1] for i in range(len(dts) - 1)]
    slopes = [math.log(diffs[i] / diffs[i + 1]) / math.log(ratios[i + 1]) for i in range(len(diffs) - 1)]
    return float(np.mean(slopes))


@dataclass(frozen=True)
class TransportReport:
    shortcut: Estimate
    exact: float

    @property
    def gap(self) -> float:
        return abs(self.shortcut.mean - self.exact)

    @property
    def passed(self) -> bool:
        return self.gap <= 3.0 * self.shortcut.stderr + 1e-12


def _endpoint_block(fn, x, t, params, rng, size):
    g = rng.standard_normal(size)
    xt = x + params.b_bar * t + math.sqrt(params.sigma_bar * t) * g
    return (np.asarray(fn(xt), dtype=float),)


def shortcut_consistency_check(
    ic: InitialCondition,
    k: int,
    t: float,
    x: float,
    params: DiffusionParams,
    n: int,
    seed: int,
    workers: int | None = None,
) -> TransportReport:
    """``E[ic^(k)(X_t)]`` (labels applied at the endpoint) against the exact ``d^k`` of the evolved ic."""
    fn = partial(ic.derivative, order=k)
    (values,) = map_blocks(partial(_endpoint_block, fn, x, t, params), n, seed, Purpose.LABEL, workers)
    exact = float(ic.evolve(t, params.sigma_bar, params.b_bar).derivative(x, k))
    return TransportReport(summarize(values), exact)


def _compose(f, ic, y):
    return f(ic(y))


def functional_label_check(
    ic: InitialCondition,
    f: Callable,
    t: float,
    x: float,
    params: DiffusionParams,
    n: int,
    seed: int,
    workers: int | None = None,
) -> TransportReport:
    """Transport ``f(h)`` as if it moved with the same process as ``h``: ``E f(ic(X_t))`` vs ``f(E ic(X_t))``.

    The two agree only for affine ``f``; for a quadratic ``f`` they differ by
    ``f''/2 * Var ic(X_t)``.
    """
    comp = partial(_compose, f, ic)
    (values,) = map_blocks(partial(_endpoint_block, comp, x, t, params), n, seed, Purpose.LABEL, workers)
    exact = float(f(ic.evolve(t, params.sigma_bar, params.b_bar)(x)))
    return TransportReport(summarize(values), exact)
