"""Backward-time diffusion paths and exponential branching clocks.

All processes run in elapsed backward time ``s`` measured from the query point
``(t, x)``; the physical time of a path sample is ``t - s``.

``sigma_bar`` is a variance rate: a step of length ``dt`` has Gaussian
increment variance ``sigma_bar * dt``. With ``sigma_bar = 2`` the generator is
``d^2/dx^2`` (the KPZ and phi^4 equations); ``sigma_bar = 1`` gives
``(1/2) d^2/dx^2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import NamedTuple

import numpy as np

from .noise_field import GridSpec
from .stats import Estimate, summarize
from .streams import Purpose, map_blocks


@dataclass(frozen=True)
class SpaceTimePoint:
    t: float
    x: float

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"remaining time must be >= 0, got {self.t}")


@dataclass(frozen=True)
class DiffusionParams:
    sigma_bar: float = 1.0
    b_bar: float = 0.0
    dt_path: float = 0.01

    def __post_init__(self):
        if not self.sigma_bar > 0:
            raise ValueError(f"sigma_bar must be positive, got {self.sigma_bar}")
        if not self.dt_path > 0:
            raise ValueError(f"dt_path must be positive, got {self.dt_path}")


@dataclass(frozen=True, eq=False)
class DiffusionPath:
    origin: SpaceTimePoint
    s: np.ndarray
    x: np.ndarray

    @property
    def duration(self) -> float:
        return float(self.s[-1])

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.x)


class ClockOutcome(NamedTuple):
    """``branched=False``: survived the whole horizon ``s``; otherwise rang at ``s``."""

    s: float
    branched: bool


def draw_clock(rate: float, horizon: float, rng) -> ClockOutcome:
    if not rate > 0:
        raise ValueError(f"clock rate must be positive, got {rate}")
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    e = rng.exponential(1.0 / rate)
    if e >= horizon:
        return ClockOutcome(horizon, False)
    return ClockOutcome(e, True)


def transition(x: float, duration: float, params: DiffusionParams, rng) -> float:
    """Exact endpoint of a constant-coefficient segment (one Gaussian draw)."""
    if duration <= 0.0:
        return x
    return x + params.b_bar * duration + math.sqrt(params.sigma_bar * duration) * rng.standard_normal()


def time_grid(duration: float, dt_path: float) -> np.ndarray:
    """Steps of ``dt_path`` with a final partial step landing exactly on ``duration``."""
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    if duration == 0:
        return np.zeros(1)
    n_full = int(math.floor(duration / dt_path * (1 + 1e-12)))
    s = np.arange(n_full + 1) * dt_path
    if duration - s[-1] > 1e-12 * max(1.0, duration):
        s = np.append(s, duration)
    else:
        s[-1] = duration
    return s


def simulate_segment(start: SpaceTimePoint, duration: float, params: DiffusionParams, rng) -> DiffusionPath:
    s = time_grid(duration, params.dt_path)
    ds = np.diff(s)
    steps = params.b_bar * ds + np.sqrt(params.sigma_bar * ds) * rng.standard_normal(ds.size)
    x = start.x + np.concatenate(([0.0], np.cumsum(steps)))
    return DiffusionPath(start, s, x)


def simulate_paths(x0: float, duration: float, params: DiffusionParams, rng, n: int):
    """``n`` independent paths on a shared time grid; returns ``(s, X)`` with ``X.shape == (n, len(s))``."""
    s = time_grid(duration, params.dt_path)
    ds = np.diff(s)
    g = rng.standard_normal((n, ds.size))
    steps = params.b_bar * ds + np.sqrt(params.sigma_bar * ds) * g
    X = np.empty((n, s.size))
    X[:, 0] = x0
    np.cumsum(steps, axis=1, out=X[:, 1:])
    X[:, 1:] += x0
    return s, X


def kpz_diffusion_params(dt_path: float = 0.01) -> DiffusionParams:
    """Generator d^2/dx^2: Gaussian increments of variance 2*dt, no drift."""
    return DiffusionParams(sigma_bar=2.0, b_bar=0.0, dt_path=dt_path)


def default_dt_path(grid: GridSpec, sigma_bar: float, substeps: int = 1) -> float:
    """``min(dt_cell, dx^2/(4 sigma_bar))`` shrunk to divide ``dt_cell``, then split into ``substeps``.

    Dividing ``dt_cell`` keeps path steps from straddling time-cell boundaries
    when the query time lies on the grid.
    """
    base = min(grid.dt_cell, grid.dx**2 / (4.0 * sigma_bar))
    per_cell = math.ceil(grid.dt_cell / base - 1e-9)
    return grid.dt_cell / (per_cell * substeps)


def _heat_block(ic, t, x, params, rng, size):
    g = rng.standard_normal(size)
    xt = x + params.b_bar * t + math.sqrt(params.sigma_bar * t) * g
    return (np.asarray(ic(xt), dtype=float),)


def heat_estimate(ic, t: float, x: float, params: DiffusionParams, n: int, seed: int, workers=None) -> Estimate:
    """Feynman-Kac estimate of ``E f(X_t)`` from exact Gaussian endpoints."""
    (values,) = map_blocks(partial(_heat_block, ic, t, x, params), n, seed, Purpose.PATH, workers)
    return summarize(values)
