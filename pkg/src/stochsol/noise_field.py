"""Space-time white noise on a rectangular grid.

The noise is piecewise constant: each cell of an ``nt x nx`` grid holds an
independent N(0, 1/(dx*dt_cell)) value, which is the L2 projection of white
noise onto cell indicators. Queries use the containing cell, never an
interpolation, so samplings at points in distinct cells stay independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .streams import Purpose, make_rng

# Relative slack for floor indexing at cell boundaries (keeps lower-inclusive
# cells stable under rounding of x_min + j*dx).
_FLOOR_SLACK = 1e-9
_MAGIC = b"STOCHSOL-NOISE-1\n"


class BoundaryPolicy(Enum):
    PERIODIC_IN_X = "periodic"
    ZERO_OUTSIDE = "zero"


class NoiseMode(Enum):
    """Which probability space the noise samplings live in.

    FIXED_REALIZATION reads one stored realization, giving the partial
    expectation over the branching/diffusion randomness only.
    RESAMPLED_PER_EVENT draws an independent Gaussian at every branching event.
    """

    FIXED_REALIZATION = "fixed"
    RESAMPLED_PER_EVENT = "resampled"


class NoiseSign(Enum):
    """Sign of the noise term on the right-hand side of the equation."""

    PLUS_XI = 1
    MINUS_XI = -1

    @property
    def factor(self) -> float:
        return float(self.value)


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    nx: int
    t_max: float
    nt: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if not self.t_max > 0:
            raise ValueError(f"need t_max > 0, got {self.t_max}")
        if int(self.nx) != self.nx or self.nx < 1 or int(self.nt) != self.nt or self.nt < 1:
            raise ValueError(f"cell counts must be positive integers, got nx={self.nx}, nt={self.nt}")

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return self.length / self.nx

    @property
    def dt_cell(self) -> float:
        return self.t_max / self.nt

    @property
    def cell_variance(self) -> float:
        return 1.0 / (self.dx * self.dt_cell)

    def _t_eps(self) -> float:
        return 1e-12 * max(1.0, self.t_max)

    def row(self, t: float) -> int:
        if not -self._t_eps() <= t <= self.t_max + self._t_eps():
            raise ValueError(f"t={t} outside noise horizon [0, {self.t_max}]")
        r = math.floor(t / self.dt_cell + _FLOOR_SLACK)
        return min(max(r, 0), self.nt - 1)

    def col(self, x: float, periodic: bool) -> int | None:
        u = (x - self.x_min) / self.dx + _FLOOR_SLACK
        if periodic:
            return int(math.floor(u)) % self.nx
        c = math.floor(u)
        if c < 0 or c >= self.nx:
            return None
        return c


@dataclass(frozen=True, eq=False)
class NoiseRealization:
    """An immutable grid of noise cells; safe to share between readers."""

    spec: GridSpec
    seed: int
    cells: np.ndarray
    boundary_policy: BoundaryPolicy = BoundaryPolicy.PERIODIC_IN_X

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.float64, order="C")
        if cells.shape != (self.spec.nt, self.spec.nx):
            raise ValueError(f"cells shape {cells.shape} != {(self.spec.nt, self.spec.nx)}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def periodic(self) -> bool:
        return self.boundary_policy is BoundaryPolicy.PERIODIC_IN_X

    @property
    def cell_std(self) -> float:
        return math.sqrt(self.spec.cell_variance)

    @classmethod
    def constant(cls, spec: GridSpec, value: float, boundary_policy=BoundaryPolicy.PERIODIC_IN_X):
        return cls(spec, -1, np.full((spec.nt, spec.nx), float(value)), boundary_policy)

    @classmethod
    def zeros(cls, spec: GridSpec, boundary_policy=BoundaryPolicy.PERIODIC_IN_X):
        return cls.constant(spec, 0.0, boundary_policy)

    def cell_index(self, t: float, x: float) -> tuple[int, int | None]:
        """(row, col) of the cell containing (t, x); col is None outside a zero boundary."""
        return self.spec.row(t), self.spec.col(x, self.periodic)

    def value(self, t: float, x: float) -> float:
        row, col = self.cell_index(t, x)
        if col is None:
            return 0.0
        return float(self.cells[row, col])

    def values(self, t, x) -> np.ndarray:
        """Vectorized :meth:`value` over broadcastable arrays of times and positions."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=np.float64), np.asarray(x, dtype=np.float64))
        spec = self.spec
        eps = spec._t_eps()
        if t.size and (t.min() < -eps or t.max() > spec.t_max + eps):
            raise ValueError(f"times outside noise horizon [0, {spec.t_max}]")
        rows = np.clip(np.floor(t / spec.dt_cell + _FLOOR_SLACK).astype(np.int64), 0, spec.nt - 1)
        u = np.floor((x - spec.x_min) / spec.dx + _FLOOR_SLACK).astype(np.int64)
        if self.periodic:
            return self.cells[rows, u % spec.nx]
        inside = (u >= 0) & (u < spec.nx)
        out = np.zeros(t.shape)
        out[inside] = self.cells[rows[inside], u[inside]]
        return out

    def dump(self, path) -> None:
        """Write a header line of JSON metadata followed by row-major little-endian float64 cells."""
        header = {
            "x_min": self.spec.x_min,
            "x_max": self.spec.x_max,
            "nx": self.spec.nx,
            "t_max": self.spec.t_max,
            "nt": self.spec.nt,
            "seed": self.seed,
            "boundary_policy": self.boundary_policy.value,
        }
        with open(path, "wb") as fh:
            fh.write(_MAGIC)
            fh.write(json.dumps(header, sort_keys=True).encode() + b"\n")
            fh.write(self.cells.astype("<f8").tobytes(order="C"))

    @classmethod
    def load(cls, path) -> "NoiseRealization":
        data = Path(path).read_bytes()
        if not data.startswith(_MAGIC):
            raise ValueError(f"{path}: not a noise realization dump")
        rest = data[len(_MAGIC):]
        newline = rest.index(b"\n")
        header = json.loads(rest[:newline])
        spec = GridSpec(header["x_min"], header["x_max"], header["nx"], header["t_max"], header["nt"])
        cells = np.frombuffer(rest[newline + 1:], dtype="<f8")
        if cells.size != spec.nt * spec.nx:
            raise ValueError(f"{path}: expected {spec.nt * spec.nx} cells, found {cells.size}")
        return cls(spec, header["seed"], cells.reshape(spec.nt, spec.nx),
                   BoundaryPolicy(header["boundary_policy"]))


def build_realization(
    spec: GridSpec, seed: int, boundary_policy: BoundaryPolicy = BoundaryPolicy.PERIODIC_IN_X
) -> NoiseRealization:
    rng = make_rng(seed, Purpose.NOISE)
    cells = rng.standard_normal((spec.nt, spec.nx)) * math.sqrt(spec.cell_variance)
    return NoiseRealization(spec, int(seed), cells, boundary_policy)


def noise_at(real: NoiseRealization, t: float, x: float) -> float:
    return real.value(t, x)


def path_noise_integrals(real: NoiseRealization, s, positions, t_origin: float) -> np.ndarray:
    """Riemann sums of the noise along paths, one per row of ``positions``.

    Step ``k`` contributes ``xi(t_origin - s_k - ds_k/2, x_k) * ds_k``: the
    position is the left endpoint, the time is the step midpoint so a step
    never reads the row on the wrong side of a time-cell boundary.
    """
    s = np.asarray(s, dtype=np.float64)
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    if positions.shape[-1] != s.size:
        raise ValueError("positions must have one column per time sample")
    duration = s[-1] - s[0]
    eps = real.spec._t_eps()
    if duration > t_origin + eps or t_origin > real.spec.t_max + eps:
        raise ValueError(
            f"path of duration {duration} from t={t_origin} exits the noise horizon {real.spec.t_max}"
        )
    ds = np.diff(s)
    if ds.size == 0:
        return np.zeros(positions.shape[0])
    times = t_origin - s[:-1] - 0.5 * ds
    xi = real.values(times[None, :], positions[:, :-1])
    return xi @ ds


def path_noise_integral(real: NoiseRealization, path, t_origin: float) -> float:
    return float(path_noise_integrals(real, path.s, path.x[None, :], t_origin)[0])


def event_noise(real: NoiseRealization, mode: NoiseMode, t: float, x: float, rng) -> float:
    if mode is NoiseMode.FIXED_REALIZATION:
        return real.value(t, x)
    row, col = real.cell_index(t, x)
    draw = rng.standard_normal() * real.cell_std
    return 0.0 if col is None else draw
