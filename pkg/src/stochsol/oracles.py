"""Deterministic reference solutions used to judge the Monte Carlo solvers.

None of these share code paths with the samplers: the heat kernel is an
adaptive quadrature, the Picard solver iterates the integral equations on a
grid refined from the noise lattice, and the finite-difference integrator
handles the noiseless nonlinear equations. Two oracles that overlap are
tested against each other before either is used as a judge.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy import integrate, linalg, special

from .initial import InitialCondition
from .noise_field import BoundaryPolicy, NoiseRealization, NoiseSign


class DivergenceError(RuntimeError):
    def __init__(self, message: str, iterate: int | None = None):
        super().__init__(message)
        self.iterate = iterate


def heat_kernel_convolution(
    ic: InitialCondition, t: float, x: float, sigma_bar: float = 1.0, b_bar: float = 0.0
) -> float:
    """``integral ic(y) N(y; x + b_bar t, sigma_bar t) dy`` by adaptive quadrature."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if t == 0:
        return float(ic(x))
    mean = x + b_bar * t
    sd = math.sqrt(sigma_bar * t)
    # integrate in standard units; the Gaussian tail beyond 12 sd is below 1e-30
    integrand = lambda z: float(ic(mean + sd * z)) * math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)  # noqa: E731
    value, err = integrate.quad(integrand, -12.0, 12.0, epsabs=1e-11, epsrel=1e-11, limit=400)
    if not err <= max(1e-9, 1e-10 * abs(value)):
        raise RuntimeError(f"heat kernel quadrature did not converge (error estimate {err:.3g})")
    return value


@dataclass
class GridFunction:
    """Values on spatial nodes at one time. ``period`` enables periodic interpolation."""

    x: np.ndarray
    values: np.ndarray
    t: float
    period: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.x.shape != self.values.shape:
            raise ValueError("nodes and values must have the same shape")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid function has non-finite values")

    def at(self, x) -> float | np.ndarray:
        out = np.interp(x, self.x, self.values, period=self.period)
        return float(out) if np.ndim(out) == 0 else out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "value"])
            for xi, vi in zip(self.x, self.values):
                writer.writerow([repr(float(xi)), repr(float(vi))])


@dataclass(frozen=True)
class CompareReport:
    sup: float
    l2: float
    at_x: float | None = None
    tolerance: float | None = None

    @property
    def passed(self) -> bool | None:
        if self.tolerance is None:
            return None
        return self.sup <= self.tolerance


def compare(a, b, x: float | None = None, tolerance: float | None = None) -> CompareReport:
    """Sup and discrete L2 distance between two grid functions or scalars (or one of each at ``x``)."""
    a_grid, b_grid = isinstance(a, GridFunction), isinstance(b, GridFunction)
    if a_grid and b_grid:
        if a.x.shape != b.x.shape or not np.allclose(a.x, b.x):
            raise ValueError("grid functions live on different nodes")
        diff = a.values - b.values
        dx = (a.x[1] - a.x[0]) if a.x.size > 1 else 1.0
        at_x = None if x is None else abs(a.at(x) - b.at(x))
        return CompareReport(float(np.max(np.abs(diff))), float(np.sqrt(np.sum(diff**2) * dx)), at_x, tolerance)
    if a_grid or b_grid:
        if x is None:
            raise ValueError("comparing a grid function with a scalar needs a query point x")
        grid, scalar = (a, b) if a_grid else (b, a)
        d = abs(grid.at(x) - float(scalar))
        return CompareReport(d, d, d, tolerance)
    d = abs(float(a) - float(b))
    return CompareReport(d, d, d, tolerance)


class PicardEquation(Enum):
    Z = "z"  # dZ = Z'' - Z + lam Z xi
    DB1 = "db1"  # dh = h'' - mu h + lam (h')^2 + mu h + sign xi
    PHI4 = "phi4"  # dPhi = Phi'' - Phi^3 + sign xi


_DEFAULT_SIGN = {
    PicardEquation.Z: NoiseSign.PLUS_XI,
    PicardEquation.DB1: NoiseSign.MINUS_XI,
    PicardEquation.PHI4: NoiseSign.PLUS_XI,
}


def heat_matrix(n: int, h: float, length: float, variance: float) -> np.ndarray:
    """Transition matrix of a Gaussian step on a periodic grid of cell-centred nodes.

    Entry ``[i, l]`` is the probability that ``x_i + N(0, variance)`` lands in
    cell ``l`` (all periodic images), i.e. the exact semigroup acting on a
    piecewise-constant function. Rows sum to one.
    """
    if variance <= 0:
        return np.eye(n)
    sd = math.sqrt(variance)
    wraps = math.ceil(12 * sd / length) + 1
    d = np.arange(n) * h
    row = np.zeros(n)
    for m in range(-wraps, wraps + 1):
        off = d + m * length
        row += special.ndtr((off + h / 2) / sd) - special.ndtr((off - h / 2) / sd)
    row /= row.sum()
    return linalg.circulant(row).T


def _periodic_d1(u, h):
    return (np.roll(u, -1, axis=-1) - np.roll(u, 1, axis=-1)) / (2 * h)


def _periodic_d2(u, h):
    return (np.roll(u, -1, axis=-1) - 2 * u + np.roll(u, 1, axis=-1)) / h**2


def picard_iterate(
    equation: PicardEquation,
    noise: NoiseRealization,
    n_iters: int,
    ic: InitialCondition,
    t_end: float,
    lam: float = 1.0,
    mu: float = 1.0,
    sigma_bar: float = 2.0,
    noise_sign: NoiseSign | None = None,
    refine_x: int = 4,
    refine_t: int = 4,
) -> GridFunction:
    """``n_iters`` Picard iterates of an integral equation on a refinement of the noise lattice.

    Nodes are cell centres of a grid ``refine_x`` times finer than the noise
    cells (so the noise is represented exactly), time steps are ``refine_t``
    per noise row, and time integrals use the trapezoid rule with each
    interval reading its own noise row. The zeroth iterate is 0. The returned
    function holds the last iterate at ``t_end``; ``meta["sup_diffs"]`` lists
    the space-time sup difference between successive iterates.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be >= 1")
    if noise.boundary_policy is not BoundaryPolicy.PERIODIC_IN_X:
        raise ValueError("the Picard oracle needs a periodic noise grid")
    spec = noise.spec
    if not 0 <= t_end <= spec.t_max:
        raise ValueError(f"t_end={t_end} outside [0, {spec.t_max}]")
    tau = spec.dt_cell / refine_t
    n_t = int(round(t_end / tau))
    if abs(n_t * tau - t_end) > 1e-9 * max(1.0, t_end):
        raise ValueError(f"t_end={t_end} is not a multiple of the Picard time step {tau}")
    sign = (noise_sign or _DEFAULT_SIGN[equation]).factor

    n_x = spec.nx * refine_x
    h = spec.dx / refine_x
    x = spec.x_min + (np.arange(n_x) + 0.5) * h
    kernels = [heat_matrix(n_x, h, spec.length, sigma_bar * j * tau) for j in range(n_t + 1)]
    xi = sign * noise.cells[np.arange(n_t) // refine_t][:, np.arange(n_x) // refine_x]

    if equation is PicardEquation.Z:
        decay = lambda s: math.exp(-s)  # noqa: E731
        source = lambda u, xi_: lam * u * xi_  # noqa: E731
    elif equation is PicardEquation.DB1:
        decay = lambda s: math.exp(-mu * s)  # noqa: E731
        source = lambda u, xi_: lam * _periodic_d1(u, h) ** 2 + mu * u + xi_  # noqa: E731
    else:
        decay = lambda s: 1.0  # noqa: E731
        source = lambda u, xi_: -(u**3) + xi_  # noqa: E731

    u0 = np.asarray(ic(x), dtype=float)
    free = np.stack([decay(n * tau) * (kernels[n] @ u0) for n in range(n_t + 1)])
    u = np.zeros_like(free)
    history = []
    for k in range(n_iters):
        new = free.copy()
        if n_t > 0:
            with np.errstate(over="ignore", invalid="ignore"):
                left = source(u[:-1], xi)  # integrand at the left end of each interval
                right = source(u[1:], xi)  # ... and at its right end, same noise row
                for j in range(n_t + 1):
                    c = 0.5 * tau * decay(j * tau)
                    if j >= 1:
                        new[j:] += c * (left[: n_t - j + 1] @ kernels[j].T)
                    if j <= n_t - 1:
                        new[j + 1:] += c * (right[: n_t - j] @ kernels[j].T)
        if not np.all(np.isfinite(new)):
            raise DivergenceError(f"Picard iterate {k + 1} is not finite", k + 1)
        history.append(float(np.max(np.abs(new - u))))
        u = new
    return GridFunction(x, u[-1].copy(), t_end, spec.length,
                        {"sup_diffs": history, "field": u, "times": np.arange(n_t + 1) * tau})


class FdEquation(Enum):
    KPZ_NOISELESS = "kpz"  # dh = (sigma_bar/2) h'' + lam (h')^2
    PHI4_NOISELESS = "phi4"  # dPhi = (sigma_bar/2) Phi'' - Phi^3


def fd_integrate(
    equation: FdEquation,
    ic: InitialCondition,
    t_end: float,
    x_min: float,
    x_max: float,
    nx: int,
    dt_scheme: float | None = None,
    sigma_bar: float = 2.0,
    lam: float = 1.0,
) -> GridFunction:
    """Explicit Euler with central differences on a periodic node grid ``x_min + j dx``.

    ``dt_scheme`` defaults to half the bound ``dx^2/(2 sigma_bar)``; the last
    step is shortened to land on ``t_end``.
    """
    dx = (x_max - x_min) / nx
    bound = dx**2 / (2 * sigma_bar)
    dt = bound / 2 if dt_scheme is None else dt_scheme
    if dt > bound * (1 + 1e-12):
        raise ValueError(f"dt={dt} violates the stability bound dx^2/(2 sigma_bar)={bound}")
    x = x_min + np.arange(nx) * dx
    u = np.asarray(ic(x), dtype=float).copy()
    if u.shape != x.shape:
        u = np.full(x.shape, float(u))
    diff = 0.5 * sigma_bar
    t = 0.0
    while t < t_end - 1e-14:
        step = min(dt, t_end - t)
        with np.errstate(over="ignore", invalid="ignore"):
            if equation is FdEquation.KPZ_NOISELESS:
                rhs = diff * _periodic_d2(u, dx) + lam * _periodic_d1(u, dx) ** 2
            else:
                rhs = diff * _periodic_d2(u, dx) - u**3
            u = u + step * rhs
        t += step
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"finite-difference solution blew up at t={t}")
    return GridFunction(x, u, t_end, x_max - x_min, {"dt": dt})


def branching_moments(clock_rate: float, rules, t: float) -> tuple[float, float]:
    """Mean event count and mean leaf count of a branching menu, from its moment ODEs.

    With ``m = sum p_i * offspring_i`` and ``nu = sum p_i [rule samples noise]``,
    one particle with remaining time ``t`` has

        E' = r (m - 1) E + r,        E(0) = 0
        L' = r (m - 1) L + r nu,     L(0) = 1

    where leaves count both initial-condition and noise leaves.
    """
    m = sum(r.probability * r.offspring for r in rules)
    nu = sum(r.probability for r in rules if r.samples_noise)
    rate = clock_rate

    def rhs(_, y):
        return [rate * (m - 1) * y[0] + rate, rate * (m - 1) * y[1] + rate * nu]

    if t == 0:
        return 0.0, 1.0
    sol = integrate.solve_ivp(rhs, (0.0, t), [0.0, 1.0], rtol=1e-11, atol=1e-12)
    return float(sol.y[0, -1]), float(sol.y[1, -1])
