"""Closed-form initial conditions.

Each family evaluates exact derivatives of any order (derivative labels are
applied to the initial condition when a labelled particle reaches time zero)
and knows its own image under the Gaussian semigroup
``f -> E f(x + b*t + N(0, sigma_bar*t))``, which the oracles use.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial as _NpPoly
from numpy.polynomial import hermite_e


class InitialCondition(ABC):
    """A function of x with exact derivatives."""

    #: highest derivative order supported, None for unbounded
    max_order: int | None = None

    def __call__(self, x):
        return self.derivative(x, 0)

    def derivative(self, x, order: int = 0):
        if order < 0:
            raise ValueError(f"derivative order must be >= 0, got {order}")
        if self.max_order is not None and order > self.max_order:
            raise ValueError(f"{type(self).__name__} supports derivatives up to order {self.max_order}")
        return self._derivative(x, order)

    @abstractmethod
    def _derivative(self, x, order: int): ...

    def evolve(self, t: float, sigma_bar: float, b_bar: float = 0.0) -> "InitialCondition":
        """Closed-form ``x -> E f(x + b_bar*t + sqrt(sigma_bar*t) G)``."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form heat evolution")


@dataclass(frozen=True)
class Zero(InitialCondition):
    def _derivative(self, x, order):
        return np.zeros_like(x, dtype=float) if np.ndim(x) else 0.0

    def evolve(self, t, sigma_bar, b_bar=0.0):
        return self


@dataclass(frozen=True)
class Constant(InitialCondition):
    c: float

    def _derivative(self, x, order):
        v = self.c if order == 0 else 0.0
        return np.full(np.shape(x), v) if np.ndim(x) else v

    def evolve(self, t, sigma_bar, b_bar=0.0):
        return self


@dataclass(frozen=True)
class Sine(InitialCondition):
    """``a * sin(k*x + phase)``."""

    a: float = 1.0
    k: float = 1.0
    phase: float = 0.0

    def _derivative(self, x, order):
        arg = self.k * x + self.phase + order * (math.pi / 2)
        return self.a * self.k**order * np.sin(arg)

    def evolve(self, t, sigma_bar, b_bar=0.0):
        damp = math.exp(-0.5 * self.k**2 * sigma_bar * t)
        return Sine(self.a * damp, self.k, self.phase + self.k * b_bar * t)


@dataclass(frozen=True)
class Gaussian(InitialCondition):
    """``a * exp(-(x - c)^2 / (2 w^2))``."""

    a: float = 1.0
    c: float = 0.0
    w: float = 1.0

    def __post_init__(self):
        if self.w <= 0:
            raise ValueError("Gaussian width must be positive")

    def _derivative(self, x, order):
        u = (np.asarray(x, dtype=float) - self.c) / self.w
        he = hermite_e.hermeval(u, [0.0] * order + [1.0])
        out = self.a * (-1.0) ** order * he * np.exp(-0.5 * u * u) / self.w**order
        return out if np.ndim(out) else float(out)

    def evolve(self, t, sigma_bar, b_bar=0.0):
        w2 = math.sqrt(self.w**2 + sigma_bar * t)
        return Gaussian(self.a * self.w / w2, self.c - b_bar * t, w2)


class Polynomial(InitialCondition):
    """Polynomial with ascending coefficients, ``coeffs[i] * x**i``."""

    def __init__(self, coeffs):
        self.coeffs = tuple(float(c) for c in coeffs)
        self._poly = _NpPoly(self.coeffs)
        self._derivs = {0: self._poly}

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __getstate__(self):
        return {"coeffs": self.coeffs}

    def __setstate__(self, state):
        self.__init__(state["coeffs"])

    def _derivative(self, x, order):
        p = self._derivs.get(order)
        if p is None:
            p = self._derivs[order] = self._poly.deriv(order)
        out = p(x)
        return out if np.ndim(out) else float(out)

    def evolve(self, t, sigma_bar, b_bar=0.0):
        # p(y + Z) = sum_j p^(j)(y) Z^j / j!, and E Z^(2m) = v^m (2m-1)!!
        v = sigma_bar * t
        degree = len(self.coeffs) - 1
        out = _NpPoly([0.0])
        for j in range(0, degree + 1, 2):
            moment = v ** (j // 2) * _double_factorial(j - 1)
            out = out + self._poly.deriv(j) * (moment / math.factorial(j))
        out = out(_NpPoly([b_bar * t, 1.0]))
        return Polynomial(out.coef)


def _double_factorial(n: int) -> int:
    return 1 if n <= 0 else n * _double_factorial(n - 2)


@dataclass(frozen=True)
class Sum(InitialCondition):
    terms: tuple

    def _derivative(self, x, order):
        return sum(term.derivative(x, order) for term in self.terms)

    def evolve(self, t, sigma_bar, b_bar=0.0):
        return Sum(tuple(term.evolve(t, sigma_bar, b_bar) for term in self.terms))


@dataclass(frozen=True)
class ExpOf(InitialCondition):
    """``exp(scale * inner(x))``; the Cole-Hopf image of an initial height profile.

    Only evaluation is supported: the processes that use it never attach
    derivative labels.
    """

    scale: float
    inner: InitialCondition
    max_order = 0

    def _derivative(self, x, order):
        return np.exp(self.scale * self.inner(x))


def parse_ic(text: str) -> InitialCondition:
    """Parse ``kind[:k=v,...]`` as used on the command line.

    >>> parse_ic("sine:a=0.1,k=1")
    Sine(a=0.1, k=1.0, phase=0.0)
    >>> parse_ic("poly:0,0,1")
    Polynomial([0.0, 0.0, 1.0])
    """
    kind, _, rest = text.strip().partition(":")
    kind = kind.lower()
    if kind == "poly":
        return Polynomial([float(c) for c in rest.split(",") if c.strip()])
    kwargs = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, _, val = item.partition("=")
        kwargs[key.strip()] = float(val)
    if kind == "zero":
        return Zero()
    if kind == "constant":
        return Constant(kwargs.get("c", 1.0))
    if kind == "sine":
        return Sine(**kwargs)
    if kind == "gaussian":
        return Gaussian(**kwargs)
    raise ValueError(f"unknown initial condition {text!r}")
