import math
import pickle

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochsol.initial import Constant, ExpOf, Gaussian, Polynomial, Sine, Sum, Zero, parse_ic
from stochsol.oracles import heat_kernel_convolution

FAMILIES = [
    Sine(0.7, 1.3, 0.2),
    Gaussian(1.5, 0.3, 0.8),
    Polynomial([1.0, -2.0, 0.5, 0.25]),
    Constant(2.0),
    Zero(),
    Sum((Sine(1, 2, 0), Polynomial([0, 1]))),
]


@pytest.mark.parametrize("f", FAMILIES, ids=repr)
def test_derivative_zero_is_evaluation(f):
    x = np.linspace(-2, 2, 7)
    assert np.allclose(f.derivative(x, 0), f(x))


@pytest.mark.parametrize("f", FAMILIES, ids=repr)
@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivatives_match_central_differences(f, order):
    # the central difference of the (order-1)th derivative is O(h^2) accurate
    x = np.linspace(-1.5, 1.5, 5)
    errs = []
    for h in (1e-2, 5e-3):
        fd = (f.derivative(x + h, order - 1) - f.derivative(x - h, order - 1)) / (2 * h)
        errs.append(np.max(np.abs(fd - f.derivative(x, order))))
    assert errs[1] <= max(errs[0] / 3.0, 1e-9)


@pytest.mark.parametrize("f", FAMILIES[:4], ids=repr)
@pytest.mark.parametrize("t,sigma_bar,b_bar", [(0.25, 2.0, 0.0), (0.5, 1.0, 0.3)])
def test_evolve_matches_quadrature(f, t, sigma_bar, b_bar):
    ev = f.evolve(t, sigma_bar, b_bar)
    for x in (-1.0, 0.0, 0.7):
        # quadrature oracle takes variance sigma_bar*t and mean shift b_bar*t
        assert ev(x) == pytest.approx(heat_kernel_convolution(f, t, x, sigma_bar, b_bar), abs=1e-9)


def test_sine_evolution_closed_form():
    assert Sine(1, 1, 0).evolve(0.5, 2.0)(1.0) == pytest.approx(math.exp(-0.5) * math.sin(1.0))


def test_polynomial_second_moment():
    assert Polynomial([0, 0, 1]).evolve(0.3, 1.0)(2.0) == pytest.approx(4.3)


def test_pickle_roundtrip():
    for f in FAMILIES + [ExpOf(0.5, Sine())]:
        g = pickle.loads(pickle.dumps(f))
        assert g == f
        assert np.allclose(g(np.array([0.1, 0.5])), f(np.array([0.1, 0.5])))


def test_expof_has_no_derivatives():
    f = ExpOf(0.25, Sine(1, 1, 0))
    assert f(1.0) == pytest.approx(math.exp(0.25 * math.sin(1.0)))
    with pytest.raises(ValueError):
        f.derivative(1.0, 1)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        Sine().derivative(0.0, -1)


def test_parse_ic():
    assert parse_ic("sine:a=0.1,k=1") == Sine(0.1, 1.0, 0.0)
    assert parse_ic("poly:0,0,1") == Polynomial([0, 0, 1])
    assert parse_ic("constant:c=0.5") == Constant(0.5)
    assert parse_ic("gaussian:a=2,w=0.5") == Gaussian(2.0, 0.0, 0.5)
    assert parse_ic("zero") == Zero()
    with pytest.raises(ValueError):
        parse_ic("cosine:a=1")


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=1, max_size=5), st.floats(0, 2), st.floats(0.1, 3), st.floats(-2, 2))
def test_polynomial_evolve_is_linear_semigroup(coeffs, t, sigma_bar, x):
    p = Polynomial(coeffs)
    # semigroup property: evolving by t then by t equals evolving by 2t
    twice = p.evolve(t, sigma_bar).evolve(t, sigma_bar)(x)
    once = p.evolve(2 * t, sigma_bar)(x)
    assert twice == pytest.approx(once, rel=1e-9, abs=1e-9)


@settings(max_examples=60)
@given(st.floats(0.1, 2), st.floats(0.1, 3), st.floats(0, 1), st.floats(0.1, 3), st.floats(-3, 3))
def test_gaussian_evolve_semigroup(a, w, t, sigma_bar, x):
    g = Gaussian(a, 0.0, w)
    assert g.evolve(t, sigma_bar).evolve(t, sigma_bar)(x) == pytest.approx(g.evolve(2 * t, sigma_bar)(x), rel=1e-12)
