import math

import numpy as np
import pytest
from scipy import integrate, stats

from stochsol.diffusion_paths import (
    DiffusionParams,
    SpaceTimePoint,
    default_dt_path,
    draw_clock,
    heat_estimate,
    kpz_diffusion_params,
    simulate_paths,
    simulate_segment,
    time_grid,
    transition,
)
from stochsol.initial import Sine
from stochsol.noise_field import GridSpec
from stochsol.streams import Purpose, SampleStreams, make_rng


def _clocks(rate, horizon, n, seed=0):
    streams = SampleStreams(seed, Purpose.TREE)
    return [draw_clock(rate, horizon, streams[i]) for i in range(n)]


def test_validation():
    with pytest.raises(ValueError):
        SpaceTimePoint(-0.1, 0.0)
    with pytest.raises(ValueError):
        DiffusionParams(0.0)
    with pytest.raises(ValueError):
        DiffusionParams(1.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        draw_clock(0.0, 1.0, make_rng(0, Purpose.TREE))


def test_clock_zero_horizon_survives():
    rng = make_rng(0, Purpose.TREE)
    assert all(draw_clock(1.0, 0.0, rng) == (0.0, False) for _ in range(100))


def test_clock_survival_frequency():
    out = _clocks(1.0, 1.0, 100_000)
    survived = np.array([not c.branched for c in out], dtype=float)
    p = math.exp(-1)
    assert abs(survived.mean() - p) <= 3 * math.sqrt(p * (1 - p) / survived.size)


def test_clock_conditional_mean_and_ks():
    out = _clocks(2.0, 1.0, 100_000, seed=1)
    s = np.array([c.s for c in out if c.branched])
    num, _ = integrate.quad(lambda u: u * 2 * math.exp(-2 * u), 0, 1)
    exact = num / (1 - math.exp(-2))
    assert exact == pytest.approx(0.3435, abs=1e-4)
    assert abs(s.mean() - exact) <= 3 * s.std(ddof=1) / math.sqrt(s.size)
    cdf = lambda u: (1 - np.exp(-2 * u)) / (1 - math.exp(-2))  # noqa: E731
    assert stats.kstest(s, cdf).pvalue > 1e-3


def test_time_grid_lands_on_duration():
    s = time_grid(0.35, 0.1)
    assert s[0] == 0 and s[-1] == 0.35 and np.all(np.diff(s) > 0)
    assert np.allclose(np.diff(s)[:-1], 0.1)
    assert np.array_equal(time_grid(0.0, 0.1), [0.0])
    assert len(time_grid(0.3, 0.1)) == 4


def test_segment_zero_duration():
    p = simulate_segment(SpaceTimePoint(1.0, 0.4), 0.0, DiffusionParams(), make_rng(0, Purpose.PATH))
    assert list(p.s) == [0.0] and list(p.x) == [0.4]


@pytest.mark.parametrize("b_bar,sigma_bar,T", [(0.0, 1.0, 1.0), (2.0, 0.5, 2.0)])
def test_endpoint_moments(b_bar, sigma_bar, T):
    _, X = simulate_paths(0.0, T, DiffusionParams(sigma_bar, b_bar, 0.1), make_rng(2, Purpose.PATH), 100_000)
    end = X[:, -1]
    n = end.size
    assert abs(end.mean() - b_bar * T) <= 3 * math.sqrt(sigma_bar * T / n)
    assert abs(end.var(ddof=1) - sigma_bar * T) <= 3 * sigma_bar * T * math.sqrt(2 / n)


def test_increment_moments():
    params = DiffusionParams(0.5, 1.0, 0.05)
    s, X = simulate_paths(0.0, 1.0, params, make_rng(3, Purpose.PATH), 20_000)
    inc = np.diff(X, axis=1).ravel()
    n = inc.size
    assert abs(inc.mean() - 0.05) <= 3 * math.sqrt(0.025 / n)
    assert abs(inc.var() - 0.025) <= 3 * 0.025 * math.sqrt(2 / n)
    lag = np.corrcoef(np.diff(X, axis=1)[:, :-1].ravel(), np.diff(X, axis=1)[:, 1:].ravel())[0, 1]
    assert abs(lag) < 4 / math.sqrt(n)


def test_segment_deterministic_given_stream():
    params = DiffusionParams(1.0, 0.0, 0.01)
    a = simulate_segment(SpaceTimePoint(1, 0), 0.5, params, make_rng(7, Purpose.PATH))
    b = simulate_segment(SpaceTimePoint(1, 0), 0.5, params, make_rng(7, Purpose.PATH))
    assert np.array_equal(a.x, b.x)
    assert a.duration == 0.5 and a.increments.size == a.s.size - 1


def test_transition_zero_duration():
    assert transition(1.5, 0.0, DiffusionParams(), make_rng(0, Purpose.PATH)) == 1.5


def test_kpz_params():
    p = kpz_diffusion_params()
    assert p.sigma_bar == 2.0 and p.b_bar == 0.0


@pytest.mark.parametrize("sigma_bar,decay", [(2.0, math.exp(-0.5)), (1.0, math.exp(-0.25))])
def test_heat_decay_of_sine(sigma_bar, decay):
    x = 1.1
    est = heat_estimate(Sine(1, 1, 0), 0.5, x, DiffusionParams(sigma_bar), 100_000, 4)
    assert abs(est.mean - decay * math.sin(x)) <= 3 * est.stderr


def test_default_dt_path_divides_cell():
    g = GridSpec(0, 2 * math.pi, 8, 1.0, 16)
    dt = default_dt_path(g, 2.0)
    assert dt <= min(g.dt_cell, g.dx**2 / 8) + 1e-15
    assert (g.dt_cell / dt) == pytest.approx(round(g.dt_cell / dt))
    assert default_dt_path(g, 2.0, 4) == pytest.approx(dt / 4)
