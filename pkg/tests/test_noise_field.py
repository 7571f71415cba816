import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stochsol.diffusion_paths import DiffusionParams, simulate_segment, SpaceTimePoint
from stochsol.noise_field import (
    BoundaryPolicy,
    GridSpec,
    NoiseMode,
    NoiseRealization,
    NoiseSign,
    build_realization,
    event_noise,
    noise_at,
    path_noise_integral,
    path_noise_integrals,
)
from stochsol.streams import Purpose, make_rng


def test_gridspec_derived_quantities():
    g = GridSpec(-1.0, 1.0, 20, 0.5, 50)
    assert g.dx == pytest.approx(0.1)
    assert g.dt_cell == pytest.approx(0.01)
    assert g.cell_variance == pytest.approx(1000.0)


@pytest.mark.parametrize("args", [(1, 0, 4, 1, 4), (0, 1, 0, 1, 4), (0, 1, 4, 0, 4), (0, 1, 4, 1, 0)])
def test_gridspec_rejects_invalid(args):
    with pytest.raises(ValueError):
        GridSpec(*args)


def test_noise_sign_factor():
    assert NoiseSign.PLUS_XI.factor == 1.0 and NoiseSign.MINUS_XI.factor == -1.0


def test_rebuild_is_bit_identical(tmp_path):
    g = GridSpec(0, 1, 16, 1, 8)
    a = build_realization(g, 42)
    b = build_realization(g, 42)
    assert a.cells.tobytes() == b.cells.tobytes()
    a.dump(tmp_path / "a.bin")
    b.dump(tmp_path / "b.bin")
    assert (tmp_path / "a.bin").read_bytes() == (tmp_path / "b.bin").read_bytes()


def test_dump_load_roundtrip(tmp_path):
    g = GridSpec(-2, 3, 5, 0.7, 3)
    a = build_realization(g, 9, BoundaryPolicy.ZERO_OUTSIDE)
    a.dump(tmp_path / "n.bin")
    b = NoiseRealization.load(tmp_path / "n.bin")
    assert b.spec == g and b.seed == 9 and b.boundary_policy is BoundaryPolicy.ZERO_OUTSIDE
    assert b.cells.tobytes() == a.cells.tobytes()


def test_load_rejects_garbage(tmp_path):
    (tmp_path / "bad").write_bytes(b"hello")
    with pytest.raises(ValueError):
        NoiseRealization.load(tmp_path / "bad")


def test_cells_are_read_only():
    real = build_realization(GridSpec(0, 1, 4, 1, 4), 1)
    with pytest.raises(ValueError):
        real.cells[0, 0] = 1.0


def test_cell_std_statistics():
    # dx = 0.1, dt_cell = 0.01 -> std 31.62; 10^5 cells
    g = GridSpec(0, 40, 400, 2.5, 250)
    real = build_realization(g, 3)
    assert real.cells.size == 100_000
    assert real.cells.std() == pytest.approx(1 / math.sqrt(0.001), rel=0.02)


def test_seeds_uncorrelated():
    g = GridSpec(0, 1, 100, 1, 100)
    a = build_realization(g, 1).cells.ravel()
    b = build_realization(g, 2).cells.ravel()
    assert abs(np.corrcoef(a, b)[0, 1]) <= 3 / math.sqrt(a.size)


def test_variance_scaling_between_grids():
    g1 = GridSpec(0, 1, 200, 1, 200)
    g2 = GridSpec(0, 1, 50, 1, 100)
    v1 = build_realization(g1, 4).cells.var()
    v2 = build_realization(g2, 4).cells.var()
    expected = (g2.dx * g2.dt_cell) / (g1.dx * g1.dt_cell)
    # sd of a variance ratio estimate ~ sqrt(2/n1 + 2/n2)
    assert v1 / v2 == pytest.approx(expected, rel=5 * math.sqrt(2 / 40_000 + 2 / 5_000))


def test_noise_at_indexing(grid, noise):
    dx, dt = grid.dx, grid.dt_cell
    assert noise_at(noise, 0.1 * dt, 0.2 * dx) == noise_at(noise, 0.9 * dt, 0.7 * dx)
    assert noise_at(noise, 0.5 * dt, 0.5 * dx) == noise.cells[0, 0]
    assert noise_at(noise, 0.5 * dt, 1.5 * dx) == noise.cells[0, 1]
    # lower-inclusive cell boundaries; t = t_max maps to the last row
    assert noise_at(noise, 3 * dt, 2 * dx) == noise.cells[3, 2]
    assert noise_at(noise, grid.t_max, 0.5 * dx) == noise.cells[-1, 0]
    # periodic wrap
    assert noise_at(noise, 0.5 * dt, grid.x_max + 0.5 * dx) == noise.cells[0, 0]
    assert noise_at(noise, 0.5 * dt, grid.x_min - 0.5 * dx) == noise.cells[0, -1]


def test_noise_at_zero_outside():
    g = GridSpec(0, 1, 4, 1, 4)
    real = build_realization(g, 1, BoundaryPolicy.ZERO_OUTSIDE)
    assert noise_at(real, 0.5, -0.01) == 0.0
    assert noise_at(real, 0.5, 1.0) == 0.0
    assert noise_at(real, 0.5, 0.99) == real.cells[2, 3]


def test_noise_at_outside_horizon_raises(noise, grid):
    with pytest.raises(ValueError):
        noise_at(noise, -0.01, 0.0)
    with pytest.raises(ValueError):
        noise_at(noise, grid.t_max + 0.01, 0.0)


@settings(max_examples=200)
@given(st.floats(0, 1), st.floats(-20, 20))
def test_vectorized_lookup_matches_scalar(t, x):
    g = GridSpec(0.0, 2 * math.pi, 8, 1.0, 16)
    real = build_realization(g, 1)
    assert real.values(np.array([t]), np.array([x]))[0] == real.value(t, x)


def test_path_integral_zero_and_constant(grid):
    rng = make_rng(0, Purpose.PATH)
    path = simulate_segment(SpaceTimePoint(0.5, 1.0), 0.5, DiffusionParams(2.0, 0.0, 0.01), rng)
    assert path_noise_integral(NoiseRealization.zeros(grid), path, 0.5) == 0.0
    assert path_noise_integral(NoiseRealization.constant(grid, 2.5), path, 0.5) == pytest.approx(1.25, abs=1e-12)


def test_path_integral_left_endpoint_space():
    g = GridSpec(0.0, 4.0, 4, 1.0, 1)
    real = NoiseRealization(g, 0, np.array([[1.0, 2.0, 3.0, 4.0]]))
    s = np.array([0.0, 0.3, 1.0])
    x = np.array([0.5, 2.5, 3.5])
    # step 0 reads x=0.5 (cell 0), step 1 reads x=2.5 (cell 2)
    assert path_noise_integrals(real, s, x[None, :], 1.0)[0] == pytest.approx(0.3 * 1 + 0.7 * 3)


def test_path_integral_beyond_horizon_raises(grid, noise):
    with pytest.raises(ValueError):
        path_noise_integrals(noise, np.array([0.0, 0.6]), np.zeros((1, 2)), 0.5)
    with pytest.raises(ValueError):
        path_noise_integrals(noise, np.array([0.0, 0.1]), np.zeros((1, 2)), grid.t_max + 0.5)


def test_path_integral_variance_scaling():
    # a path sitting in one column of cells for time T crosses T/dt cells in
    # time, each contributing dt^2 * var = dt/dx: Var = T/dx
    g = GridSpec(0.0, 1.0, 10, 1.0, 20)
    T = 0.5
    s = np.linspace(0, T, 11)
    x = np.full((1, s.size), 0.05)
    vals = [path_noise_integrals(build_realization(g, seed), s, x, T)[0] for seed in range(4000)]
    var = np.var(vals, ddof=1)
    assert var == pytest.approx(T / g.dx, rel=5 * math.sqrt(2 / 4000))


def test_event_noise_modes(grid, noise):
    rng = make_rng(0, Purpose.TREE)
    assert event_noise(noise, NoiseMode.FIXED_REALIZATION, 0.3, 1.0, rng) == noise_at(noise, 0.3, 1.0)
    a = np.array([event_noise(noise, NoiseMode.RESAMPLED_PER_EVENT, 0.3, 1.0, rng) for _ in range(100_000)])
    assert a.var() == pytest.approx(grid.cell_variance, rel=0.02)
    lag = np.corrcoef(a[:-1], a[1:])[0, 1]
    assert abs(lag) <= 3 / math.sqrt(a.size)


def test_event_noise_resampled_zero_outside():
    g = GridSpec(0, 1, 4, 1, 4)
    real = build_realization(g, 1, BoundaryPolicy.ZERO_OUTSIDE)
    rng = make_rng(0, Purpose.TREE)
    assert event_noise(real, NoiseMode.RESAMPLED_PER_EVENT, 0.5, 2.0, rng) == 0.0
