import numpy as np
import pytest

from drivenlevel.driving import DrivingField
from drivenlevel.errors import GridMismatch, StepTooLarge
from drivenlevel.kernel import SemicircleKernel, kernel_for
from drivenlevel.spectral import Semicircle, compute_u0
from drivenlevel.volterra import (PropagatorTrace, TimeGrid, aligned_grid,
                                  compare, convergence_check, evolve)


def semicircle_setup(eta=1.0, mean=2.5, shape="sine", amplitude=0.5,
                     period=1.25):
    sd = Semicircle(eta=eta)
    drive = DrivingField(mean=mean, period=period, shape=shape,
                         amplitude=amplitude)
    return sd, SemicircleKernel(sd), drive


def test_time_grid_basics():
    g = TimeGrid(1.0, 0.25, 8)
    assert g.t_end == pytest.approx(3.0)
    assert np.allclose(g.times(), 1.0 + 0.25 * np.arange(9))
    assert g.matches(TimeGrid(1.0, 0.25, 8))
    assert not g.matches(TimeGrid(0.0, 0.25, 8))
    with pytest.raises(ValueError):
        TimeGrid(0.0, -0.1, 5)
    with pytest.raises(ValueError):
        TimeGrid(0.0, 0.1, 0)


def test_initial_value():
    sd, kern, drive = semicircle_setup()
    tr = evolve(kern, 0.0, drive, TimeGrid(0.0, 0.01, 10))
    assert tr.values[0] == 1.0 + 0.0j


def test_decoupled_is_exact_phase():
    # eta = 0 removes the memory term; the integrating factor handles the
    # whole drive, so the numerical answer is exact to roundoff
    for shape in ("sine", "square"):
        sd, kern, drive = semicircle_setup(eta=0.0, shape=shape, period=2.0)
        grid = aligned_grid(0.0, 20.0, 0.01, drive)
        tr = evolve(kern, 0.0, drive, grid)
        t = grid.times()
        phase = 2.5 * t + drive.modulation_integral(t)
        assert np.max(np.abs(tr.values - np.exp(-1j * phase))) < 1e-12
        assert np.max(np.abs(tr.magnitude() - 1.0)) < 1e-13


def test_decoupled_convergence_estimate_tiny():
    sd, kern, drive = semicircle_setup(eta=0.0)
    grid = aligned_grid(0.0, 10.0, 0.01, drive)
    _, est = convergence_check(kern, 0.0, drive, grid)
    assert est < 1e-12


def test_no_drive_matches_u0_magnitude():
    # h = 0.01 keeps |u| within 1e-4 of the closed continuum answer out to
    # t = 50 (the phase accrues a secular O(h^2) shift, the magnitude does
    # not)
    sd, kern, _ = semicircle_setup()
    drive = DrivingField(mean=2.5, amplitude=0.0)
    grid = TimeGrid(0.0, 0.01, 5000)
    tr = evolve(kern, 0.0, drive, grid)
    u0 = compute_u0(sd, 2.5, grid.times())
    assert np.max(np.abs(tr.magnitude() - np.abs(u0))) < 1e-4


def test_second_order_convergence():
    sd, kern, drive = semicircle_setup()
    grid_c = aligned_grid(0.0, 10.0, 0.02, drive)
    grid_f = aligned_grid(0.0, 10.0, 0.01, drive)
    _, est_c = convergence_check(kern, 0.0, drive, grid_c)
    _, est_f = convergence_check(kern, 0.0, drive, grid_f)
    assert 3.5 < est_c / est_f < 4.5


def test_contractivity_random_scenarios():
    rng = np.random.default_rng(17)
    for _ in range(6):
        eta = rng.uniform(0.0, 2.0)
        shape = rng.choice(["sine", "square"])
        drive = DrivingField(mean=rng.uniform(-2.0, 2.5),
                             period=rng.uniform(1.0, 6.0), shape=shape,
                             amplitude=rng.uniform(0.0, 2.0))
        sd = Semicircle(eta=eta)
        grid = aligned_grid(0.0, 15.0, 0.01, drive)
        tr = evolve(SemicircleKernel(sd), 0.0, drive, grid)
        assert np.max(tr.magnitude()) <= 1.0 + 1e-6


def test_level_split_invariance():
    # only eps_s + mean enters; moving weight between them changes nothing
    sd, kern, _ = semicircle_setup()
    grid = TimeGrid(0.0, 0.01, 2000)
    d1 = DrivingField(mean=2.5, period=1.25, shape="sine", amplitude=0.5)
    d2 = DrivingField(mean=0.0, period=1.25, shape="sine", amplitude=0.5)
    a = evolve(kern, 0.0, d1, grid)
    b = evolve(kern, 2.5, d2, grid)
    assert np.array_equal(a.values, b.values)


def test_square_switches_must_hit_nodes():
    sd, kern, _ = semicircle_setup()
    drive = DrivingField(mean=2.5, period=1.0, shape="square", amplitude=0.5)
    bad = TimeGrid(0.0, 0.013, 1000)   # T/2 = 0.5 not a multiple
    with pytest.raises(StepTooLarge):
        evolve(kern, 0.0, drive, bad)
    good = aligned_grid(0.0, 10.0, 0.013, drive)
    assert (0.5 / good.h) == pytest.approx(round(0.5 / good.h), abs=1e-9)
    evolve(kern, 0.0, drive, good)


def test_aligned_grid_snaps_down():
    drive = DrivingField(period=1.0, shape="square", amplitude=0.5)
    g = aligned_grid(0.0, 10.0, 0.013, drive)
    assert g.h <= 0.013
    assert g.t_end >= 10.0 - 1e-12


def test_step_limits():
    sd, kern, _ = semicircle_setup()
    fast = DrivingField(mean=9.0, period=1.25, shape="sine", amplitude=5.0)
    with pytest.raises(StepTooLarge):
        evolve(kern, 0.0, fast, TimeGrid(0.0, 0.05, 100))
    slow_sampling = DrivingField(mean=0.0, period=0.2, shape="sine",
                                 amplitude=0.1)
    with pytest.raises(StepTooLarge):
        evolve(kern, 0.0, slow_sampling, TimeGrid(0.0, 0.01, 100))


def test_compare_grid_mismatch():
    v = np.ones(3, dtype=complex)
    a = PropagatorTrace(TimeGrid(0.0, 0.1, 2), v)
    b = PropagatorTrace(TimeGrid(0.0, 0.2, 2), v)
    with pytest.raises(GridMismatch):
        compare(a, b)
    assert compare(a, PropagatorTrace(TimeGrid(0.0, 0.1, 2), 2 * v)) == 1.0


def test_convergence_check_accepts_factory_and_tol():
    sd = Semicircle(eta=1.0)
    drive = DrivingField(mean=2.5, period=1.25, shape="sine", amplitude=0.5)
    grid = aligned_grid(0.0, 5.0, 0.02, drive)

    calls = []

    def factory(h, max_lag):
        calls.append(h)
        return kernel_for(sd, h, max_lag)

    fine, est = convergence_check(factory, 0.0, drive, grid)
    assert sorted(calls) == [0.01, 0.02]
    assert fine.grid.h == pytest.approx(0.01)
    assert est < 1e-3
    with pytest.raises(StepTooLarge):
        convergence_check(factory, 0.0, drive, grid, tol=est / 10)


def test_history_affects_solution():
    # memory really feeds back: zeroing the kernel changes the answer
    sd, kern, drive = semicircle_setup()
    grid = TimeGrid(0.0, 0.01, 500)
    full = evolve(kern, 0.0, drive, grid)
    free = evolve(SemicircleKernel(Semicircle(eta=0.0)), 0.0, drive, grid)
    assert compare(full, free) > 0.01
