import time

import numpy as np
import pytest
from scipy import integrate

from drivenlevel import oracle
from drivenlevel.errors import TooCloseToBandEdge
from drivenlevel.spectral import (BoundState, Semicircle, Tabulated,
                                  compute_u0, eval_j, find_bound_states,
                                  self_energy, self_energy_derivative,
                                  spectrum, total_weight)


def make_tabulated(eta=1.0, eps0=0.0, v0=1.0, n=4001):
    sc = Semicircle(eta=eta, eps0=eps0, v0=v0)
    lo, hi = sc.band[0]
    grid = np.linspace(lo, hi, n)
    return sc, Tabulated(grid=tuple(grid), values=tuple(eval_j(sc, grid)),
                         band=((lo, hi),))


def test_j_semicircle_values():
    sd = Semicircle(eta=0.8, eps0=0.0, v0=1.0)
    # eta^2 sqrt(4 - eps^2): at eps = 1 that is 0.64*sqrt(3)
    assert eval_j(sd, 1.0) == pytest.approx(0.64 * np.sqrt(3.0), rel=1e-14)
    assert eval_j(sd, 0.0) == pytest.approx(1.28, rel=1e-14)
    assert eval_j(sd, 2.9) == 0.0
    assert eval_j(sd, -2.0000001) == 0.0
    e = np.linspace(-3, 3, 301)
    assert np.all(eval_j(sd, e) >= 0.0)


def test_j_band_support():
    sd = Semicircle(eta=1.0, eps0=0.5, v0=0.75)
    (lo, hi), = sd.band
    assert (lo, hi) == (-1.0, 2.0)
    assert eval_j(sd, lo) == 0.0 and eval_j(sd, hi) == 0.0
    assert eval_j(sd, 0.5) == pytest.approx(1.5, rel=1e-14)


def test_total_weight_closed_form():
    sd = Semicircle(eta=1.3, v0=0.7)
    assert total_weight(sd) == pytest.approx(1.3 ** 2 * 0.7 ** 2, rel=1e-13)
    # the linear interpolant of a concave arc sits slightly low, so the
    # tabulated weight lands ~1e-5 below the closed form at this resolution
    sc, tab = make_tabulated(eta=1.3, v0=0.7)
    assert total_weight(tab) == pytest.approx(total_weight(sc), rel=3e-5)


def test_level_shift_closed_form():
    sd = Semicircle(eta=1.0)
    # linear inside the band, and 0.4 at 2.9 (makes 2.9 the bound energy
    # when the level sits at 2.5)
    assert self_energy(sd, 1.0).delta == pytest.approx(0.5, abs=1e-14)
    assert self_energy(sd, 2.9).delta == pytest.approx(0.4, abs=1e-12)
    assert self_energy(sd, -2.9).delta == pytest.approx(-0.4, abs=1e-12)
    # derivative: eta^2/2 inside, -4/21 at 2.9
    assert self_energy_derivative(sd, 0.3) == pytest.approx(0.5, abs=1e-12)
    assert self_energy_derivative(sd, 2.9) == pytest.approx(-4.0 / 21.0,
                                                            abs=1e-10)


def test_level_shift_odd_symmetry():
    sd = Semicircle(eta=0.9, eps0=0.7)
    rng = np.random.default_rng(7)
    for eps in 0.7 + np.concatenate([rng.uniform(-1.9, 1.9, 5),
                                     rng.uniform(2.2, 6.0, 5)]):
        d1 = self_energy(sd, eps).delta
        d2 = self_energy(sd, 2 * 0.7 - eps).delta
        assert d1 == pytest.approx(-d2, abs=1e-12)


def test_level_shift_quadrature_matches_closed_form():
    sc, tab = make_tabulated(eta=0.8, n=8001)
    for eps in (-3.5, -1.0, 0.37, 1.5, 2.5, 4.0):
        want = self_energy(sc, eps)
        got = self_energy(tab, eps)
        assert got.delta == pytest.approx(want.delta, abs=5e-5)
        assert got.j == pytest.approx(want.j, abs=1e-6)


def test_self_energy_derivative_fd_consistency():
    sd = Semicircle(eta=1.1, eps0=0.2)
    for eps in (2.9, 3.5, -2.6, 0.9):
        d = self_energy_derivative(sd, eps)
        h = 1e-6
        fd = (self_energy(sd, eps + h).delta
              - self_energy(sd, eps - h).delta) / (2 * h)
        assert d == pytest.approx(fd, rel=2e-4, abs=1e-8)


def test_derivative_refuses_band_edge():
    sd = Semicircle(eta=1.0)
    with pytest.raises(TooCloseToBandEdge):
        self_energy_derivative(sd, 2.0 + 1e-12)


def test_single_bound_state_frozen():
    sd = Semicircle(eta=1.0)
    t0 = time.perf_counter()
    states = find_bound_states(sd, 2.5)
    dt = time.perf_counter() - t0
    assert dt < 1.0
    assert len(states) == 1
    assert states[0].energy == pytest.approx(2.9, abs=1e-12)
    assert states[0].residue == pytest.approx(0.84, abs=1e-10)


def test_two_bound_states_frozen():
    # roots of 5.25 e^2 - 2.125 e - 39.3125 outside the band
    roots = np.sort(np.roots([5.25, -2.125, -39.3125]))
    states = find_bound_states(Semicircle(eta=2.5), 0.5)
    assert len(states) == 2
    assert states[0].energy == pytest.approx(roots[0], abs=1e-8)
    assert states[1].energy == pytest.approx(roots[1], abs=1e-8)
    for s in states:
        # root of the level equation, residue from the shift slope
        resid = s.energy - 0.5 - self_energy(sd := Semicircle(eta=2.5),
                                             s.energy).delta
        assert abs(resid) < 1e-10
        z = 1.0 / (1.0 - self_energy_derivative(sd, s.energy))
        assert s.residue == pytest.approx(z, rel=1e-12)


def test_no_bound_state_inside_band():
    assert find_bound_states(Semicircle(eta=0.8), 1.0) == []


def test_decoupled_bound_state():
    states = find_bound_states(Semicircle(eta=0.0), 1.7)
    assert states == [BoundState(1.7, 1.0)]


def test_bound_state_properties_random():
    rng = np.random.default_rng(42)
    for _ in range(25):
        eta = rng.uniform(0.1, 3.0)
        eps_on = rng.uniform(-4.0, 4.0)
        sd = Semicircle(eta=eta)
        states = find_bound_states(sd, eps_on)
        (lo, hi), = sd.band
        for s in states:
            assert s.energy < lo or s.energy > hi
            assert 0.0 < s.residue <= 1.0
            gap = s.energy - eps_on - self_energy(sd, s.energy).delta
            assert abs(gap) < 1e-9
        # energies strictly sorted
        es = [s.energy for s in states]
        assert es == sorted(es)


def test_strong_coupling_always_two_states():
    # a wide-gap pole on each side once eta^2/2 > v0 region slope allows it
    for eps_on in (-1.5, 0.0, 0.9):
        assert len(find_bound_states(Semicircle(eta=2.5), eps_on)) == 2


def test_tabulated_bound_state_matches():
    sc, tab = make_tabulated(eta=1.0, n=8001)
    got = find_bound_states(tab, 2.5)
    assert len(got) == 1
    assert got[0].energy == pytest.approx(2.9, abs=5e-5)
    assert got[0].residue == pytest.approx(0.84, abs=5e-4)


def test_sum_rule_three_parameter_sets():
    for eta, eps_on in ((1.0, 2.5), (2.5, 0.5), (0.8, 1.0)):
        spec = spectrum(Semicircle(eta=eta), eps_on)
        assert spec.sum_rule == pytest.approx(1.0, abs=1e-6)


def test_spectrum_band_values_nonnegative():
    spec = spectrum(Semicircle(eta=1.0), 2.5)
    assert np.all(spec.band_values >= 0.0)
    assert len(spec.bound) == 1


def test_u0_decoupled_is_pure_phase():
    t = np.linspace(0.0, 10.0, 101)
    u = compute_u0(Semicircle(eta=0.0), 1.3, t)
    assert np.max(np.abs(u - np.exp(-1.3j * t))) < 1e-14


def test_u0_short_time_series():
    # u0 ~ 1 - i*eps_on*t - (eps_on^2 + g(0)) t^2/2 for small t
    sd = Semicircle(eta=1.0)
    eps_on = 2.5
    g0 = total_weight(sd)
    t = np.array([0.0, 1e-3, 2e-3, 5e-3])
    u = compute_u0(sd, eps_on, t)
    series = 1.0 - 1j * eps_on * t - 0.5 * (eps_on ** 2 + g0) * t ** 2
    assert np.max(np.abs(u - series)) < 1e-6
    assert u[0] == pytest.approx(1.0, abs=1e-10)


def test_u0_never_exceeds_unity():
    sd = Semicircle(eta=1.0)
    t = np.linspace(0.0, 60.0, 1201)
    u = compute_u0(sd, 2.5, t)
    assert np.max(np.abs(u)) <= 1.0 + 1e-9


def test_u0_late_time_amplitude_is_residue():
    # band part disperses, leaving the bound line Z e^{-i e_l t}
    sd = Semicircle(eta=1.0)
    states = find_bound_states(sd, 2.5)
    t = np.linspace(80.0, 100.0, 41)
    u = compute_u0(sd, 2.5, t)
    line = states[0].residue * np.exp(-1j * states[0].energy * t)
    assert np.max(np.abs(u - line)) < 5e-3


def test_u0_matches_lattice_model():
    sd = Semicircle(eta=1.0)
    from drivenlevel.driving import DrivingField
    from drivenlevel.volterra import TimeGrid

    grid = TimeGrid(0.0, 0.01, 2000)
    model = oracle.discretize(sd, 1200)
    drive = DrivingField(mean=2.5, amplitude=0.0)
    ref = oracle.propagate(model, drive, grid)
    u = compute_u0(sd, 2.5, grid.times())
    assert np.max(np.abs(u - ref.values)) < 5e-4


def test_u0_fully_dissipating_decays():
    u = compute_u0(Semicircle(eta=0.8), 1.0, np.array([0.0, 50.0, 100.0]))
    assert abs(u[0]) == pytest.approx(1.0, abs=1e-10)
    assert abs(u[1]) < 0.02
    assert abs(u[2]) < 0.01
