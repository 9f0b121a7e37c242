"""Reservoir spectral densities and the static spectral problem.

A single level at on-site energy eps_on hybridizes with a reservoir whose
coupling-weighted density of states is J(eps).  Everything static about the
coupled system follows from J: the level-shift function Delta(eps) (a
principal-value transform of J), discrete levels split off outside the band
where eps - eps_on - Delta(eps) = 0, their residues, the continuum spectral
weight, and the free survival amplitude u0(t).

Two J variants are provided: a semicircle band, for which Delta and the
propagator kernel have closed forms, and a tabulated J on a grid, handled by
quadrature throughout.  hbar = 1; the system's bare energy is absorbed into
eps_on by the callers.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .errors import QuadratureFailure, TooCloseToBandEdge
from .oscquad import angle_band_integral, fourier_integral

EDGE_COLLAR = 1e-6          # roots this close to a band edge are spurious
DERIVATIVE_FLOOR = 1e-9     # refuse derivative evaluation closer than this
TOL_ROOT = 1e-12


@dataclass(frozen=True)
class Semicircle:
    """J(eps) = eta^2 sqrt((2 v0)^2 - (eps - eps0)^2) on its support.

    eta scales the hybridization, eps0 centers the band, v0 sets the half
    bandwidth 2*v0.  eta = 0 is the decoupled limit and short-circuits to
    analytic answers everywhere.
    """

    eta: float
    eps0: float = 0.0
    v0: float = 1.0

    def __post_init__(self):
        if self.eta < 0.0:
            raise ValueError(f"eta must be >= 0, got {self.eta}")
        if self.v0 <= 0.0:
            raise ValueError(f"v0 must be positive, got {self.v0}")

    @property
    def band(self):
        r = 2.0 * self.v0
        return ((self.eps0 - r, self.eps0 + r),)


@dataclass(frozen=True)
class Tabulated:
    """J given by samples on a strictly ascending grid, linear in between.

    band lists the closed support interval(s); J is zero outside them.
    """

    grid: tuple
    values: tuple
    band: tuple

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.size < 2 or v.shape != g.shape:
            raise ValueError("grid and values must be matching 1-d sequences")
        if np.any(np.diff(g) <= 0.0):
            raise ValueError("grid must be strictly ascending")
        if np.any(v < 0.0):
            raise ValueError("spectral density must be nonnegative")
        band = tuple((float(lo), float(hi)) for lo, hi in self.band)
        for lo, hi in band:
            if hi <= lo:
                raise ValueError(f"empty band interval ({lo}, {hi})")
        if any(band[i][1] > band[i + 1][0] for i in range(len(band) - 1)):
            raise ValueError("band intervals must be disjoint and sorted")
        object.__setattr__(self, "grid", tuple(float(x) for x in g))
        object.__setattr__(self, "values", tuple(float(x) for x in v))
        object.__setattr__(self, "band", band)


@dataclass(frozen=True)
class SelfEnergyValue:
    """Retarded self-energy split as Sigma = delta - i*j/2."""

    delta: float
    j: float


@dataclass(frozen=True)
class BoundState:
    energy: float
    residue: float


@dataclass(frozen=True)
class SystemSpectrum:
    """Discrete + continuum decomposition of the coupled level.

    band_grid/band_values sample the continuum weight
    J / [(eps - eps_on - Delta)^2 + J^2/4]; sum_rule is the total spectral
    weight (residues plus continuum over 2 pi) and must come out 1.
    """

    bound: tuple
    band_grid: np.ndarray
    band_values: np.ndarray
    sum_rule: float


def band_intervals(sd):
    return sd.band


def is_decoupled(sd):
    """True when J vanishes identically (no reservoir coupling)."""
    if isinstance(sd, Semicircle):
        return sd.eta == 0.0
    return all(v == 0.0 for v in sd.values)


def eval_j(sd, eps):
    """Spectral density at eps (vectorized, zero outside the band)."""
    eps = np.asarray(eps, dtype=float)
    if isinstance(sd, Semicircle):
        x = eps - sd.eps0
        r = 2.0 * sd.v0
        out = sd.eta ** 2 * np.sqrt(np.maximum(r * r - x * x, 0.0))
        out = np.where(np.abs(x) <= r, out, 0.0)
    else:
        out = np.interp(eps, sd.grid, sd.values, left=0.0, right=0.0)
        mask = np.zeros(eps.shape, dtype=bool)
        for lo, hi in sd.band:
            mask |= (eps >= lo) & (eps <= hi)
        out = np.where(mask, out, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def total_weight(sd):
    """(1/2pi) integral of J; equals the t=0 memory-kernel value."""
    if isinstance(sd, Semicircle):
        return sd.eta ** 2 * sd.v0 ** 2
    # trapezoid over the table nodes is exact for the interpolant
    total = 0.0
    for lo, hi in sd.band:
        x, jv = _interval_nodes(sd, lo, hi)
        total += float(np.trapezoid(jv, x))
    return total / (2.0 * np.pi)


def _nearest_edge_distance(sd, eps):
    edges = [e for lohi in sd.band for e in lohi]
    return min(abs(eps - e) for e in edges)


def _delta_semicircle(sd, eps):
    """Closed-form level shift; linear inside the band, decaying outside."""
    x = np.asarray(eps, dtype=float) - sd.eps0
    r = 2.0 * sd.v0
    half = 0.5 * sd.eta ** 2
    outside = half * (x - np.sign(x) * np.sqrt(np.maximum(x * x - r * r, 0.0)))
    out = np.where(np.abs(x) <= r, half * x, outside)
    if out.ndim == 0:
        return float(out)
    return out


def _interval_nodes(sd, lo, hi):
    grid = np.asarray(sd.grid, dtype=float)
    inner = grid[(grid > lo) & (grid < hi)]
    nodes = np.concatenate(([lo], inner, [hi]))
    return nodes, eval_j(sd, nodes)


def _delta_tabulated(sd, eps):
    """PV transform (1/2pi) P int J(e')/(eps - e') de', exactly.

    A tabulated J is piecewise linear, and the Hilbert transform of a
    linear cell is elementary: with slope b and value c at eps (the cell's
    own linear extension), the cell [x0, x1] contributes
    c*log|eps - x0| - c*log|eps - x1| - b*(x1 - x0).  Summed over cells the
    log coefficients telescope to the jump in c across each node, which
    vanishes linearly where J is continuous, so the formula is the
    principal value everywhere and stays finite right through the band.
    """
    total = 0.0
    for lo, hi in sd.band:
        x, jv = _interval_nodes(sd, lo, hi)
        dx = np.diff(x)
        b = np.diff(jv) / dx
        c = jv[:-1] + b * (eps - x[:-1])
        d = np.abs(eps - x)
        # 0*log(0) at a node is the correct PV limit; mask the log
        logs = np.where(d > 0.0, np.log(np.maximum(d, 1e-300)), 0.0)
        total += float(np.sum(c * (logs[:-1] - logs[1:])) - np.sum(b * dx))
    return total / (2.0 * np.pi)


def self_energy(sd, eps):
    """SelfEnergyValue at real eps: level shift and local J."""
    if is_decoupled(sd):
        return SelfEnergyValue(0.0, 0.0)
    if isinstance(sd, Semicircle):
        delta = _delta_semicircle(sd, eps)
    else:
        delta = _delta_tabulated(sd, float(eps))
    return SelfEnergyValue(float(delta), float(eval_j(sd, eps)))


def self_energy_derivative(sd, eps):
    """d Delta / d eps at real eps.

    Diverges at band edges, so evaluation inside DERIVATIVE_FLOOR of an
    edge raises TooCloseToBandEdge.
    """
    if is_decoupled(sd):
        return 0.0
    eps = float(eps)
    dist = _nearest_edge_distance(sd, eps)
    if dist < DERIVATIVE_FLOOR:
        raise TooCloseToBandEdge(
            f"eps={eps} is within {dist:.2e} of a band edge")
    if isinstance(sd, Semicircle):
        x = eps - sd.eps0
        r = 2.0 * sd.v0
        half = 0.5 * sd.eta ** 2
        if abs(x) <= r:
            return half
        return half * (1.0 - abs(x) / math.sqrt(x * x - r * r))
    # tabulated: symmetric difference, step limited by the edge distance
    step = min(1e-4, 0.25 * dist)
    dp = _delta_tabulated(sd, eps + step)
    dm = _delta_tabulated(sd, eps - step)
    return (dp - dm) / (2.0 * step)


def _gap_regions(sd):
    """Open complement of the band: (-inf, lo0), interior gaps, (hi_last, inf)."""
    ivals = sorted(sd.band)
    gaps = [(-np.inf, ivals[0][0])]
    for (a_lo, a_hi), (b_lo, b_hi) in zip(ivals, ivals[1:]):
        gaps.append((a_hi, b_lo))
    gaps.append((ivals[-1][1], np.inf))
    return gaps


def find_bound_states(sd, eps_on, tol_root=TOL_ROOT):
    """Discrete levels of the coupled system outside the band.

    Solves eps - eps_on - Delta(eps) = 0 on each gap region.  Delta is
    strictly decreasing off the band, so each gap holds at most one root;
    sign-change bracketing plus Brent refinement finds it.  Roots inside
    EDGE_COLLAR of an edge are discarded as spurious.  Residues are
    1/(1 - Delta'(eps_l)).

    Returns BoundState list sorted by energy (possibly empty).
    """
    if is_decoupled(sd):
        return [BoundState(float(eps_on), 1.0)]

    def phi(e):
        return e - eps_on - (self_energy(sd, e).delta)

    roots = []
    for lo, hi in _gap_regions(sd):
        a = lo + EDGE_COLLAR if np.isfinite(lo) else None
        b = hi - EDGE_COLLAR if np.isfinite(hi) else None
        if a is None:
            # lower unbounded gap: phi -> -inf leftwards, root iff phi(b) > 0
            if b is None or phi(b) <= 0.0:
                continue
            a = min(b - 1.0, eps_on)
            for _ in range(80):
                if phi(a) < 0.0:
                    break
                a = b - 2.0 * (b - a)
            else:
                continue
        elif b is None:
            # upper unbounded gap: root iff phi(a) < 0
            if phi(a) >= 0.0:
                continue
            b = max(a + 1.0, eps_on)
            for _ in range(80):
                if phi(b) > 0.0:
                    break
                b = a + 2.0 * (b - a)
            else:
                continue
        else:
            if b <= a or phi(a) >= 0.0 or phi(b) <= 0.0:
                continue
        root = optimize.brentq(phi, a, b, xtol=tol_root, rtol=8.9e-16)
        if _nearest_edge_distance(sd, root) <= EDGE_COLLAR:
            continue
        residue = 1.0 / (1.0 - self_energy_derivative(sd, root))
        roots.append(BoundState(float(root), float(residue)))
    return sorted(roots, key=lambda s: s.energy)


def band_spectral_function(sd, eps_on, eps):
    """Continuum weight J / [(eps - eps_on - Delta)^2 + J^2/4] (vectorized)."""
    eps = np.asarray(eps, dtype=float)
    j = np.asarray(eval_j(sd, eps))
    if isinstance(sd, Semicircle):
        delta = np.asarray(_delta_semicircle(sd, eps))
    else:
        delta = np.array([_delta_tabulated(sd, float(e)) for e in np.atleast_1d(eps)])
        delta = delta.reshape(eps.shape)
    denom = (eps - eps_on - delta) ** 2 + 0.25 * j * j
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(j > 0.0, j / denom, 0.0)
    if out.ndim == 0:
        return float(out)
    return out


def _band_resonances(sd, eps_on):
    """Roots of eps - eps_on - Delta inside the band (sharp continuum peaks)."""
    pts = []
    for lo, hi in sd.band:
        grid = np.linspace(lo + EDGE_COLLAR, hi - EDGE_COLLAR, 513)
        if isinstance(sd, Semicircle):
            vals = grid - eps_on - _delta_semicircle(sd, grid)
        else:
            vals = np.array([g - eps_on - _delta_tabulated(sd, g) for g in grid])
        sign = np.sign(vals)
        for i in np.nonzero(np.diff(sign) != 0)[0]:
            f = lambda e: e - eps_on - self_energy(sd, e).delta
            pts.append(optimize.brentq(f, grid[i], grid[i + 1], xtol=1e-10))
    return pts


def spectrum(sd, eps_on, n_grid=2001):
    """Full spectral decomposition with a sum-rule check.

    The continuum is sampled on n_grid points per band interval;
    the sum rule integrates it adaptively (splitting at any interior
    resonance) and adds the bound-state residues.
    """
    if is_decoupled(sd):
        grid = np.array([float(eps_on)])
        return SystemSpectrum((BoundState(float(eps_on), 1.0),), grid,
                              np.zeros(1), 1.0)
    bound = tuple(find_bound_states(sd, eps_on))
    grids, vals = [], []
    for lo, hi in sd.band:
        g = np.linspace(lo, hi, n_grid)
        grids.append(g)
        vals.append(band_spectral_function(sd, eps_on, g))
    band_grid = np.concatenate(grids)
    band_values = np.concatenate(vals)

    resonances = _band_resonances(sd, eps_on)
    cont = 0.0
    for lo, hi in sd.band:
        inner = sorted(p for p in resonances if lo < p < hi)
        val, err = integrate.quad(
            lambda e: band_spectral_function(sd, eps_on, e), lo, hi,
            points=inner or None, limit=500, epsabs=1e-11, epsrel=1e-10)
        if err > 1e-7:
            raise QuadratureFailure(
                f"continuum weight integral error {err:.2e} on ({lo}, {hi})")
        cont += val
    total = sum(s.residue for s in bound) + cont / (2.0 * np.pi)
    return SystemSpectrum(bound, band_grid, band_values, float(total))


def compute_u0(sd, eps_on, times, tol=1e-8):
    """Drive-free survival amplitude u0 at the given times (t0 = 0).

    Sum of bound-state phases Z_l exp(-i eps_l t) plus the oscillatory
    continuum integral over each band interval.
    """
    times = np.asarray(times, dtype=float)
    if is_decoupled(sd):
        out = np.exp(-1j * eps_on * times)
        return out
    bound = find_bound_states(sd, eps_on)
    out = np.zeros(times.shape, dtype=complex)
    for s in bound:
        out += s.residue * np.exp(-1j * s.energy * times)
    for lo, hi in sd.band:
        f = lambda e: band_spectral_function(sd, eps_on, e)
        # the continuum weight vanishes like sqrt at semicircle edges, which
        # defeats uniform-grid quadrature; the angle path restores spectral
        # accuracy there
        if isinstance(sd, Semicircle):
            part = angle_band_integral(f, lo, hi, times, tol=tol)
        else:
            part = fourier_integral(f, lo, hi, times, tol=tol)
        out += part / (2.0 * np.pi)
    return out
