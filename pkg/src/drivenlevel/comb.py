"""Survival prediction from the drive's frequency comb, plus trace metrics.

A bound state at eps_l only dissipates under periodic driving if some comb
line eps_l +- n * (2 pi / T) lands inside the reservoir band: the drive must
bridge the gap in an integer number of quanta.  The order of the cheapest
bridging process tags how fast the decay is: a harmonic actually present in
the drive's spectrum bridges at first order, a missing one needs an n-quantum
process of the fundamental.

The rule ignores the drive amplitude, so it degrades for strong driving; a
report whose peak modulation reaches strong_threshold (default: half the
state's distance to the nearest band edge) is flagged unreliable rather than
trusted.
"""

from dataclasses import dataclass

import numpy as np

from .driving import fourier_coefficients
from .errors import WindowOutOfRange

WEAK_DRIVING_VALID = "weak-driving-valid"
STRONG_DRIVING_UNRELIABLE = "strong-driving-unreliable"

SURVIVES = "survives"
DISSIPATES = "dissipates"

_COEFF_TOL = 1e-12
DEFAULT_PEAK_FLOOR = 1e-2


@dataclass(frozen=True)
class CombOverlap:
    """One comb line inside the band: eps_l + sign*n*dw = energy."""

    n: int
    sign: int
    energy: float
    order: int


@dataclass(frozen=True)
class CombReport:
    state_energy: float
    residue: float
    delta_omega: float
    n_max: int
    overlaps: tuple
    min_order: object          # int, or None when nothing bridges
    prediction: str
    strong_threshold: float
    reliability: str


def _normalize_band(band):
    if not band:
        raise ValueError("band must contain at least one interval")
    first = band[0]
    if np.isscalar(first):
        band = (tuple(band),)
    return tuple((float(lo), float(hi)) for lo, hi in band)


def _in_band(energy, intervals):
    return any(lo <= energy <= hi for lo, hi in intervals)


def comb_report(bound, f, band, n_max=12, strong_threshold=None):
    """Survival verdict for one bound state under a periodic drive.

    bound may be a BoundState or a bare energy; band is an interval (lo, hi)
    or a sequence of intervals.  All comb orders up to n_max are tested.
    """
    energy = getattr(bound, "energy", None)
    residue = getattr(bound, "residue", float("nan"))
    if energy is None:
        energy = float(bound)
    intervals = _normalize_band(band)
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")

    dw = f.base_frequency
    coeffs = fourier_coefficients(f, n_max)
    present = [abs(a) + abs(b) > _COEFF_TOL for a, b in coeffs]

    overlaps = []
    for n in range(1, n_max + 1):
        order = 1 if present[n - 1] else n
        for sign in (+1, -1):
            shifted = energy + sign * n * dw
            if _in_band(shifted, intervals):
                overlaps.append(CombOverlap(n, sign, float(shifted), order))
    min_order = min((o.order for o in overlaps), default=None)
    prediction = DISSIPATES if overlaps else SURVIVES

    if strong_threshold is None:
        edges = [e for lohi in intervals for e in lohi]
        strong_threshold = 0.5 * min(abs(energy - e) for e in edges)
    reliability = (STRONG_DRIVING_UNRELIABLE
                   if f.max_modulation() >= strong_threshold
                   else WEAK_DRIVING_VALID)
    return CombReport(float(energy), float(residue), float(dw), int(n_max),
                      tuple(overlaps), min_order, prediction,
                      float(strong_threshold), reliability)


def comb_reports(states, f, band, n_max=12, strong_threshold=None):
    """comb_report over a list of bound states."""
    return [comb_report(s, f, band, n_max, strong_threshold) for s in states]


def _window_slice(trace, window):
    t1, t2 = float(window[0]), float(window[1])
    if t2 <= t1:
        raise WindowOutOfRange(f"empty window ({t1}, {t2})")
    t = trace.times()
    eps = 1e-9 * trace.grid.h
    if t1 < t[0] - eps or t2 > t[-1] + eps:
        raise WindowOutOfRange(
            f"window ({t1}, {t2}) outside trace span ({t[0]}, {t[-1]})")
    mask = (t >= t1 - eps) & (t <= t2 + eps)
    if np.count_nonzero(mask) < 2:
        raise WindowOutOfRange(f"window ({t1}, {t2}) holds fewer than 2 nodes")
    return t[mask], trace.values[mask]


def survival_metric(trace, window):
    """Time-averaged |u| over the window (trapezoidal)."""
    t, u = _window_slice(trace, window)
    return float(np.trapezoid(np.abs(u), t) / (t[-1] - t[0]))


def late_window_peaks(trace, window, threshold_ratio=10.0,
                      weight_floor=DEFAULT_PEAK_FLOOR, dominance=0.25):
    """Dominant spectral lines of u on the window.

    Hann-windowed, zero-padded DFT; a line counts as a peak when it is a
    local maximum above threshold_ratio times the median magnitude and above
    weight_floor.  The absolute floor is what separates genuine surviving
    components (weights of order 0.1) from taper sidelobes (under 1% of a
    line) and from the slowly decaying continuum tail a fully dissipated
    trace still carries (|u| of order 1e-3).  Peaks within one main lobe of
    a stronger one are absorbed by it.  A surviving component under periodic
    driving also drags weak replicas at multiples of the drive frequency
    (about beta/2 = A/(2*delta_omega) of the parent line, near 10% once a
    neighboring resonance enhances one); those are satellites of one
    component, not extra components, so peaks below dominance times the
    strongest line are dropped.  Distinct states carry comparable weights
    (ratios well above 0.5 here), so the default 0.25 separates the two
    populations; pass dominance=0 to keep every line above the absolute
    floor.  Returns (frequency, weight) pairs sorted by weight, strongest
    first; frequencies are signed and a component Z e^{-i eps t} peaks at
    eps with weight ~ Z.
    """
    t, u = _window_slice(trace, window)
    m = u.size
    h = trace.grid.h
    taper = np.hanning(m)
    y = u * taper
    npad = 4 * m
    spec = np.fft.fft(np.conj(y), n=npad)
    mag = np.abs(spec) / np.sum(taper)
    # fft of conj(u) puts the e^{-i eps t} component at +eps
    freqs = 2.0 * np.pi * np.fft.fftfreq(npad, d=h)
    order = np.argsort(freqs)
    freqs, mag = freqs[order], mag[order]

    floor = max(threshold_ratio * float(np.median(mag)), weight_floor)
    local = (mag[1:-1] > mag[:-2]) & (mag[1:-1] >= mag[2:]) & (mag[1:-1] > floor)
    cand = np.nonzero(local)[0] + 1
    cand = cand[np.argsort(mag[cand])[::-1]]

    lobe = 4.0 * 2.0 * np.pi / (t[-1] - t[0])
    peaks = []
    for i in cand:
        if all(abs(freqs[i] - fp) > lobe for fp, _ in peaks):
            peaks.append((float(freqs[i]), float(mag[i])))
    if peaks:
        cut = dominance * peaks[0][1]
        peaks = [p for p in peaks if p[1] >= cut]
    return peaks
