"""Reservoir memory kernel g(s) = (1/2pi) int J(eps) e^{-i eps s} d eps.

The semicircle band has the closed form
    g(s) = eta^2 v0 e^{-i eps0 s} J1(2 v0 s) / s,       g(0) = eta^2 v0^2,
so its kernel is evaluated analytically (J1 from scipy, which uses the usual
series/asymptotic split at argument 8).  The quadrature variant transforms
J e^{-i eps s} directly (cell-exact for tabulated densities) and caches
values on the solver's lag grid; cached lags are the only fast path,
interpolation between them is deliberately not offered.  Immutable after
construction, safe to share across workers.
"""

import numpy as np
from scipy import special

from .errors import KernelCoverage
from .oscquad import angle_band_integral
from .spectral import Semicircle, eval_j, is_decoupled

_LAG_ATOL = 1e-12
_CHUNK = 1 << 21


def _tabulated_transform(sd, lo, hi, s):
    """int_lo^hi J e^{-i e s} de for a piecewise-linear J, cell by cell.

    Per linear cell the integral is elementary; summed, the boundary terms
    telescope so only the endpoint values and the slope jumps survive:

        F(s) = (i/s)(J_N E_N - J_0 E_0) + (1/s^2) sum_k b_k (E_{k+1} - E_k)

    with E_k = e^{-i s x_k} and b_k the cell slope.  Exact to roundoff for
    the interpolant, so the kernel inherits only the tabulation error.
    """
    grid = np.asarray(sd.grid, dtype=float)
    inner = grid[(grid > lo) & (grid < hi)]
    x = np.concatenate(([lo], inner, [hi]))
    jv = eval_j(sd, x)
    b = np.diff(jv) / np.diff(x)

    out = np.empty(s.shape, dtype=complex)
    small = np.abs(s) < 1e-8
    if np.any(small):
        # short-lag series from the first three moments
        m0 = np.trapezoid(jv, x)
        m1 = np.trapezoid(jv * x, x)
        m2 = np.trapezoid(jv * x * x, x)
        ss = s[small]
        out[small] = m0 - 1j * ss * m1 - 0.5 * ss * ss * m2
    big = ~small
    ss = s[big]
    vals = np.empty(ss.shape, dtype=complex)
    step = max(1, _CHUNK // max(1, x.size))
    for i in range(0, ss.size, step):
        sb = ss[i:i + step, None]
        ee = np.exp(-1j * sb * x[None, :])
        vals[i:i + step] = (
            (1j / sb[:, 0]) * (jv[-1] * ee[:, -1] - jv[0] * ee[:, 0])
            + (ee[:, 1:] - ee[:, :-1]) @ b / sb[:, 0] ** 2)
    out[big] = vals
    return out


class SemicircleKernel:
    """Closed-form memory kernel of a semicircle band."""

    def __init__(self, sd):
        if not isinstance(sd, Semicircle):
            raise TypeError("SemicircleKernel needs a Semicircle density")
        self.sd = sd

    def eval(self, s):
        """g at lag(s) s >= 0 (vectorized; the s -> 0 limit is handled)."""
        s = np.asarray(s, dtype=float)
        sd = self.sd
        arg = 2.0 * sd.v0 * s
        with np.errstate(invalid="ignore", divide="ignore"):
            ratio = np.where(s > 0.0, special.j1(arg) / np.where(s > 0.0, s, 1.0),
                             sd.v0)
        out = sd.eta ** 2 * sd.v0 * np.exp(-1j * sd.eps0 * s) * ratio
        if out.ndim == 0:
            return complex(out)
        return out

    def lag_samples(self, h, n):
        """g on the lag grid 0, h, ..., n*h."""
        return self.eval(h * np.arange(n + 1))


class QuadratureKernel:
    """Memory kernel by oscillatory quadrature, cached on a fixed lag grid.

    h is the solver step the cache is built for; max_lag bounds the covered
    span.  lag_samples with a different spacing or beyond the cache raises
    KernelCoverage rather than extrapolating.
    """

    def __init__(self, sd, h, max_lag, tol=1e-10):
        if h <= 0.0 or max_lag < 0.0:
            raise ValueError("need h > 0 and max_lag >= 0")
        self.sd = sd
        self.h = float(h)
        self.tol = tol
        n = int(np.ceil(max_lag / h - _LAG_ATOL))
        lags = h * np.arange(n + 1)
        self.cache = self._integrate(lags)
        self.cache.setflags(write=False)

    def _integrate(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.zeros(s.shape, dtype=complex)
        if is_decoupled(self.sd):
            return out
        for lo, hi in self.sd.band:
            if isinstance(self.sd, Semicircle):
                f = lambda e: eval_j(self.sd, e)
                out += angle_band_integral(f, lo, hi, s, tol=self.tol)
            else:
                out += _tabulated_transform(self.sd, lo, hi, s)
        return out / (2.0 * np.pi)

    def eval(self, s):
        """g at arbitrary lag(s); cache hit for grid lags, quadrature otherwise."""
        scalar = np.isscalar(s) or np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        idx = np.rint(s / self.h).astype(int)
        on_grid = (np.abs(s - idx * self.h) <= _LAG_ATOL) & (idx >= 0) \
            & (idx < self.cache.size)
        out = np.empty(s.shape, dtype=complex)
        out[on_grid] = self.cache[idx[on_grid]]
        if np.any(~on_grid):
            out[~on_grid] = self._integrate(s[~on_grid])
        return complex(out[0]) if scalar else out

    def lag_samples(self, h, n):
        """Cached g on 0, h, ..., n*h; the cache must match h and cover n*h."""
        if abs(h - self.h) > _LAG_ATOL:
            raise KernelCoverage(
                f"cache built for step {self.h}, requested {h}")
        if n + 1 > self.cache.size:
            raise KernelCoverage(
                f"cache covers {self.cache.size - 1} lags, requested {n}")
        return self.cache[:n + 1]


def kernel_for(sd, h=None, max_lag=None, analytic=True, tol=1e-10):
    """Pick the natural kernel for a density.

    Semicircle densities default to the closed form; pass analytic=False
    (with h and max_lag) to force the quadrature variant.
    """
    if analytic and isinstance(sd, Semicircle):
        return SemicircleKernel(sd)
    if h is None or max_lag is None:
        raise ValueError("quadrature kernel needs h and max_lag")
    return QuadratureKernel(sd, h, max_lag, tol=tol)
