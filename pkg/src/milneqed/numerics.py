"""Special functions, cutoff profiles and invariant-measure quadrature.

The light-cone measure is dk~ = d^3k (2pi)^-3 (2|k|)^-1, so an isotropic
integrand reduces to the radial integral (1/(4 pi^2)) int dk k f(k).  All
vacuum profiles are normalized against this measure: int dk~ Z0(k) = 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import EmptySupport, NonFinite, ToleranceNotMet
from .spin_algebra import minkowski_dot, sl2c_boost, so13_from_sl2c

TWO_PI3 = (2.0 * math.pi) ** 3
FOUR_PI2 = 4.0 * math.pi ** 2


# ---------------------------------------------------------------------------
# sine integral
# ---------------------------------------------------------------------------

_SI_SPLIT = 13.0
_SI_MAXIT = 400


def _si_taylor(x):
    """Si by Taylor series; keeps full precision up to |x| ~ 14."""
    x = np.asarray(x, dtype=float)
    x2 = x * x
    term = x.copy()               # x^(2n+1)/(2n+1)!  at n = 0
    acc = x.copy()                # sum of term/(2n+1)
    for n in range(1, 60):
        term = term * (-x2) / ((2 * n) * (2 * n + 1))
        acc += term / (2 * n + 1)
        if np.all(np.abs(term) < 1e-18):
            break
    return acc


def _si_auxiliary(x):
    """Auxiliary functions (f, g) with Si = pi/2 - f cos - g sin for x > 0.

    g - i f equals the continued fraction of e^{z} E1(z) at z = i x,
    evaluated with the modified Lentz scheme; no oscillatory cancellation
    occurs because the exponential prefactor is folded in analytically.
    """
    x = np.asarray(x, dtype=float)
    z = 1j * x
    tiny = 1e-290
    f = np.full_like(z, tiny)
    c = f.copy()
    d = np.zeros_like(z)
    converged = np.zeros(z.shape, dtype=bool)
    for j in range(1, _SI_MAXIT + 1):
        a = 1.0 if j == 1 else -((j - 1.0) ** 2)
        b = z + (2 * j - 1)
        d = b + a * d
        d[d == 0] = tiny
        c = b + a / c
        c[c == 0] = tiny
        d = 1.0 / d
        delta = c * d
        f = f * delta
        converged |= np.abs(delta - 1.0) < 1e-16
        if np.all(converged):
            break
    else:
        raise NonFinite("sine-integral continued fraction did not converge")
    return -f.imag, f.real


def sine_integral(x):
    """Si(x) = int_0^x sin t / t dt, odd, with Si(+inf) = pi/2.

    Absolute error is below 1e-12 over |x| <= 1e6 (Taylor series up to
    |x| = 13, auxiliary-function continued fraction beyond).
    """
    x_arr = np.asarray(x, dtype=float)
    scalar = x_arr.ndim == 0
    x_arr = np.atleast_1d(x_arr)
    out = np.empty_like(x_arr)
    ax = np.abs(x_arr)
    small = ax <= _SI_SPLIT
    if np.any(small):
        out[small] = _si_taylor(x_arr[small])
    if np.any(~small):
        xa = ax[~small]
        fa, ga = _si_auxiliary(xa)
        val = 0.5 * math.pi - fa * np.cos(xa) - ga * np.sin(xa)
        out[~small] = np.sign(x_arr[~small]) * val
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# quadrature primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and orders shared by all integrals in the package."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_subdivisions: int = 8
    angular_order: int = 48

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_SPEC = QuadratureSpec()


@lru_cache(maxsize=32)
def gauss_legendre(n):
    return np.polynomial.legendre.leggauss(n)


def panel_nodes(breaks, panels_per_break, order):
    """Gauss-Legendre nodes/weights on a panelized partition of [breaks]."""
    xs, ws = [], []
    base_x, base_w = gauss_legendre(order)
    for (a, b), n in zip(zip(breaks[:-1], breaks[1:]), panels_per_break):
        edges = np.linspace(a, b, n + 1)
        mid = 0.5 * (edges[:-1] + edges[1:])[:, None]
        half = 0.5 * (edges[1:] - edges[:-1])[:, None]
        xs.append((mid + half * base_x[None, :]).ravel())
        ws.append((half * base_w[None, :]).ravel())
    return np.concatenate(xs), np.concatenate(ws)


def _panel_counts(breaks, phase_scale, refine):
    counts = []
    for a, b in zip(breaks[:-1], breaks[1:]):
        n = max(1, int(math.ceil((b - a) * phase_scale / math.pi / 4.0)))
        counts.append(n * refine)
    return counts


def integrate_panels(vec_f, breaks, spec=DEFAULT_SPEC, phase_scale=0.0, order=16):
    """Adaptive panel integration of a vector-valued function on a line.

    ``vec_f(x)`` takes a node array and returns (n,) or (n, m).  Panels are
    refined globally (doubled) until two successive levels agree within the
    spec tolerances.  Returns (value, error_estimate).
    """
    breaks = sorted(set(float(b) for b in breaks))
    if len(breaks) < 2:
        return 0.0, 0.0
    prev = None
    refine = 1
    for _ in range(spec.max_subdivisions + 1):
        xs, ws = panel_nodes(breaks, _panel_counts(breaks, phase_scale, refine), order)
        vals = np.asarray(vec_f(xs))
        if not np.all(np.isfinite(vals)):
            raise NonFinite("integrand returned non-finite values")
        cur = np.tensordot(ws, vals, axes=(0, 0))
        if prev is not None:
            err = np.max(np.abs(cur - prev))
            scale = np.max(np.abs(cur))
            if err <= max(spec.abs_tol, spec.rel_tol * scale):
                return cur, err
        prev = cur
        refine *= 2
    raise ToleranceNotMet(
        f"panel integration stalled at error {np.max(np.abs(cur - prev)):.3e}")


def angular_grid(order, axisymmetric=True, phi_order=None):
    """Unit directions and solid-angle weights (weights sum to 4 pi).

    Axisymmetric grids place nodes in the x-z plane with the azimuthal
    integral folded into the weights; general grids use a Gauss-Legendre x
    trapezoid product in (cos theta, phi).
    """
    mu, wmu = gauss_legendre(order)
    s = np.sqrt(1.0 - mu ** 2)
    if axisymmetric:
        dirs = np.column_stack([s, np.zeros_like(mu), mu])
        return dirs, 2.0 * math.pi * wmu
    nphi = phi_order or order
    phi = 2.0 * math.pi * np.arange(nphi) / nphi
    wphi = 2.0 * math.pi / nphi
    dirs = np.empty((order * nphi, 3))
    k = 0
    for i in range(order):
        dirs[k:k + nphi, 0] = s[i] * np.cos(phi)
        dirs[k:k + nphi, 1] = s[i] * np.sin(phi)
        dirs[k:k + nphi, 2] = mu[i]
        k += nphi
    w = np.repeat(wmu * wphi, nphi)
    return dirs, w


# ---------------------------------------------------------------------------
# cutoff profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffProfile:
    """Vacuum momentum density Z0(k) = norm * chi(k) on the light cone.

    ``chi`` is the max-normalized shape (1 on the plateau); ``norm`` is the
    plateau value Z fixed by int dk~ Z0 = 1.  The smoothed kind replaces the
    sharp edges by raised-cosine transitions of half-width eps; a lower edge
    is only present when k1 > 0, so k1 = 0 keeps the plateau down to k = 0.
    """

    kind: str
    k1: float
    k2: float
    eps: float = 0.0
    shape_fn: Callable | None = None
    norm: float = field(default=0.0)

    def __post_init__(self):
        if self.k2 <= self.k1 or self.k1 < 0.0:
            raise EmptySupport(f"need 0 <= k1 < k2, got ({self.k1}, {self.k2})")
        if self.kind == "smoothed":
            if not (0.0 < self.eps <= (self.k2 - self.k1) / 2.0):
                raise ValueError("smoothing width must satisfy 0 < eps <= (k2-k1)/2")
            if self.k1 > 0.0 and self.eps > self.k1:
                raise ValueError("lower transition would cross k = 0")
        if self.norm == 0.0:
            object.__setattr__(self, "norm", FOUR_PI2 / self._shape_radial_integral())

    # -- constructors ------------------------------------------------------
    @classmethod
    def step(cls, k1, k2):
        return cls(kind="step", k1=float(k1), k2=float(k2))

    @classmethod
    def smoothed(cls, k1, k2, eps):
        return cls(kind="smoothed", k1=float(k1), k2=float(k2), eps=float(eps))

    @classmethod
    def custom(cls, shape_fn, k1, k2):
        """Arbitrary max-normalized shape supported inside [k1, k2]."""
        return cls(kind="custom", k1=float(k1), k2=float(k2), shape_fn=shape_fn)

    # -- shape and density ---------------------------------------------
    def chi(self, k):
        """Max-normalized density Z0(k)/Z, vectorized."""
        k = np.asarray(k, dtype=float)
        if self.kind == "step":
            return ((k >= self.k1) & (k <= self.k2)).astype(float)
        if self.kind == "custom":
            return np.clip(self.shape_fn(k), 0.0, None)
        out = np.zeros_like(k)
        e = self.eps
        lo = self.k1 - e if self.k1 > 0.0 else 0.0
        plateau_lo = self.k1 + e if self.k1 > 0.0 else 0.0
        out[(k >= plateau_lo) & (k <= self.k2 - e)] = 1.0
        if self.k1 > 0.0:
            m = (k >= lo) & (k < plateau_lo)
            out[m] = 0.5 * (1.0 + np.sin(0.5 * math.pi * (k[m] - self.k1) / e))
        m = (k > self.k2 - e) & (k <= self.k2 + e)
        out[m] = 0.5 * (1.0 - np.sin(0.5 * math.pi * (k[m] - self.k2) / e))
        return out

    def z0(self, k):
        return self.norm * self.chi(k)

    def chi_prime(self, k):
        """d chi/dk; nonzero only on the smoothed transition bands."""
        k = np.asarray(k, dtype=float)
        out = np.zeros_like(k)
        if self.kind != "smoothed":
            raise ValueError("chi_prime is defined for smoothed profiles only")
        e = self.eps
        c = 0.25 * math.pi / e
        if self.k1 > 0.0:
            m = (k >= self.k1 - e) & (k <= self.k1 + e)
            out[m] = c * np.cos(0.5 * math.pi * (k[m] - self.k1) / e)
        m = (k >= self.k2 - e) & (k <= self.k2 + e)
        out[m] = -c * np.cos(0.5 * math.pi * (k[m] - self.k2) / e)
        return out

    def _shape_radial_integral(self):
        """int_0^inf chi(k) k dk (fixes the normalization Z)."""
        if self.kind == "step":
            return 0.5 * (self.k2 ** 2 - self.k1 ** 2)
        if self.kind == "smoothed":
            if self.k1 > 0.0:
                # raised-cosine edges preserve the first moment exactly
                return 0.5 * (self.k2 ** 2 - self.k1 ** 2)
            return 0.5 * self.k2 ** 2 + self.eps ** 2 * (0.5 - 4.0 / math.pi ** 2)
        val, _ = integrate_panels(
            lambda k: self.chi(k) * k, self.breakpoints(), DEFAULT_SPEC)
        return float(val)

    # -- support bookkeeping ---------------------------------------------
    def support(self):
        if self.kind == "smoothed":
            lo = self.k1 - self.eps if self.k1 > 0.0 else 0.0
            return lo, self.k2 + self.eps
        return self.k1, self.k2

    def breakpoints(self):
        lo, hi = self.support()
        pts = {lo, hi}
        if self.kind == "smoothed":
            if self.k1 > 0.0:
                pts.add(self.k1 + self.eps)
            pts.add(self.k2 - self.eps)
        return sorted(pts)

    def chi_at_zero(self):
        return float(self.chi(np.array([0.0]))[0])

    def q_ren(self, q):
        return math.sqrt(self.norm) * q


def q_renormalized(q, profile):
    """Renormalized charge sqrt(Z) q; equals 2 sqrt2 pi q / sqrt(k2^2 - k1^2)
    for the sharp step."""
    return profile.q_ren(q)


# ---------------------------------------------------------------------------
# light-cone integrals
# ---------------------------------------------------------------------------

def lightcone_integral(f, profile, spec=DEFAULT_SPEC, weight="z0",
                       isotropic=False, phase_scale=0.0, return_error=False):
    """int dk~ W(k) f(k) over the profile support.

    ``weight`` is one of "z0", "chi", "none".  ``f`` receives an (n, 4)
    array of null four-vectors and must return (n,) values; with
    ``isotropic=True`` it is sampled along the z axis only and the angular
    integral contributes a factor 4 pi.
    """
    lo, hi = profile.support()
    if weight == "z0":
        wfun = profile.z0
    elif weight == "chi":
        wfun = profile.chi
    elif weight == "none":
        wfun = lambda k: np.ones_like(k)
    else:
        raise ValueError(f"unknown weight {weight!r}")

    if isotropic:
        def radial(k):
            k4 = np.zeros((k.size, 4))
            k4[:, 0] = k
            k4[:, 3] = k
            return k * wfun(k) * np.asarray(f(k4)) * (4.0 * math.pi / (2.0 * TWO_PI3))
        val, err = integrate_panels(radial, profile.breakpoints(), spec, phase_scale)
        return (float(val), float(err)) if return_error else float(val)

    dirs, wdir = angular_grid(spec.angular_order, axisymmetric=False)

    def radial(k):
        vals = np.empty((k.size, dirs.shape[0]))
        k4 = np.empty((k.size, 4))
        for i, n in enumerate(dirs):
            k4[:, 0] = k
            k4[:, 1:] = k[:, None] * n[None, :]
            vals[:, i] = f(k4)
        return k * wfun(k) * (vals @ wdir) / (2.0 * TWO_PI3)

    val, err = integrate_panels(radial, profile.breakpoints(), spec, phase_scale)
    return (float(val), float(err)) if return_error else float(val)


# ---------------------------------------------------------------------------
# distributions over the unit hyperboloid
# ---------------------------------------------------------------------------

R_REST = np.array([1.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class RDistribution:
    """Normalized vacuum density Z1(R) on the hyperboloid R.R = 1, R0 > 0.

    ``point_mass`` concentrates everything at R0; ``rapidity_gaussian`` is
    a Gaussian in the hyperbolic distance from R0 (density exp(-eta^2 /
    (2 sigma^2)) against the invariant measure).
    """

    kind: str = "point_mass"
    R0: tuple = (1.0, 0.0, 0.0, 0.0)
    sigma: float = 0.0

    def __post_init__(self):
        R0 = np.asarray(self.R0, dtype=float)
        rr = minkowski_dot(R0, R0)
        if rr <= 0.0 or R0[0] <= 0.0:
            raise ValueError("R0 must be unit timelike future-pointing")
        if abs(rr - 1.0) > 4e-16:     # keep already-unit labels bit-stable
            R0 = R0 / math.sqrt(rr)
        object.__setattr__(self, "R0", tuple(R0))
        if self.kind == "rapidity_gaussian" and self.sigma <= 0.0:
            raise ValueError("gaussian needs sigma > 0")

    @classmethod
    def point_mass(cls, R0=R_REST):
        return cls(kind="point_mass", R0=tuple(np.asarray(R0, dtype=float)))

    @classmethod
    def rapidity_gaussian(cls, sigma, R0=R_REST):
        return cls(kind="rapidity_gaussian", R0=tuple(np.asarray(R0, dtype=float)), sigma=float(sigma))

    @property
    def center(self):
        return np.asarray(self.R0)

    def boosted(self, so13):
        return RDistribution(kind=self.kind, R0=tuple(np.asarray(so13) @ self.center),
                             sigma=self.sigma)

    def nodes(self, spec=DEFAULT_SPEC):
        """Sample points and normalized weights for averaging over R."""
        if self.kind == "point_mass":
            return self.center[None, :], np.array([1.0])
        eta_max = 10.0 * self.sigma
        ne = max(32, spec.angular_order)
        xe, we = gauss_legendre(ne)
        eta = 0.5 * eta_max * (xe + 1.0)
        weta = 0.5 * eta_max * we * np.sinh(eta) ** 2 * np.exp(-eta ** 2 / (2.0 * self.sigma ** 2))
        dirs, wdir = angular_grid(max(8, spec.angular_order // 3), axisymmetric=False)
        boost = _boost_to(self.center)
        pts = []
        wts = []
        for e, w in zip(eta, weta):
            R = np.empty((dirs.shape[0], 4))
            R[:, 0] = math.cosh(e)
            R[:, 1:] = math.sinh(e) * dirs
            pts.append(R @ boost.T)
            wts.append(w * wdir)
        pts = np.concatenate(pts)
        wts = np.concatenate(wts)
        return pts, wts / wts.sum()


def _boost_to(R0):
    """Pure boost taking (1,0,0,0) to the unit timelike R0."""
    sp = np.linalg.norm(R0[1:])
    if sp < 1e-300:
        return np.eye(4)
    return so13_from_sl2c(sl2c_boost(R0[1:] / sp, math.asinh(sp)))


def _weighted_sum(g, pts, wts):
    acc = None
    for R, w in zip(pts, wts):
        val = np.asarray(g(R), dtype=float)
        acc = w * val if acc is None else acc + w * val
    return acc


def r_average(g, dist, spec=DEFAULT_SPEC):
    """Average int dR~ Z1(R) g(R); g maps one R to a scalar or array.

    For spread-out distributions the quadrature order is bumped once and
    the two results compared; disagreement raises ToleranceNotMet.
    """
    acc = _weighted_sum(g, *dist.nodes(spec))
    if acc is None:
        raise ValueError("empty distribution")
    if dist.kind != "point_mass":
        finer = QuadratureSpec(rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                               max_subdivisions=spec.max_subdivisions,
                               angular_order=spec.angular_order + 16)
        check = _weighted_sum(g, *dist.nodes(finer))
        err = np.max(np.abs(np.atleast_1d(acc - check)))
        scale = np.max(np.abs(np.atleast_1d(check)))
        if err > max(100.0 * spec.abs_tol, 100.0 * spec.rel_tol * max(1.0, scale)):
            raise ToleranceNotMet(f"hyperboloid average stalled at {err:.3e}")
        acc = check
    if not np.all(np.isfinite(acc)):
        raise NonFinite("r_average produced non-finite values")
    return acc if acc.ndim else float(acc)
