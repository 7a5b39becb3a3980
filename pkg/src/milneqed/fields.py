"""Classical-correspondence potentials and effective charge densities.

A static pointlike bare charge q quantized against a vacuum with momentum
density Z0(k) produces, on the hyperboloid of proper time tau, the
regularized potential A0 built from eight sine-integral terms; its
tau -> infinity limit, the effective charge density, and the enclosed
charge Q(r) are exposed here together with coherent free-field averages.
All closed forms refer to the sharp-step profile; smoothed profiles are
handled by radial quadrature of the max-normalized shape chi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NegativeTau, NonFinite, NonPositiveR, ToleranceNotMet
from .numerics import (
    DEFAULT_SPEC,
    angular_grid,
    integrate_panels,
    panel_nodes,
    sine_integral,
)

TWO_PI2 = 2.0 * math.pi ** 2
FOUR_PI2 = 4.0 * math.pi ** 2


@dataclass(frozen=True)
class StaticChargeParams:
    """Bare charge plus the vacuum cutoff profile that dresses it."""

    q: float
    profile: CutoffProfile

    @property
    def q_ren(self):
        return self.profile.q_ren(self.q)

    @classmethod
    def with_unit_qren(cls, profile):
        """Bare charge chosen so that the renormalized charge is 1."""
        return cls(q=1.0 / profile.q_ren(1.0), profile=profile)


def potential_irreducible(tau, r, q):
    """Potential of a static charge when the vacuum carries no momentum
    density: zero on the light-cone boundary, Coulomb for tau > 0."""
    if tau < 0.0:
        raise NegativeTau(f"tau = {tau}")
    if r <= 0.0:
        raise NonPositiveR(f"r = {r}")
    return 0.0 if tau == 0.0 else q / (4.0 * math.pi * r)


def _require_step(params):
    if params.profile.kind != "step":
        raise ValueError("closed form requires a sharp-step profile")
    return params.profile.k1, params.profile.k2, params.q_ren


def potential_A0_origin(tau, params):
    """Value of the regularized potential at r = 0 (no singularity)."""
    k1, k2, qr = _require_step(params)
    if tau < 0.0:
        raise NegativeTau(f"tau = {tau}")
    if tau == 0.0:
        return 0.0
    return qr / TWO_PI2 * (k2 - k1 + math.sin(k1 * tau) / tau - math.sin(k2 * tau) / tau)


def potential_A0(tau, r, params):
    """Regularized potential at proper time tau and radius r.

    Eight sine-integral terms evaluated at x0 = sqrt(tau^2 + r^2); the
    differences x0 - tau and x0 - r are computed in cancellation-free form.
    Vanishes identically at tau = 0 and is finite at r = 0.
    """
    if tau < 0.0:
        raise NegativeTau(f"tau = {tau}")
    if r < 0.0:
        raise NonPositiveR(f"r = {r}")
    k1, k2, qr = _require_step(params)
    if r == 0.0 or k2 * r < 1e-6:
        return potential_A0_origin(tau, params)
    x0 = math.hypot(tau, r)
    d = r * r / (x0 + tau)          # x0 - tau, stable for r << tau
    a1 = d + r                      # x0 - tau + r
    a2 = r - d                      # r - x0 + tau
    a3 = x0 + r
    a4 = tau * tau / (x0 + r)       # x0 - r, stable for tau << r

    def pair(a):
        return sine_integral(k2 * a) - sine_integral(k1 * a)

    total = pair(a1) + pair(a2) - pair(a3) + pair(a4)
    return qr * total / (FOUR_PI2 * r)


def potential_asymptotic(r, params):
    """tau -> infinity potential q_ren (Si(k2 r) - Si(k1 r)) / (2 pi^2 r)."""
    k1, k2, qr = _require_step(params)
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise NonPositiveR("r must be positive")
    val = qr * (sine_integral(k2 * r) - sine_integral(k1 * r)) / (TWO_PI2 * r)
    return float(val) if val.ndim == 0 else val


def _density_shape(x):
    """(sin x - x cos x)/x^3 with a series branch below x = 0.5."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 0.5
    xs = x[small]
    x2 = xs * xs
    # sum_m (-1)^m (2m+2) x^{2m} / (2m+3)!
    acc = np.full_like(xs, 1.0 / 3.0)
    num = np.ones_like(xs)
    fact = 6.0
    for m in range(1, 9):
        num = num * (-x2)
        fact *= (2 * m + 2) * (2 * m + 3)
        acc += num * (2 * m + 2) / fact
    out[small] = acc
    xl = x[~small]
    out[~small] = (np.sin(xl) - xl * np.cos(xl)) / xl ** 3
    return out


def rho_eff_parts(r, params):
    """(upper, lower) edge contributions to the effective charge density.

    Each part is q_ren k^3 (sin kr - kr cos kr)/(2 pi^2 (kr)^3); the total
    density is upper - lower and integrates to the oscillating enclosed
    charge of the sharp step.
    """
    k1, k2, qr = _require_step(params)
    r = np.asarray(r, dtype=float)
    upper = qr * k2 ** 3 * _density_shape(k2 * r) / TWO_PI2
    lower = qr * k1 ** 3 * _density_shape(k1 * r) / TWO_PI2
    return upper, lower


def rho_eff(r, params):
    """Effective charge density of the sharp-step profile (finite at 0)."""
    upper, lower = rho_eff_parts(r, params)
    val = upper - lower
    return float(val) if np.ndim(val) == 0 else val


# ---------------------------------------------------------------------------
# general (smoothed) profiles
# ---------------------------------------------------------------------------

def _edge_intervals(profile):
    """Transition bands where chi interpolates between 0 and 1."""
    if profile.kind != "smoothed":
        return []
    bands = []
    if profile.k1 > 0.0:
        bands.append((profile.k1 - profile.eps, profile.k1 + profile.eps))
    bands.append((profile.k2 - profile.eps, profile.k2 + profile.eps))
    return bands


def _plateau(profile):
    lo = profile.k1 + profile.eps if (profile.kind == "smoothed" and profile.k1 > 0.0) else profile.k1
    hi = profile.k2 - profile.eps if profile.kind == "smoothed" else profile.k2
    return lo, hi


def potential_general(r, params, spec=DEFAULT_SPEC):
    """tau -> infinity potential for an arbitrary profile:
    (q_ren / (2 pi^2 r)) int dk chi(k) sin(kr)/k."""
    if r <= 0.0:
        raise NonPositiveR(f"r = {r}")
    profile = params.profile
    if profile.kind == "step":
        return potential_asymptotic(r, params)
    lo, hi = _plateau(profile)
    total = sine_integral(hi * r) - sine_integral(lo * r)
    for a, b in _edge_intervals(profile):
        a = max(a, 1e-300)
        val, _ = integrate_panels(
            lambda k: profile.chi(k) * np.sin(k * r) / k,
            [a, b], spec, phase_scale=r)
        total += float(val)
    return params.q_ren * total / (TWO_PI2 * r)


def rho_general(r, params, spec=DEFAULT_SPEC, method="analytic"):
    """Effective density for an arbitrary profile.

    method "analytic": differentiate the potential under the integral,
    rho = (q_ren / (2 pi^2 r)) int dk chi(k) k sin(kr).
    method "fd": Richardson central second differences of r * potential,
    rho = -(1/r) d^2(r A)/dr^2 with steps {1e-3, 5e-4, 2.5e-4} times
    max(r, 1/k2) (the radius alone underestimates the oscillation scale
    when k2 r < 1).
    """
    if r <= 0.0:
        raise NonPositiveR(f"r = {r}")
    profile = params.profile
    if method == "fd":
        def ra(rr):
            return rr * potential_general(rr, params, spec)
        scale = max(r, 1.0 / profile.k2)
        estimates = []
        for h in (1e-3 * scale, 5e-4 * scale, 2.5e-4 * scale):
            estimates.append((ra(r + h) - 2.0 * ra(r) + ra(r - h)) / (h * h))
        d1 = (4.0 * estimates[1] - estimates[0]) / 3.0
        d2 = (4.0 * estimates[2] - estimates[1]) / 3.0
        second = (16.0 * d2 - d1) / 15.0
        return -second / r
    if profile.kind == "step":
        return rho_eff(r, params)
    lo, hi = _plateau(profile)

    def moment(a, b):
        # int_a^b k sin(kr) dk
        return ((math.sin(b * r) / (r * r) - b * math.cos(b * r) / r)
                - (math.sin(a * r) / (r * r) - a * math.cos(a * r) / r))

    total = moment(lo, hi)
    for a, b in _edge_intervals(profile):
        val, _ = integrate_panels(
            lambda k: profile.chi(k) * k * np.sin(k * r),
            [a, b], spec, phase_scale=r)
        total += float(val)
    return params.q_ren * total / (TWO_PI2 * r)


@dataclass(frozen=True)
class ChargeResult:
    """Enclosed charge Q(r_max) with its convergence verdict."""

    q_enclosed: float
    converged: bool
    verdict: str
    spread: float


def total_charge(params, r_max, spec=DEFAULT_SPEC):
    """Enclosed charge Q(r_max) = int_0^{r_max} 4 pi r^2 rho(r) dr.

    Sharp step: the closed form oscillates without limit and is flagged as
    non-convergent.  Smoothed profiles converge; swapping the radial and
    momentum integrations gives the exact reduction

        Q(R) = (2 q_ren / pi) [ int dk chi(k) sin(kR)/k
                                + int dk chi'(k) sin(kR) ],

    whose large-R limit is q_ren chi(0): zero charge whenever the density
    vanishes at k = 0, full q_ren when the plateau reaches k = 0.
    """
    if r_max <= 0.0:
        raise NonPositiveR(f"r_max = {r_max}")
    profile = params.profile
    qr = params.q_ren

    def q_at(R):
        if profile.kind == "step":
            k1, k2 = profile.k1, profile.k2
            return (2.0 * qr / math.pi) * (
                sine_integral(k2 * R) - sine_integral(k1 * R)
                - math.sin(k2 * R) + math.sin(k1 * R))
        lo, hi = _plateau(profile)
        total = sine_integral(hi * R) - sine_integral(lo * R)
        for a, b in _edge_intervals(profile):
            a_eff = max(a, 1e-300)
            v1, _ = integrate_panels(
                lambda k: profile.chi(k) * np.sin(k * R) / k,
                [a_eff, b], spec, phase_scale=R)
            v2, _ = integrate_panels(
                lambda k: profile.chi_prime(k) * np.sin(k * R),
                [a_eff, b], spec, phase_scale=R)
            total += float(v1) + float(v2)
        return (2.0 * qr / math.pi) * total

    q_main = q_at(r_max)
    samples = [q_main, q_at(0.8 * r_max), q_at(0.6 * r_max)]
    spread = max(samples) - min(samples)
    if profile.kind == "step":
        return ChargeResult(q_enclosed=q_main, converged=False,
                            verdict="oscillating", spread=spread)
    converged = spread < max(1e-2 * abs(qr), 10.0 * spec.abs_tol)
    if not converged:
        verdict = "oscillating"
    elif abs(q_main) < 0.5 * abs(qr):
        verdict = "Q=0"
    else:
        verdict = "Q=q_ren"
    return ChargeResult(q_enclosed=q_main, converged=converged,
                        verdict=verdict, spread=spread)


# ---------------------------------------------------------------------------
# coherent free-field averages
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoherentAmplitudes:
    """Transverse circular amplitudes alpha_(+/-) as functions of k (n,4)."""

    alpha_plus: object
    alpha_minus: object

    def __call__(self, k4):
        return (np.asarray(self.alpha_plus(k4), dtype=complex),
                np.asarray(self.alpha_minus(k4), dtype=complex))


def amplitude_norm(amps, params, spec=DEFAULT_SPEC):
    """int dk~ Z0 (|alpha_+|^2 + |alpha_-|^2); must be finite for a valid
    coherent configuration (checked on the cutoff support only)."""
    from .numerics import lightcone_integral

    def f(k4):
        ap, am = amps(k4)
        return np.abs(ap) ** 2 + np.abs(am) ** 2

    val = lightcone_integral(f, params.profile, spec, weight="z0")
    if not np.isfinite(val):
        raise NonFinite("coherent amplitudes are not square-integrable")
    return float(val)


def _frame_m_vectors(R, k4):
    """Circular polarization legs m^a(R, k) vectorized over k rows.

    Built from the flagpole spinor with the (1,0) seed (falling back near
    the -z axis) and omega^A = -R^{AA'} pibar_{A'}/(R.k).
    """
    k4 = np.asarray(k4, dtype=float)
    s2 = math.sqrt(2.0)
    a = (k4[:, 0] + k4[:, 3]) / s2
    b = (k4[:, 0] - k4[:, 3]) / s2
    c = (k4[:, 1] - 1j * k4[:, 2]) / s2
    pi0 = np.empty(len(k4), dtype=complex)
    pi1 = np.empty(len(k4), dtype=complex)
    main = a > 1e-12 * k4[:, 0]
    sa = np.sqrt(a[main])
    pi0[main] = sa
    pi1[main] = c[main] / sa
    sb = np.sqrt(b[~main])
    pi0[~main] = np.conj(c[~main]) / sb
    pi1[~main] = sb

    R = np.asarray(R, dtype=float)
    rmat = np.array([[R[0] + R[3], R[1] + 1j * R[2]],
                     [R[1] - 1j * R[2], R[0] - R[3]]], dtype=complex) / s2
    rk = R[0] * k4[:, 0] - R[1] * k4[:, 1] - R[2] * k4[:, 2] - R[3] * k4[:, 3]
    # pibar lowered: (-conj(pi1), conj(pi0))
    w0 = -(rmat[0, 0] * (-np.conj(pi1)) + rmat[0, 1] * np.conj(pi0)) / rk
    w1 = -(rmat[1, 0] * (-np.conj(pi1)) + rmat[1, 1] * np.conj(pi0)) / rk
    # m^{AA'} = omega^A pibar^{A'}
    m00 = w0 * np.conj(pi0)
    m01 = w0 * np.conj(pi1)
    m10 = w1 * np.conj(pi0)
    m11 = w1 * np.conj(pi1)
    m = np.empty((len(k4), 4), dtype=complex)
    m[:, 0] = (m00 + m11) / s2
    m[:, 1] = (m01 + m10) / s2
    m[:, 2] = 1j * (m10 - m01) / s2
    m[:, 3] = (m00 - m11) / s2
    return m


def _averaged_m(dist, k4, spec):
    pts, wts = dist.nodes(spec)
    acc = None
    for R, w in zip(pts, wts):
        m = _frame_m_vectors(R, k4)
        acc = w * m if acc is None else acc + w * m
    return acc


def free_potential_average(amps, params, dist, x, spec=DEFAULT_SPEC):
    """Coherent average of the transverse free potential at a point.

    A_a(x) = 2 Re{ -i int dk~ Z0(k) [<m_a> alpha_+ + <mbar_a> alpha_-]
    e^{-i k.x} } with <m_a> the Z1-averaged polarization leg; satisfies the
    Lorenz condition identically because k.m = 0.
    """
    x = np.asarray(x, dtype=float)
    profile = params.profile
    dirs, wdir = angular_grid(spec.angular_order, axisymmetric=False)
    phase_scale = abs(x[0]) + np.linalg.norm(x[1:])

    breaks = profile.breakpoints()
    counts = [max(2, int(math.ceil((b - a) * max(phase_scale, 1e-12) / math.pi)))
              for a, b in zip(breaks[:-1], breaks[1:])]
    prev = None
    refine = 1
    for _ in range(spec.max_subdivisions + 1):
        ks, wk = panel_nodes(breaks, [c * refine for c in counts], order=12)
        k4 = np.empty((len(dirs), len(ks), 4))
        k4[:, :, 0] = ks[None, :]
        k4[:, :, 1:] = ks[None, :, None] * dirs[:, None, :]
        flat = k4.reshape(-1, 4)
        ap, am = amps(flat)
        mvec = _averaged_m(dist, flat, spec)
        kx = flat[:, 0] * x[0] - flat[:, 1:] @ x[1:]
        integrand = (-1j) * (mvec * ap[:, None] + np.conj(mvec) * am[:, None]) \
            * np.exp(-1j * kx)[:, None]
        integrand = 2.0 * integrand.real
        integrand = integrand.reshape(len(dirs), len(ks), 4)
        meas = (wdir[:, None] * (wk * ks * profile.z0(ks))[None, :]) / (2.0 * (2.0 * math.pi) ** 3)
        cur = np.einsum("dk,dka->a", meas, integrand)
        if prev is not None and np.max(np.abs(cur - prev)) <= max(
                spec.abs_tol, spec.rel_tol * max(1.0, np.max(np.abs(cur)))):
            return cur
        prev = cur
        refine *= 2
    raise ToleranceNotMet("free-field average did not converge")


def field_tensor(amps, params, dist, x, spec=DEFAULT_SPEC, step=None):
    """F_ab = d_a A_b - d_b A_a by Richardson central differences."""
    x = np.asarray(x, dtype=float)
    h0 = step or 0.05 / params.profile.k2
    grad = np.empty((4, 4))
    for a in range(4):
        e = np.zeros(4)
        e[a] = 1.0
        d_h = None
        for h in (h0, h0 / 2.0):
            d = (free_potential_average(amps, params, dist, x + h * e, spec)
                 - free_potential_average(amps, params, dist, x - h * e, spec)) / (2.0 * h)
            if d_h is None:
                d_h = d
            else:
                grad[a] = (4.0 * d - d_h) / 3.0
    return grad - grad.T


def lorenz_residual(amps, params, dist, x, spec=DEFAULT_SPEC, step=None):
    """(|d^a A_a|, error bound) at x, derivatives by Richardson differences.

    The bound combines the Richardson defect with the propagated quadrature
    tolerance; the residual itself is zero in exact arithmetic.
    """
    x = np.asarray(x, dtype=float)
    h0 = step or 0.05 / params.profile.k2
    div_levels = []
    for h in (h0, h0 / 2.0):
        terms = []
        for a in range(4):
            e = np.zeros(4)
            e[a] = 1.0
            d = (free_potential_average(amps, params, dist, x + h * e, spec)[a]
                 - free_potential_average(amps, params, dist, x - h * e, spec)[a]) / (2.0 * h)
            terms.append(d)
        # d^a A_a = g^{ab} d_a A_b
        div_levels.append(terms[0] - terms[1] - terms[2] - terms[3])
    div = (4.0 * div_levels[1] - div_levels[0]) / 3.0
    defect = abs(div_levels[1] - div_levels[0])
    amp_scale = max(abs(v) for v in
                    free_potential_average(amps, params, dist, x, spec)) + spec.abs_tol
    quad_part = 8.0 * max(spec.abs_tol, spec.rel_tol * amp_scale) / h0
    return abs(div), defect + quad_part
