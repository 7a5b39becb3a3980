"""Photon-counting statistics of classical pointlike currents.

The count distribution is encoded in the generating function

    C(lambda, tau, N) = ( E[ exp(lambda F / N) ] )^N,
    C(lambda, tau, oo) = exp( lambda E[F] ),

where the expectation runs over the normalized vacuum densities Z0(k) Z1(R)
against the invariant measures, and the mode exponent

    F(R, k) = q_ren^2 T_ab(R, k) conj(I^a) I^b,
    I^a(k)  = int_0^tau ds (dX^a/ds) e^{i k.X(s)}

pairs the worldline amplitude with the transverse form T_ab = x_a x_b +
y_a y_b of the R-labelled frame.  Probabilities follow by differentiating
C at lambda = -1; for finite N this is done through an exact recurrence on
the quadrature moments E[(F/N)^j e^{-F/N}], for N = oo the law is Poisson
with mean E[F].

Bremsstrahlung-type quantities (velocity change u -> v) are exposed through
the closed-form brackets of the two-segment worldline with the exponent
weighted by the max-normalized cutoff chi(k) = Z0(k)/Z, which keeps them
scale-free in the renormalized charge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergentIntegral, MomentOverflow, NonFinite, ToleranceNotMet
from .numerics import (
    DEFAULT_SPEC,
    RDistribution,
    angular_grid,
    panel_nodes,
)
from .spin_algebra import (
    METRIC,
    com_spin_frame,
    minkowski_dot,
    so13_from_sl2c,
    so13_inverse,
    tetrads_from_frame,
)

PROBABILITY_FLOOR = 1e-300
MAX_MOMENT_ORDER = 140


def four_velocity(rapidity, axis=(0.0, 0.0, 1.0)):
    """Unit timelike vector (cosh eta, sinh eta * axis)."""
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0:
        if rapidity != 0.0:
            raise ValueError("nonzero rapidity needs an axis")
        return np.array([1.0, 0.0, 0.0, 0.0])
    return np.array([math.cosh(rapidity), *(math.sinh(rapidity) * axis / n)])


# ---------------------------------------------------------------------------
# worldlines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Piecewise-inertial worldline X(0) = 0, given by segment velocities
    and strictly increasing proper-time switch points starting at 0."""

    velocities: tuple
    starts: tuple

    def __post_init__(self):
        us = tuple(tuple(float(c) for c in u) for u in self.velocities)
        starts = tuple(float(s) for s in self.starts)
        if len(us) != len(starts) or not us:
            raise ValueError("need one start per segment")
        if starts[0] != 0.0:
            raise ValueError("trajectory must start at s = 0")
        if any(b <= a for a, b in zip(starts[:-1], starts[1:])):
            raise ValueError("switch points must increase strictly")
        for u in us:
            uu = u[0] ** 2 - u[1] ** 2 - u[2] ** 2 - u[3] ** 2
            if abs(uu - 1.0) > 1e-9 or u[0] <= 0.0:
                raise ValueError(f"segment velocity {u} is not unit timelike")
        object.__setattr__(self, "velocities", us)
        object.__setattr__(self, "starts", starts)

    @classmethod
    def uniform(cls, u):
        return cls(velocities=(tuple(u),), starts=(0.0,))

    @classmethod
    def velocity_change(cls, u, v, tau1):
        return cls(velocities=(tuple(u), tuple(v)), starts=(0.0, float(tau1)))

    def segment_table(self, tau):
        """Velocities, start positions and durations clipped to [0, tau]."""
        if tau < 0.0:
            raise ValueError("tau must be nonnegative")
        us, x0s, durs = [], [], []
        x = np.zeros(4)
        starts = list(self.starts) + [math.inf]
        for j, u in enumerate(self.velocities):
            a, b = starts[j], min(starts[j + 1], tau)
            if b > a:
                us.append(np.asarray(u, dtype=float))
                x0s.append(x.copy())
                durs.append(b - a)
            x = x + np.asarray(u, dtype=float) * (min(starts[j + 1], tau) - a if b > a else 0.0)
            if starts[j + 1] >= tau:
                break
        return np.array(us), np.array(x0s), np.array(durs)

    def max_speed_scale(self):
        return max(u[0] + math.sqrt(max(u[0] ** 2 - 1.0, 0.0)) for u in self.velocities)


# ---------------------------------------------------------------------------
# transverse form and scalar operations
# ---------------------------------------------------------------------------

def uniform_spectrum(u, tau, k, q_ren=1.0):
    """Squared worldline amplitude factor of uniform motion:
    q_ren^2 sin^2(k.u tau / 2) / (k.u / 2)^2."""
    ku = minkowski_dot(np.asarray(k, dtype=float), np.asarray(u, dtype=float))
    if tau < 0.0:
        raise ValueError("tau must be nonnegative")
    half = 0.5 * ku
    return q_ren ** 2 * math.sin(half * tau) ** 2 / half ** 2


def transverse_tensor(k, dist=None, nu=None, spec=DEFAULT_SPEC):
    """Z1-average of x_a x_b + y_a y_b (both indices lowered).

    Symmetric, annihilates k, and contracts positively: w^a w^b T_ab =
    <(w.x)^2 + (w.y)^2>.  Built from the R-labelled frame tetrads.
    """
    k = np.asarray(k, dtype=float)
    dist = dist or RDistribution.point_mass()
    pts, wts = dist.nodes(spec)
    acc = np.zeros((4, 4))
    for R, w in zip(pts, wts):
        _, mink = tetrads_from_frame(com_spin_frame(R, k, nu=nu))
        xl = METRIC @ mink.x_a
        yl = METRIC @ mink.y_a
        acc += w * (np.outer(xl, xl) + np.outer(yl, yl))
    return acc


def mode_exponent(traj, tau, k, R, q_ren=1.0, nu=None):
    """F(R, k) for one momentum and one frame label, via the tetrad route.

    Equals q_ren^2 (|I.x|^2 + |I.y|^2) with I^a the segmentwise closed-form
    worldline amplitude; nonnegative by construction.
    """
    k = np.asarray(k, dtype=float)
    us, x0s, durs = traj.segment_table(tau)
    if len(us) == 0:
        return 0.0
    amp = np.zeros(4, dtype=complex)
    for u, x0, d in zip(us, x0s, durs):
        ku = minkowski_dot(k, u)
        phase = np.exp(1j * minkowski_dot(k, x0))
        amp += u * phase * (np.exp(1j * ku * d) - 1.0) / (1j * ku)
    _, mink = tetrads_from_frame(com_spin_frame(R, k, nu=nu))
    ix = minkowski_dot(amp, mink.x_a.astype(complex))
    iy = minkowski_dot(amp, mink.y_a.astype(complex))
    return q_ren ** 2 * (abs(ix) ** 2 + abs(iy) ** 2)


# ---------------------------------------------------------------------------
# vectorized momentum-space integration
# ---------------------------------------------------------------------------

def _axisymmetric(*vectors):
    """True when every four-vector's spatial part lies on the z axis."""
    for v in vectors:
        if v is None:
            continue
        v = np.asarray(v, dtype=float)
        if abs(v[1]) + abs(v[2]) > 1e-12 * max(1.0, np.linalg.norm(v)):
            return False
    return True


def _momentum_integral(fn, profile, spec, *, weight, phase_scale=0.0,
                       axisymmetric=True, boost_w=None):
    """int dk~ W(k') fn over the light cone, with optional boosted cutoff.

    ``fn(kmag, dirs)`` receives physical radial magnitudes (ndir, nrad) and
    unit directions (ndir, 3) and returns (ndir, nrad) or (ndir, nrad, m).
    ``W`` is Z0 (weight="z0") or chi (weight="chi") evaluated at k' =
    w(dir) * k, where ``boost_w(dirs)`` returns the per-direction argument
    scale of a Lorentz-transformed cutoff (1 when absent); the radial grid
    is substituted accordingly, so panels always live on the profile
    support.  Refines radial panels until the spec tolerance is met.
    """
    dirs, wdir = angular_grid(spec.angular_order, axisymmetric=axisymmetric)
    wfac = np.ones(len(dirs)) if boost_w is None else np.asarray(boost_w(dirs), dtype=float)
    if np.any(wfac <= 0.0):
        raise ValueError("boost factor must stay positive")
    breaks = profile.breakpoints()
    eff_phase = phase_scale / wfac.min()
    counts = [max(1, int(math.ceil((b - a) * eff_phase / (4.0 * math.pi))))
              for a, b in zip(breaks[:-1], breaks[1:])]

    prev = None
    refine = 2
    for _ in range(spec.max_subdivisions + 1):
        kappa, wk = panel_nodes(breaks, [c * refine for c in counts], order=12)
        wgt = profile.z0(kappa) if weight == "z0" else profile.chi(kappa)
        kmag = kappa[None, :] / wfac[:, None]
        vals = np.asarray(fn(kmag, dirs))
        if not np.all(np.isfinite(vals)):
            raise NonFinite("momentum-space integrand is not finite")
        radial = wk * kappa * wgt
        meas = (wdir / wfac ** 2)[:, None] * radial[None, :] / (2.0 * (2.0 * math.pi) ** 3)
        if vals.ndim == 2:
            cur = float(np.sum(meas * vals))
        else:
            cur = np.einsum("dk,dkm->m", meas, vals)
        if prev is not None:
            err = np.max(np.abs(np.atleast_1d(cur - prev)))
            scale = np.max(np.abs(np.atleast_1d(cur)))
            if err <= max(spec.abs_tol, spec.rel_tol * scale):
                return cur
        prev = cur
        refine *= 2
    raise ToleranceNotMet("momentum-space integral did not converge")


class _OmegaAverage:
    """Z1-averaged contractions of the frame leg omega^a(R, k).

    omega^a = (2 (k.R) R^a - k^a) / (2 (k.R)^2) for unit timelike R, so any
    dot product <omega.A> is a weighted sum of closed forms over the
    distribution nodes (k.R is recomputed per node to keep memory flat).
    """

    def __init__(self, dist, dirs, kmag, spec):
        self.pts, self.wts = dist.nodes(spec)
        self.dirs = dirs
        self.kmag = kmag

    def _kr(self, R):
        return self.kmag * (R[0] - self.dirs @ R[1:])[:, None]

    def dot_vector(self, a):
        """<omega.a> for a constant four-vector a."""
        a = np.asarray(a, dtype=float)
        ka = self.kmag * (a[0] - self.dirs @ a[1:])[:, None]          # (ndir, nrad)
        acc = 0.0
        for R, w in zip(self.pts, self.wts):
            kr = self._kr(R)
            ra = R[0] * a[0] - R[1:] @ a[1:]
            acc = acc + w * (2.0 * kr * ra - ka) / (2.0 * kr ** 2)
        return acc

    def dot_amplitude(self, amp, k_dot_amp):
        """<omega.I> for a complex amplitude I given as (4, ndir, nrad)."""
        acc = 0.0
        for R, w in zip(self.pts, self.wts):
            kr = self._kr(R)
            ra = R[0] * amp[0] - R[1] * amp[1] - R[2] * amp[2] - R[3] * amp[3]
            acc = acc + w * (2.0 * kr * ra - k_dot_amp) / (2.0 * kr ** 2)
        return acc


def _worldline_amplitude(traj, tau, dirs, kmag):
    """Segmentwise closed form of I^a(k); returns (4, ndir, nrad) complex
    plus k.I (ndir, nrad)."""
    us, x0s, durs = traj.segment_table(tau)
    amp = np.zeros((4,) + kmag.shape, dtype=complex)
    for u, x0, d in zip(us, x0s, durs):
        cu = u[0] - dirs @ u[1:]                     # (ndir,)
        dx = x0[0] - dirs @ x0[1:]
        ku = kmag * cu[:, None]
        seg = np.exp(1j * kmag * dx[:, None]) * (np.exp(1j * ku * d) - 1.0) / (1j * ku)
        for a in range(4):
            amp[a] += u[a] * seg
    k_dot_amp = kmag * (amp[0] - np.einsum("di,idk->dk", dirs, amp[1:]))
    return amp, k_dot_amp


def _mode_exponent_field(traj, tau, q_ren, dist, spec):
    """Returns fn(kmag, dirs) evaluating F on the grid (point or averaged R)."""

    def fn(kmag, dirs):
        amp, k_amp = _worldline_amplitude(traj, tau, dirs, kmag)
        om = _OmegaAverage(dist, dirs, kmag, spec)
        om_amp = om.dot_amplitude(amp, k_amp)
        norm = (np.abs(amp[0]) ** 2 - np.abs(amp[1]) ** 2
                - np.abs(amp[2]) ** 2 - np.abs(amp[3]) ** 2)
        f = q_ren ** 2 * (2.0 * np.real(k_amp * np.conj(om_amp)) - norm)
        fmin = f.min()
        if fmin < -1e-8 * max(1.0, f.max()):
            raise NonFinite(f"mode exponent turned negative ({fmin}); convention error")
        np.clip(f, 0.0, None, out=f)
        return f

    return fn


def _traj_axisymmetric(traj, dist):
    vecs = [np.asarray(u) for u in traj.velocities] + [dist.center]
    if dist.kind != "point_mass":
        return _axisymmetric(dist.center) and all(_axisymmetric(v) for v in vecs)
    return all(_axisymmetric(v) for v in vecs)


# ---------------------------------------------------------------------------
# generating function and probabilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratingSample:
    """One evaluation C(lambda) of the counting generating function."""

    lam: float
    value: float


def _expect_moments(traj, tau, n_orders, power_scale, lam_scale, profile, dist,
                    spec, q_ren):
    """E[(power_scale F)^j e^{lam_scale F}] for j = 0..n_orders over Z0 x Z1."""
    if dist.kind != "point_mass":
        raise NotImplementedError("finite-N moments need a point-mass R distribution")
    ffield = _mode_exponent_field(traj, tau, q_ren, dist, spec)
    phase = 2.0 * tau * traj.max_speed_scale()

    def fn(kmag, dirs):
        f = ffield(kmag, dirs)
        out = np.empty(f.shape + (n_orders + 1,))
        damp = np.exp(lam_scale * f)
        out[..., 0] = damp
        base = power_scale * f
        powers = np.ones_like(f)
        for j in range(1, n_orders + 1):
            powers = powers * base
            out[..., j] = powers * damp
        return out

    return _momentum_integral(
        fn, profile, spec, weight="z0", phase_scale=phase,
        axisymmetric=_traj_axisymmetric(traj, dist))


def mean_mode_exponent(traj, tau, profile, dist, spec=DEFAULT_SPEC, q_ren=1.0):
    """E[F]: the N -> infinity mean photon number at proper time tau."""
    ffield = _mode_exponent_field(traj, tau, q_ren, dist, spec)
    return float(_momentum_integral(
        ffield, profile, spec, weight="z0",
        phase_scale=2.0 * tau * traj.max_speed_scale(),
        axisymmetric=_traj_axisymmetric(traj, dist)))


def generating_function(lam, tau, n_osc, traj, profile, dist=None,
                        spec=DEFAULT_SPEC, q_ren=1.0):
    """C(lambda, tau, N); N = math.inf gives exp(lambda E[F]).

    Finite N evaluates (E[e^{lambda F / N}])^N; values lie in (0, 1] for
    lambda in [-1, 0].
    """
    dist = dist or RDistribution.point_mass()
    if tau == 0.0 or lam == 0.0:
        return 1.0
    if n_osc == math.inf:
        return math.exp(lam * mean_mode_exponent(traj, tau, profile, dist, spec, q_ren))
    n = int(n_osc)
    if n < 1:
        raise ValueError("N must be a positive integer or math.inf")
    moments = _expect_moments(traj, tau, 0, 1.0, lam / n, profile, dist, spec, q_ren)
    return float(np.atleast_1d(moments)[0]) ** n


@dataclass(frozen=True)
class PhotonDistribution:
    """Transverse photon-count probabilities p(0..n_max)."""

    probs: np.ndarray
    n_osc: float
    mean: float
    floored: bool = False

    def total(self):
        return float(np.sum(self.probs))


def tv_distance(p, q):
    """Total-variation distance of two count distributions on 0..n_max."""
    pa = np.asarray(p, dtype=float)
    qa = np.asarray(q, dtype=float)
    n = max(pa.size, qa.size)
    pa = np.pad(pa, (0, n - pa.size))
    qa = np.pad(qa, (0, n - qa.size))
    tail = abs((1.0 - pa.sum()) - (1.0 - qa.sum()))
    return 0.5 * (np.abs(pa - qa).sum() + tail)


def poisson_probabilities(mu, n_max):
    ns = np.arange(n_max + 1)
    if mu == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    from scipy.special import gammaln
    return np.exp(ns * math.log(mu) - mu - gammaln(ns + 1))


def probabilities_from_moments(moments, n_osc):
    """Exact power-derivative recurrence turning the damped moments
    m_j = E[(F/N)^j e^{-F/N}] into probabilities p(0..len(m)-1):

        P_n = (n m_0)^{-1} [ N sum_{i<n} m_{i+1} P_{n-1-i} / i!
                              - sum_{0<i<n} (n-i) m_i P_{n-i} / i! ],

    with P_0 = m_0^N; follows from g h' = N g' h for h = g^N."""
    m = np.asarray(moments, dtype=float)
    n = int(n_osc)
    n_max = m.size - 1
    inv_fact = np.ones(n_max + 1)
    for i in range(1, n_max + 1):
        inv_fact[i] = inv_fact[i - 1] / i
    p = np.empty(n_max + 1)
    p[0] = m[0] ** n
    for order in range(1, n_max + 1):
        lead = sum(m[i + 1] * inv_fact[i] * p[order - 1 - i] for i in range(order))
        sub = sum((order - i) * inv_fact[i] * m[i] * p[order - i]
                  for i in range(1, order))
        p[order] = (n * lead - sub) / (order * m[0])
    return p


def photon_probabilities(tau, n_osc, n_max, traj, profile, dist=None,
                         spec=DEFAULT_SPEC, q_ren=1.0):
    """Count distribution p(n) = (1/n!) d^n C / d lambda^n at lambda = -1.

    Finite N runs :func:`probabilities_from_moments` on the quadrature
    moments; N = infinity is Poisson with mean E[F].  Probabilities below
    1e-300 are floored to zero and flagged.
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if n_max > MAX_MOMENT_ORDER:
        raise MomentOverflow(
            f"n_max = {n_max} beyond the stable order {MAX_MOMENT_ORDER}")
    dist = dist or RDistribution.point_mass()
    if tau == 0.0:
        probs = np.zeros(n_max + 1)
        probs[0] = 1.0
        return PhotonDistribution(probs=probs, n_osc=n_osc, mean=0.0)
    mean = mean_mode_exponent(traj, tau, profile, dist, spec, q_ren)
    if n_osc == math.inf:
        probs = poisson_probabilities(mean, n_max)
        floored = bool(np.any((probs > 0) & (probs < PROBABILITY_FLOOR)))
        probs[probs < PROBABILITY_FLOOR] = 0.0
        return PhotonDistribution(probs=probs, n_osc=math.inf, mean=mean,
                                  floored=floored)
    n = int(n_osc)
    if n < 1:
        raise ValueError("N must be a positive integer or math.inf")
    m = np.atleast_1d(_expect_moments(traj, tau, n_max, 1.0 / n, -1.0 / n,
                                      profile, dist, spec, q_ren))
    p = probabilities_from_moments(m, n)
    floored = bool(np.any((p != 0) & (np.abs(p) < PROBABILITY_FLOOR)))
    p[np.abs(p) < PROBABILITY_FLOOR] = 0.0
    if p.min() < -1e-12:
        raise NonFinite(f"negative probability {p.min()} from moment recurrence")
    np.clip(p, 0.0, None, out=p)
    return PhotonDistribution(probs=p, n_osc=n, mean=mean, floored=floored)


# ---------------------------------------------------------------------------
# bremsstrahlung family (chi-weighted exponents)
# ---------------------------------------------------------------------------

def _require_unit(u, name):
    u = np.asarray(u, dtype=float)
    if abs(minkowski_dot(u, u) - 1.0) > 1e-9 or u[0] <= 0.0:
        raise ValueError(f"{name} must be unit timelike future-pointing")
    return u


def _check_infrared(profile):
    if profile.chi_at_zero() > 0.0:
        raise DivergentIntegral(
            "chi(0) > 0: infrared-divergent exponent; use a profile with k1 > 0")


def _chi_exponent(bracket_fn, profile, dist, spec, phase_scale, axisym, boost_w=None):
    """q_ren-free helper: int dk~ chi(k) <bracket>, bracket built on the grid."""
    return float(_momentum_integral(
        bracket_fn, profile, spec, weight="chi", phase_scale=phase_scale,
        axisymmetric=axisym, boost_w=boost_w))


def _velocity_blocks(om, dirs, kmag, u, v=None):
    """(k.u, <T(u,u)>, ...) contractions on the grid for constant velocities."""
    ku = kmag * (u[0] - dirs @ u[1:])[:, None]
    ou = om.dot_vector(u)
    tuu = 2.0 * ku * ou - 1.0
    if v is None:
        return ku, ou, tuu
    kv = kmag * (v[0] - dirs @ v[1:])[:, None]
    ov = om.dot_vector(v)
    tvv = 2.0 * kv * ov - 1.0
    tuv = ku * ov + kv * ou - minkowski_dot(u, v)
    return ku, ou, tuu, kv, ov, tvv, tuv


def uniform_vacuum_probability(u, tau, profile, dist=None, spec=DEFAULT_SPEC,
                               q_ren=1.0, boost_w=None, axisym=None):
    """Vacuum persistence of a uniformly moving charge:
    exp(-2 q_ren^2 int dk~ chi <T(u,u)> (1 - cos(k.u tau)) / (k.u)^2)."""
    u = _require_unit(u, "u")
    dist = dist or RDistribution.point_mass()
    if axisym is None:
        axisym = _axisymmetric(u, dist.center) and boost_w is None

    def fn(kmag, dirs):
        om = _OmegaAverage(dist, dirs, kmag, spec)
        ku, _, tuu = _velocity_blocks(om, dirs, kmag, u)
        return tuu * (1.0 - np.cos(ku * tau)) / ku ** 2

    expo = _chi_exponent(fn, profile, dist, spec, 2.0 * tau * u[0], axisym, boost_w)
    return math.exp(-2.0 * q_ren ** 2 * expo)


BREMS_MODES = ("finite_times", "tau1_limit", "s_matrix")


def brems_generating(tau1, dtau, u, v, profile, dist=None, spec=DEFAULT_SPEC,
                     q_ren=1.0, mode="s_matrix"):
    """Vacuum persistence C(-1, ., oo) of the velocity change u -> v.

    finite_times: exact two-segment bracket at (tau1, tau1 + dtau);
    tau1_limit: tau1 -> infinity with dtau fixed (oscillatory terms
    averaged out analytically); s_matrix: additionally dtau -> infinity.
    The last two require an infrared-regular profile (chi(0) = 0).
    """
    if mode not in BREMS_MODES:
        raise ValueError(f"mode must be one of {BREMS_MODES}")
    u = _require_unit(u, "u")
    v = _require_unit(v, "v")
    dist = dist or RDistribution.point_mass()
    if mode in ("tau1_limit", "s_matrix"):
        _check_infrared(profile)
    axisym = _axisymmetric(u, v, dist.center)

    def fn(kmag, dirs):
        om = _OmegaAverage(dist, dirs, kmag, spec)
        ku, _, tuu, kv, _, tvv, tuv = _velocity_blocks(om, dirs, kmag, u, v)
        if mode == "s_matrix":
            return tuu / ku ** 2 + tvv / kv ** 2 - tuv / (ku * kv)
        cv = 1.0 - np.cos(kv * dtau)
        if mode == "tau1_limit":
            return tuu / ku ** 2 + (tvv / kv ** 2 - tuv / (ku * kv)) * cv
        cu = 1.0 - np.cos(ku * tau1)
        su_sv = np.sin(ku * tau1) * np.sin(kv * dtau)
        return (tuu * cu / ku ** 2 + tvv * cv / kv ** 2
                - tuv * cu * cv / (ku * kv) + tuv * su_sv / (ku * kv))

    phase = {"finite_times": 2.0 * (tau1 + dtau) * max(u[0], v[0]),
             "tau1_limit": 2.0 * dtau * v[0],
             "s_matrix": 0.0}[mode]
    expo = _chi_exponent(fn, profile, dist, spec, phase, axisym)
    return math.exp(-2.0 * q_ren ** 2 * expo)


@dataclass(frozen=True)
class MeanPhotons:
    """Mean photon number split into inertial and acceleration parts."""

    total: float
    inertial: float
    brems: float


def mean_photons(u, v, profile, dist=None, spec=DEFAULT_SPEC, q_ren=1.0):
    """Mean photon number of the scattering-limit velocity change u -> v.

    inertial = q^2 int dk~ chi <T(u,u)>/(k.u)^2 + (u -> v); brems = q^2
    int dk~ chi <T(b,b)> with b = u/(k.u) - v/(k.v), which is nonnegative.
    Requires chi(0) = 0.
    """
    u = _require_unit(u, "u")
    v = _require_unit(v, "v")
    dist = dist or RDistribution.point_mass()
    _check_infrared(profile)
    axisym = _axisymmetric(u, v, dist.center)

    def fn(kmag, dirs):
        om = _OmegaAverage(dist, dirs, kmag, spec)
        ku, _, tuu = _velocity_blocks(om, dirs, kmag, u)
        kv, _, tvv = _velocity_blocks(om, dirs, kmag, v)
        inertial = tuu / ku ** 2 + tvv / kv ** 2
        # <T(b,b)> with b = u/(k.u) - v/(k.v) collapses to -b.b because
        # k.b = 0, so the frame average drops out; componentwise b makes
        # the u = v case vanish identically.
        b = [u[a] / ku - v[a] / kv for a in range(4)]
        brems = -(b[0] ** 2 - b[1] ** 2 - b[2] ** 2 - b[3] ** 2)
        return np.stack([inertial, brems], axis=-1)

    vals = _momentum_integral(fn, profile, spec, weight="chi", phase_scale=0.0,
                              axisymmetric=axisym)
    inertial = q_ren ** 2 * float(vals[0])
    brems = q_ren ** 2 * float(vals[1])
    return MeanPhotons(total=inertial + brems, inertial=inertial, brems=brems)


def covariance_check(u, boost, tau, profile, dist=None, spec=DEFAULT_SPEC,
                     q_ren=1.0, boost_vacuum=True):
    """Vacuum persistence before and after a Lorentz transformation.

    Returns (c_plain, c_transformed).  With ``boost_vacuum`` the cutoff
    argument and the R label move along with the current (the invariant
    combination); without it only the current is boosted, which changes
    the prediction.
    """
    u = _require_unit(u, "u")
    dist = dist or RDistribution.point_mass()
    L = so13_from_sl2c(np.asarray(boost, dtype=complex))
    Linv = so13_inverse(L)
    c_plain = uniform_vacuum_probability(u, tau, profile, dist, spec, q_ren)
    u_b = L @ u
    if not boost_vacuum:
        c_boosted = uniform_vacuum_probability(u_b, tau, profile, dist, spec, q_ren)
        return c_plain, c_boosted
    dist_b = dist.boosted(L)

    def boost_w(dirs):
        vecs = np.empty((len(dirs), 4))
        vecs[:, 0] = 1.0
        vecs[:, 1:] = dirs
        return (vecs @ Linv.T)[:, 0]

    axisym = (_axisymmetric(u, dist.center, u_b, dist_b.center)
              and _axisymmetric(L @ np.array([0.0, 0.0, 0.0, 1.0])))
    c_boosted = uniform_vacuum_probability(
        u_b, tau, profile, dist_b, spec, q_ren, boost_w=boost_w, axisym=axisym)
    return c_plain, c_boosted
