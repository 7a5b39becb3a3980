import math

import numpy as np
import pytest
from scipy.integrate import dblquad, quad

from helpers import rand_null, rand_unit_timelike
from milneqed import numerics as nm
from milneqed import spin_algebra as sa
from milneqed import statistics as st
from milneqed.errors import DivergentIntegral, MomentOverflow

SPEC = nm.QuadratureSpec(angular_order=40)
PROFILE = nm.CutoffProfile.step(0.0, 1.0)
IR_PROFILE = nm.CutoffProfile.step(0.15, 1.0)
U_REST = st.four_velocity(0.0)
R_BOOSTED = st.four_velocity(0.5)
DIST = nm.RDistribution.point_mass(R_BOOSTED)
TAU = 10.0
QREN = 0.5
TRAJ = st.Trajectory.uniform(U_REST)


# ---------------------------------------------------------------------------
# worldlines and elementary spectra
# ---------------------------------------------------------------------------

def test_trajectory_validation():
    with pytest.raises(ValueError):
        st.Trajectory(velocities=((1.0, 0, 0, 0),), starts=(1.0,))
    with pytest.raises(ValueError):
        st.Trajectory(velocities=((1.0, 0, 0, 0), (1.0, 0, 0, 0)), starts=(0.0, 0.0))
    with pytest.raises(ValueError):
        st.Trajectory(velocities=((2.0, 0, 0, 0),), starts=(0.0,))


def test_uniform_spectrum_zero_tau():
    k = np.array([0.4, 0.0, 0.0, 0.4])
    assert st.uniform_spectrum(U_REST, 0.0, k) == 0.0


def test_uniform_spectrum_rest_frame():
    k = np.array([0.4, 0.1, 0.2, math.sqrt(0.16 - 0.05)])
    val = st.uniform_spectrum(U_REST, 3.0, k, q_ren=2.0)
    expected = 4.0 * math.sin(0.2 * 3.0) ** 2 / 0.2 ** 2
    assert abs(val - expected) < 1e-12


def test_uniform_spectrum_against_time_integral():
    u = st.four_velocity(0.7, [0.0, 1.0, 0.5])
    k = np.array([0.9, 0.3, -0.2, math.sqrt(0.81 - 0.13)])
    tau = 4.0
    ku = sa.minkowski_dot(k, u)
    re, _ = quad(lambda s: math.cos(ku * s), 0.0, tau, epsabs=1e-13)
    im, _ = quad(lambda s: math.sin(ku * s), 0.0, tau, epsabs=1e-13)
    assert abs(st.uniform_spectrum(u, tau, k) - (re ** 2 + im ** 2)) < 1e-10


# ---------------------------------------------------------------------------
# transverse tensor
# ---------------------------------------------------------------------------

def test_transverse_tensor_annihilates_k():
    rng = np.random.default_rng(0)
    for _ in range(10):
        k = rand_null(rng)
        T = st.transverse_tensor(k, nm.RDistribution.point_mass(rand_unit_timelike(rng)))
        assert np.max(np.abs(T @ k)) < 1e-12


def test_transverse_tensor_projector_along_z():
    T = st.transverse_tensor(np.array([2.0, 0, 0, 2.0]))
    np.testing.assert_allclose(T, np.diag([0.0, 1.0, 1.0, 0.0]), atol=1e-14)


def test_transverse_tensor_positive_contraction():
    rng = np.random.default_rng(1)
    for _ in range(20):
        k = rand_null(rng)
        dist = nm.RDistribution.point_mass(rand_unit_timelike(rng))
        T = st.transverse_tensor(k, dist)
        w = rng.normal(size=4)
        _, mink = sa.tetrads_from_frame(sa.com_spin_frame(dist.center, k))
        expected = sa.minkowski_dot(w, mink.x_a) ** 2 + sa.minkowski_dot(w, mink.y_a) ** 2
        assert w @ T @ w >= -1e-13
        assert abs(w @ T @ w - expected) < 1e-11


def test_transverse_tensor_closed_form():
    # T_ab = k_a omega_b + omega_a k_b - g_ab with omega the frame leg
    rng = np.random.default_rng(2)
    for _ in range(10):
        k = rand_null(rng)
        R = rand_unit_timelike(rng)
        T = st.transverse_tensor(k, nm.RDistribution.point_mass(R))
        om = sa.omega_vector(R, k)
        kl, ol = sa.METRIC @ k, sa.METRIC @ om
        closed = np.outer(kl, ol) + np.outer(ol, kl) - sa.METRIC
        np.testing.assert_allclose(T, closed, atol=1e-12)


def test_transverse_tensor_gaussian_matches_narrow_limit():
    k = np.array([0.8, 0.2, 0.1, math.sqrt(0.64 - 0.05)])
    T0 = st.transverse_tensor(k, nm.RDistribution.point_mass(R_BOOSTED))
    Tg = st.transverse_tensor(k, nm.RDistribution.rapidity_gaussian(1e-3, R_BOOSTED))
    np.testing.assert_allclose(Tg, T0, atol=2e-5)


# ---------------------------------------------------------------------------
# mode exponent
# ---------------------------------------------------------------------------

def test_mode_exponent_zero_tau():
    k = np.array([0.5, 0, 0, 0.5])
    assert st.mode_exponent(TRAJ, 0.0, k, R_BOOSTED) == 0.0


def test_mode_exponent_single_segment_factorizes():
    rng = np.random.default_rng(3)
    for _ in range(5):
        k = rand_null(rng)
        R = rand_unit_timelike(rng)
        u = st.four_velocity(0.4, [0, 0.3, 1.0])
        traj = st.Trajectory.uniform(u)
        T = st.transverse_tensor(k, nm.RDistribution.point_mass(R))
        expected = st.uniform_spectrum(u, 2.5, k, q_ren=QREN) * (u @ T @ u)
        assert abs(st.mode_exponent(traj, 2.5, k, R, q_ren=QREN) - expected) < 1e-12


def test_mode_exponent_two_segments_against_double_quadrature():
    u, v = U_REST, st.four_velocity(0.8)
    tau1, tau = 4.0, 10.0
    traj = st.Trajectory.velocity_change(u, v, tau1)
    k = np.array([0.7, 0.2, 0.1, math.sqrt(0.49 - 0.05)])
    T = st.transverse_tensor(k, DIST)

    def X(s):
        return u * s if s <= tau1 else u * tau1 + v * (s - tau1)

    def vel(s):
        return u if s <= tau1 else v

    def integrand(s, sp):
        ph = math.cos(sa.minkowski_dot(k, X(s)) - sa.minkowski_dot(k, X(sp)))
        return (vel(s) @ T @ vel(sp)) * ph

    val, _ = dblquad(integrand, 0.0, tau, 0.0, tau, epsabs=1e-11, epsrel=1e-11)
    closed = st.mode_exponent(traj, tau, k, R_BOOSTED, q_ren=QREN)
    assert abs(closed - QREN ** 2 * val) < 1e-8 * max(1.0, abs(closed))


def test_mode_exponent_nonnegative_random():
    rng = np.random.default_rng(4)
    traj = st.Trajectory.velocity_change(U_REST, st.four_velocity(1.0), 3.0)
    for _ in range(50):
        val = st.mode_exponent(traj, 8.0, rand_null(rng), rand_unit_timelike(rng))
        assert val >= 0.0


# ---------------------------------------------------------------------------
# generating function
# ---------------------------------------------------------------------------

def test_generating_at_zero_is_one():
    assert st.generating_function(0.0, TAU, 7, TRAJ, PROFILE, DIST, SPEC, QREN) == 1.0
    assert st.generating_function(0.0, TAU, math.inf, TRAJ, PROFILE, DIST, SPEC, QREN) == 1.0


def test_generating_monotone_and_bounded():
    lams = np.linspace(-1.0, 0.0, 9)
    for n_osc in (1, 40, math.inf):
        vals = [st.generating_function(l, TAU, n_osc, TRAJ, PROFILE, DIST, SPEC, QREN)
                for l in lams]
        samples = [st.GeneratingSample(lam=l, value=v) for l, v in zip(lams, vals)]
        assert all(0.0 < s.value <= 1.0 + 1e-12 for s in samples)
        assert all(a.value <= b.value + 1e-12 for a, b in zip(samples[:-1], samples[1:]))


def test_generating_n_one_is_plain_expectation():
    lam = -0.7
    c1 = st.generating_function(lam, TAU, 1, TRAJ, PROFILE, DIST, SPEC, QREN)
    m = np.atleast_1d(st._expect_moments(TRAJ, TAU, 0, 1.0, lam, PROFILE, DIST,
                                         SPEC, QREN))
    assert abs(c1 - m[0]) < 1e-14


def test_generating_large_n_approaches_infinity_limit():
    c_inf = st.generating_function(-1.0, TAU, math.inf, TRAJ, PROFILE, DIST, SPEC, QREN)
    c_n = st.generating_function(-1.0, TAU, 10 ** 4, TRAJ, PROFILE, DIST, SPEC, QREN)
    assert abs(c_n - c_inf) < 1e-3


# ---------------------------------------------------------------------------
# photon probabilities
# ---------------------------------------------------------------------------

def test_probabilities_zero_tau_is_vacuum():
    pd = st.photon_probabilities(0.0, 12, 6, TRAJ, PROFILE, DIST, SPEC, QREN)
    np.testing.assert_array_equal(pd.probs, [1, 0, 0, 0, 0, 0, 0])


def test_infinite_n_is_poisson():
    pd = st.photon_probabilities(TAU, math.inf, 20, TRAJ, PROFILE, DIST, SPEC, QREN)
    ref = st.poisson_probabilities(pd.mean, 20)
    assert st.tv_distance(pd.probs, ref) < 1e-12


def test_n_one_matches_series_oracle():
    # p(n) = sum_m (-1)^m E[F^{n+m}] / (n! m!), raw moments by quadrature
    orders = 80
    raw = np.atleast_1d(st._expect_moments(TRAJ, TAU, orders, 1.0, 0.0,
                                           PROFILE, DIST, SPEC, QREN))
    pd = st.photon_probabilities(TAU, 1, 8, TRAJ, PROFILE, DIST, SPEC, QREN)
    for n in range(9):
        terms = [(-1) ** m * raw[n + m] / (math.factorial(m) * math.factorial(n))
                 for m in range(orders - n + 1)]
        assert abs(pd.probs[n] - math.fsum(terms)) < 1e-8


def test_probability_normalization_bound():
    # Poisson: mean + 10 sqrt(mean); finite N is overdispersed with
    # Var(n) = mean + Var(F)/N, so the analogous cut uses that variance
    pd_inf = st.photon_probabilities(TAU, math.inf, 0, TRAJ, PROFILE, DIST, SPEC, QREN)
    mean = pd_inf.mean
    raw = np.atleast_1d(st._expect_moments(TRAJ, TAU, 2, 1.0, 0.0, PROFILE,
                                           DIST, SPEC, QREN))
    var_f = raw[2] - raw[1] ** 2
    n_max_poisson = int(mean + 10.0 * math.sqrt(mean)) + 1
    pd = st.photon_probabilities(TAU, math.inf, n_max_poisson, TRAJ, PROFILE,
                                 DIST, SPEC, QREN)
    assert 1.0 - 1e-6 <= pd.total() <= 1.0 + 1e-9
    for n_osc in (7, 100):
        n_max = int(mean + 10.0 * math.sqrt(mean + var_f / n_osc)) + 1
        pd = st.photon_probabilities(TAU, n_osc, n_max, TRAJ, PROFILE, DIST,
                                     SPEC, QREN)
        assert 1.0 - 1e-6 <= pd.total() <= 1.0 + 1e-9
        assert np.all(pd.probs >= 0.0)


def test_mean_matches_distribution():
    pd = st.photon_probabilities(TAU, 3, 40, TRAJ, PROFILE, DIST, SPEC, QREN)
    assert abs(pd.mean - np.arange(41) @ pd.probs) < 1e-8


def test_tv_distance_monotone_in_n():
    pd_inf = st.photon_probabilities(TAU, math.inf, 16, TRAJ, PROFILE, DIST, SPEC, QREN)
    tvs = [st.tv_distance(
        st.photon_probabilities(TAU, n, 16, TRAJ, PROFILE, DIST, SPEC, QREN).probs,
        pd_inf.probs) for n in (1, 10, 100, 1000, 10 ** 4)]
    assert all(a > b for a, b in zip(tvs[:-1], tvs[1:]))
    assert tvs[-1] < 1e-3


def test_moment_overflow_guard():
    with pytest.raises(MomentOverflow):
        st.photon_probabilities(TAU, 2, 200, TRAJ, PROFILE, DIST, SPEC, QREN)


def test_recurrence_against_high_precision_derivatives():
    """Finite-N probabilities equal Richardson central lambda-derivatives of
    the generating function built on the same discretization (step 1e-3,
    evaluated in 40-digit arithmetic so the differences do not drown)."""
    import mpmath

    mpmath.mp.dps = 40
    rng = np.random.default_rng(8)
    f_samples = rng.uniform(0.0, 6.0, size=200)
    weights = rng.uniform(0.0, 1.0, size=200)
    weights /= weights.sum()
    n_osc = 7

    m = np.array([np.sum(weights * (f_samples / n_osc) ** j
                         * np.exp(-f_samples / n_osc)) for j in range(6)])
    p_rec = st.probabilities_from_moments(m, n_osc)

    fs = [mpmath.mpf(float(x)) for x in f_samples]
    ws = [mpmath.mpf(float(w)) for w in weights]

    def c_of(lam):
        g = mpmath.fsum(w * mpmath.e ** (lam * f / n_osc) for w, f in zip(ws, fs))
        return g ** n_osc

    h = mpmath.mpf("1e-3")
    for n in range(6):
        def nth_diff(step):
            return mpmath.fsum(
                (-1) ** j * mpmath.binomial(n, j) * c_of(mpmath.mpf(-1) + (n / 2 - j) * step)
                for j in range(n + 1)) / step ** n
        d_h, d_h2 = nth_diff(h), nth_diff(h / 2)
        richardson = (4 ** 1 * d_h2 - d_h) / 3  # leading h^2 error removed
        p_fd = richardson / mpmath.factorial(n)
        assert abs(p_rec[n] - float(p_fd)) < 1e-5


# ---------------------------------------------------------------------------
# bremsstrahlung family
# ---------------------------------------------------------------------------

U_B = st.four_velocity(0.3)
V_B = st.four_velocity(1.0)
DIST_REST = nm.RDistribution.point_mass()


def test_brems_equal_velocities_single_term():
    c_uu = st.brems_generating(0.0, 0.0, U_B, U_B, IR_PROFILE, DIST_REST, SPEC,
                               QREN, mode="s_matrix")
    mp = st.mean_photons(U_B, U_B, IR_PROFILE, DIST_REST, SPEC, QREN)
    assert mp.brems == 0.0
    assert abs(c_uu - math.exp(-mp.inertial)) < 1e-12


def test_brems_finite_times_dtau_zero_is_uniform():
    c_ft = st.brems_generating(7.0, 0.0, U_B, V_B, IR_PROFILE, DIST_REST, SPEC,
                               QREN, mode="finite_times")
    c_u = st.uniform_vacuum_probability(U_B, 7.0, IR_PROFILE, DIST_REST, SPEC, QREN)
    assert abs(c_ft - c_u) < 1e-12


def test_brems_finite_times_converges_to_tau1_limit():
    dtau = 30.0
    c_lim = st.brems_generating(0.0, dtau, U_B, V_B, IR_PROFILE, DIST_REST, SPEC,
                                QREN, mode="tau1_limit")
    errs = [abs(st.brems_generating(t1, dtau, U_B, V_B, IR_PROFILE, DIST_REST,
                                    SPEC, QREN, mode="finite_times") - c_lim)
            for t1 in (30.0, 1000.0)]
    assert errs[1] < errs[0]
    assert errs[1] < 1e-3 * c_lim


def test_brems_tau1_limit_converges_to_s_matrix():
    c_s = st.brems_generating(0.0, 0.0, U_B, V_B, IR_PROFILE, DIST_REST, SPEC,
                              QREN, mode="s_matrix")
    for dtau in (300.0, 1000.0):
        c_lim = st.brems_generating(0.0, dtau, U_B, V_B, IR_PROFILE, DIST_REST,
                                    SPEC, QREN, mode="tau1_limit")
        assert abs(c_lim - c_s) < 1e-3 * c_s


def test_brems_sigma_infrared_guard():
    with pytest.raises(DivergentIntegral):
        st.brems_generating(0.0, 1.0, U_B, V_B, PROFILE, DIST_REST, SPEC, QREN,
                            mode="s_matrix")
    with pytest.raises(DivergentIntegral):
        st.mean_photons(U_B, V_B, PROFILE, DIST_REST, SPEC, QREN)


def test_s_matrix_is_exp_minus_mean():
    mp = st.mean_photons(U_B, V_B, IR_PROFILE, DIST_REST, SPEC, QREN)
    c_s = st.brems_generating(0.0, 0.0, U_B, V_B, IR_PROFILE, DIST_REST, SPEC,
                              QREN, mode="s_matrix")
    assert abs(c_s - math.exp(-mp.total)) < 1e-12
    assert mp.brems >= 0.0


def test_mean_photons_brems_nonnegative_random():
    rng = np.random.default_rng(9)
    for _ in range(25):
        u = st.four_velocity(rng.uniform(0, 1.2), rng.normal(size=3))
        v = st.four_velocity(rng.uniform(0, 1.2), rng.normal(size=3))
        mp = st.mean_photons(u, v, IR_PROFILE, DIST_REST, SPEC, QREN)
        assert mp.brems >= -1e-12


def test_mean_photons_boost_invariance():
    # boosting u, v, the R label and the cutoff argument together leaves
    # the totals unchanged (change of variables in the momentum integral)
    boost = sa.sl2c_boost([0, 0, 1.0], 0.4)
    L = sa.so13_from_sl2c(boost)
    Linv = sa.so13_inverse(L)
    u, v = st.four_velocity(0.2), st.four_velocity(0.9)
    dist = nm.RDistribution.point_mass(st.four_velocity(0.6))
    base = st.mean_photons(u, v, IR_PROFILE, dist, SPEC, QREN)

    def boost_w(dirs):
        vecs = np.empty((len(dirs), 4))
        vecs[:, 0] = 1.0
        vecs[:, 1:] = dirs
        return (vecs @ Linv.T)[:, 0]

    def fn(kmag, dirs):
        om = st._OmegaAverage(dist.boosted(L), dirs, kmag, SPEC)
        ku, _, tuu, kv, _, tvv, tuv = st._velocity_blocks(om, dirs, kmag, L @ u, L @ v)
        inertial = tuu / ku ** 2 + tvv / kv ** 2
        return np.stack([inertial, inertial - 2.0 * tuv / (ku * kv)], axis=-1)

    vals = st._momentum_integral(fn, IR_PROFILE, SPEC, weight="chi",
                                 axisymmetric=True, boost_w=boost_w)
    assert abs(QREN ** 2 * vals[0] - base.inertial) < 1e-6 * base.inertial
    assert abs(QREN ** 2 * vals[1] - base.brems) < 1e-6 * base.brems


def test_inertial_term_infrared_log_growth():
    # shrinking k1 by decades grows the inertial integral without bound
    vals = []
    for k1 in (1e-1, 1e-2, 1e-3):
        prof = nm.CutoffProfile.step(k1, 1.0)
        mp = st.mean_photons(U_B, U_B, prof, DIST_REST, SPEC, QREN)
        vals.append(mp.inertial)
    assert vals[0] < vals[1] < vals[2]
    # log signature: roughly constant increment per decade
    d1, d2 = vals[1] - vals[0], vals[2] - vals[1]
    assert 0.7 < d2 / d1 < 1.3


# ---------------------------------------------------------------------------
# covariance
# ---------------------------------------------------------------------------

def test_covariance_identity_boost():
    c0, cb = st.covariance_check(U_REST, np.eye(2), TAU, IR_PROFILE, DIST, SPEC, QREN)
    assert c0 == cb


def test_covariance_invariance_and_sensitivity():
    boost = sa.sl2c_boost([0, 0, 1.0], 0.5)
    c0, cb = st.covariance_check(U_REST, boost, TAU, IR_PROFILE, DIST, SPEC, QREN)
    assert abs(c0 - cb) < 1e-5 * c0
    _, c_cur = st.covariance_check(U_REST, boost, TAU, IR_PROFILE, DIST, SPEC,
                                   QREN, boost_vacuum=False)
    assert abs(c0 - c_cur) > 1e-4 * c0


def test_generating_function_weight_relation():
    # the Z0-weighted mean exponent equals Z times the chi-weighted one
    expo_chi = -math.log(st.uniform_vacuum_probability(
        U_REST, TAU, IR_PROFILE, DIST, SPEC, QREN))
    mu = st.mean_mode_exponent(TRAJ, TAU, IR_PROFILE, DIST, SPEC, QREN)
    assert abs(mu - IR_PROFILE.norm * expo_chi) < 1e-9 * mu
