import math

import numpy as np
import pytest

from milneqed import fields as fl
from milneqed import numerics as nm
from milneqed.errors import NegativeTau, NonPositiveR

PI = math.pi


def step_params(k1, k2):
    return fl.StaticChargeParams.with_unit_qren(nm.CutoffProfile.step(k1, k2))


# ---------------------------------------------------------------------------
# irreducible baseline
# ---------------------------------------------------------------------------

def test_irreducible_vanishes_on_boundary():
    assert fl.potential_irreducible(0.0, 3.7, 2.0) == 0.0


def test_irreducible_coulomb():
    assert abs(fl.potential_irreducible(1.0, 1.0, 4.0 * PI) - 1.0) < 1e-15


def test_irreducible_rejects_negative_tau():
    with pytest.raises(NegativeTau):
        fl.potential_irreducible(-0.1, 1.0, 1.0)


# ---------------------------------------------------------------------------
# regularized potential
# ---------------------------------------------------------------------------

def test_potential_vanishes_at_tau_zero():
    p = step_params(0.0, 1e4)
    rng = np.random.default_rng(0)
    for r in rng.uniform(1e-4, 1e2, size=100):
        assert abs(fl.potential_A0(0.0, r, p)) < 1e-10


def test_potential_origin_limit():
    p = step_params(0.0, 1e4)
    k2 = 1e4
    for tk in (0.1, 1.0, 10.0):
        tau = tk / k2
        a = fl.potential_A0(tau, 1e-5 / k2, p)
        a0 = fl.potential_A0_origin(tau, p)
        assert abs(a - a0) < 1e-8 * p.q_ren * k2


def test_potential_origin_closed_form():
    p = step_params(2.0, 9.0)
    tau = 0.7
    expected = p.q_ren / (2.0 * PI ** 2) * (
        9.0 - 2.0 + math.sin(2.0 * tau) / tau - math.sin(9.0 * tau) / tau)
    assert abs(fl.potential_A0_origin(tau, p) - expected) < 1e-14


def test_potential_continuity_in_tau():
    p = step_params(0.0, 50.0)
    for tau, r in ((0.02, 0.5), (0.4, 0.05), (1.3, 2.0)):
        base = fl.potential_A0(tau, r, p)
        deltas = np.array([1e-4, 5e-5, 2.5e-5])
        diffs = np.array([abs(fl.potential_A0(tau + d, r, p) - base) for d in deltas])
        # linear shrinkage with the step
        assert diffs[2] < 0.6 * diffs[0] + 1e-12


def test_potential_approaches_asymptotic():
    p = step_params(0.0, 1e4)
    r = 1.0
    a_inf = fl.potential_asymptotic(r, p)
    a = fl.potential_A0(1e6 / 1e4, r, p)
    assert abs(a - a_inf) < 1e-4 * abs(a_inf)
    a = fl.potential_A0(1e7 / 1e4, r, p)
    assert abs(a - a_inf) < 1e-3 * abs(a_inf)


def test_asymptotic_coulomb_band():
    p = step_params(0.0, 1e4)
    rs = np.logspace(math.log10(1e3 / 1e4), 2.0, 500)
    ratio = fl.potential_asymptotic(rs, p) * 4.0 * PI * rs / p.q_ren
    assert ratio.min() > 0.99 and ratio.max() < 1.01


def test_asymptotic_envelope():
    # |r A - q/4pi| < q/(2 pi^2 k2 r) for k2 r > 10 when k1 = 0
    p = step_params(0.0, 200.0)
    rs = np.logspace(math.log10(10.0 / 200.0), 1.0, 300)
    dev = np.abs(rs * fl.potential_asymptotic(rs, p) - p.q_ren / (4.0 * PI))
    env = p.q_ren / (2.0 * PI ** 2 * 200.0 * rs)
    assert np.all(dev <= env * (1.0 + 1e-9))


def test_asymptotic_infrared_cut_decays_faster_than_coulomb():
    p = step_params(150.0, 1e4)
    r = 1e5 / 150.0
    assert abs(r * fl.potential_asymptotic(r, p)) < 0.01 * p.q_ren / (4.0 * PI)


def test_asymptotic_vanishes_for_narrow_band():
    p = step_params(100.0, 100.0 * (1.0 + 1e-9))
    assert abs(fl.potential_asymptotic(1.0, p)) < 1e-9
    assert abs(fl.rho_eff(1e-2, p)) < 1e-3 * abs(fl.rho_eff(1e-2, step_params(100.0, 101.0)))


def test_potential_rejects_negative_tau():
    with pytest.raises(NegativeTau):
        fl.potential_A0(-0.5, 1.0, step_params(0.0, 10.0))


def test_asymptotic_rejects_nonpositive_r():
    with pytest.raises(NonPositiveR):
        fl.potential_asymptotic(0.0, step_params(0.0, 10.0))


# ---------------------------------------------------------------------------
# effective charge density
# ---------------------------------------------------------------------------

def test_rho_origin_limit():
    p = step_params(150.0, 1e3)
    expected = p.q_ren * (1e3 ** 3 - 150.0 ** 3) / (6.0 * PI ** 2)
    assert abs(fl.rho_eff(1e-12, p) - expected) < 1e-10 * expected


def test_density_shape_series_matches_trig_branch():
    # series branch (x < 0.5) against the direct formula, evaluated where
    # the direct formula still carries full precision
    xs = np.array([0.2, 0.35, 0.4999])
    series = fl._density_shape(xs)
    direct = (np.sin(xs) - xs * np.cos(xs)) / xs ** 3
    np.testing.assert_allclose(series, direct, rtol=1e-13)


def test_rho_matches_laplacian_of_potential():
    p = step_params(150.0, 1e3)
    k2 = 1e3

    def r_times_a(rr):
        return rr * fl.potential_asymptotic(rr, p)

    for x in (0.1, 1.0, 10.0):
        r = x / k2
        scale = max(r, 1.0 / k2)
        ests = []
        for h in (1e-3 * scale, 5e-4 * scale, 2.5e-4 * scale):
            ests.append((r_times_a(r + h) - 2.0 * r_times_a(r) + r_times_a(r - h)) / h ** 2)
        d1 = (4.0 * ests[1] - ests[0]) / 3.0
        d2 = (4.0 * ests[2] - ests[1]) / 3.0
        lap = -(16.0 * d2 - d1) / 15.0 / r
        rho = fl.rho_eff(r, p)
        assert abs(rho - lap) < 1e-6 * abs(rho)


def test_rho_parts_sign_convention():
    p = step_params(150.0, 1e3)
    upper, lower = fl.rho_eff_parts(np.array([1e-3, 5e-3]), p)
    np.testing.assert_allclose(upper - lower, fl.rho_eff(np.array([1e-3, 5e-3]), p))


def test_rho_parts_dominated_by_upper_edge():
    # on the density scale the infrared piece is invisible: its sup norm
    # stays below 1% of the k2 piece over the plotted window
    p = step_params(150.0, 1e3)
    rs = np.linspace(1e-6, 50.0 / 1e3, 400)
    upper, lower = fl.rho_eff_parts(rs, p)
    assert np.max(np.abs(lower)) < 0.01 * np.max(np.abs(upper))


def test_rho_integrates_to_oscillating_charge():
    p = step_params(150.0, 1e3)
    R = 20.0 / 1e3
    val, _ = nm.integrate_panels(
        lambda r: 4.0 * PI * r ** 2 * fl.rho_eff(r, p),
        [1e-9, R], nm.QuadratureSpec(), phase_scale=1e3)
    closed = fl.total_charge(p, R).q_enclosed
    assert abs(val - closed) < 1e-8 * max(1.0, abs(closed))


# ---------------------------------------------------------------------------
# general profiles and the enclosed charge
# ---------------------------------------------------------------------------

def test_general_potential_reduces_to_step():
    p = step_params(150.0, 1e3)
    for r in (1e-3, 1e-2, 0.1):
        assert abs(fl.potential_general(r, p) - fl.potential_asymptotic(r, p)) \
            < 1e-12 * abs(fl.potential_asymptotic(r, p))


def test_rho_general_analytic_vs_fd():
    ps = fl.StaticChargeParams.with_unit_qren(nm.CutoffProfile.smoothed(150.0, 1e3, 50.0))
    for r in (2e-3, 1e-2):
        a = fl.rho_general(r, ps)
        b = fl.rho_general(r, ps, method="fd")
        assert abs(a - b) < 2e-6 * abs(a)


def test_smoothed_density_tracks_sharp_step():
    sharp = step_params(150.0, 1e3)
    smooth = fl.StaticChargeParams.with_unit_qren(
        nm.CutoffProfile.smoothed(150.0, 1e3, 10.0))
    for r in (1e-3, 3e-3):
        a, b = fl.rho_eff(r, sharp), fl.rho_general(r, smooth)
        assert abs(a - b) < 0.05 * abs(a)


def test_total_charge_dichotomy():
    spec = nm.QuadratureSpec()
    vanishing = fl.StaticChargeParams.with_unit_qren(
        nm.CutoffProfile.smoothed(150.0, 1e3, 50.0))
    res0 = fl.total_charge(vanishing, 1e5 / 1e3, spec)
    assert res0.converged and res0.verdict == "Q=0"
    assert abs(res0.q_enclosed) < 1e-3 * vanishing.q_ren

    plateau = fl.StaticChargeParams.with_unit_qren(
        nm.CutoffProfile.smoothed(0.0, 1e3, 50.0))
    res1 = fl.total_charge(plateau, 1e5 / 1e3, spec)
    assert res1.converged and res1.verdict == "Q=q_ren"
    assert abs(res1.q_enclosed - plateau.q_ren) < 1e-3 * plateau.q_ren


def test_total_charge_sharp_step_oscillates():
    p = step_params(150.0, 1e3)
    R = 100.0
    res = fl.total_charge(p, R)
    assert not res.converged and res.verdict == "oscillating"
    closed = (2.0 * p.q_ren / PI) * (
        math.sin(150.0 * R) - math.sin(1e3 * R)
        + nm.sine_integral(1e3 * R) - nm.sine_integral(150.0 * R))
    assert abs(res.q_enclosed - closed) < 1e-10


def test_total_charge_swap_matches_direct_radial_integral():
    ps = fl.StaticChargeParams.with_unit_qren(
        nm.CutoffProfile.smoothed(150.0, 1e3, 50.0))
    R = 30.0 / 1e3
    direct, _ = nm.integrate_panels(
        lambda r: 4.0 * PI * r ** 2
        * np.array([fl.rho_general(float(rr), ps) for rr in r]),
        [1e-8, R], nm.QuadratureSpec(rel_tol=1e-10), phase_scale=1.2e3)
    assert abs(direct - fl.total_charge(ps, R).q_enclosed) < 1e-6


# ---------------------------------------------------------------------------
# coherent free-field averages
# ---------------------------------------------------------------------------

SPEC = nm.QuadratureSpec(rel_tol=1e-8, abs_tol=1e-11, angular_order=24)


def smooth_amps():
    return fl.CoherentAmplitudes(
        alpha_plus=lambda k4: np.exp(-k4[:, 0] ** 2 / 8.0)
        * (1.0 + 0.3 * k4[:, 3] / np.maximum(k4[:, 0], 1e-300)),
        alpha_minus=lambda k4: 0.5 * np.exp(-k4[:, 0] ** 2 / 10.0))


def test_zero_amplitudes_give_zero_field():
    p = step_params(1.0, 5.0)
    zero = fl.CoherentAmplitudes(lambda k4: np.zeros(len(k4)),
                                 lambda k4: np.zeros(len(k4)))
    x = np.array([0.3, 0.1, -0.2, 0.4])
    np.testing.assert_array_equal(
        fl.free_potential_average(zero, p, nm.RDistribution.point_mass(), x, SPEC),
        np.zeros(4))
    F = fl.field_tensor(zero, p, nm.RDistribution.point_mass(), x, SPEC)
    np.testing.assert_array_equal(F, np.zeros((4, 4)))


def test_amplitude_norm_finite():
    p = step_params(1.0, 5.0)
    val = fl.amplitude_norm(smooth_amps(), p, SPEC)
    assert 0.0 < val < math.inf


def test_lorenz_residual_within_bound():
    p = step_params(1.0, 5.0)
    dist = nm.RDistribution.point_mass()
    amps = smooth_amps()
    rng = np.random.default_rng(11)
    for _ in range(3):
        x = rng.uniform(-0.5, 0.5, size=4)
        res, bound = fl.lorenz_residual(amps, p, dist, x, SPEC)
        assert res < 10.0 * bound


def test_field_tensor_antisymmetric():
    p = step_params(1.0, 5.0)
    x = np.array([0.4, 0.2, -0.1, 0.3])
    F = fl.field_tensor(smooth_amps(), p, nm.RDistribution.point_mass(), x, SPEC)
    np.testing.assert_array_equal(F, -F.T)
    assert np.max(np.abs(F)) > 1e-3
