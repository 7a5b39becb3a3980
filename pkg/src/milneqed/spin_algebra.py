"""Spinor, null-tetrad and SL(2,C)/SO(1,3) algebra for massless momenta.

Conventions
-----------
Metric signature (+,-,-,-).  Four-vectors are stored as length-4 numpy
arrays of contravariant components ``(v0, v1, v2, v3)``.  A two-spinor is
stored through its upper components ``(xi^0, xi^1)``; indices are lowered
with the antisymmetric symbol ``eps = [[0, 1], [-1, 0]]`` via
``xi_A = xi^B eps_BA``, so the invariant pairing of two spinors reads

    <a, b> = a_A b^A = a^0 b^1 - a^1 b^0.

A four-vector maps to the Hermitian matrix

    v^{AA'} = (1/sqrt 2) [[v0 + v3, v1 + i v2], [v1 - i v2, v0 - v3]],

which is an isometry: v^{AA'} w_{AA'} = v.w.  An SL(2,C) matrix ``M`` acts
on upper spinor components, and on four-vectors through V -> M V M†; the
induced SO(1,3) matrix is returned by :func:`so13_from_sl2c`.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import (
    DegenerateNu,
    FrameUndefined,
    NonTimelikeR,
    NotFuturePointing,
    NotNull,
    ZeroAxis,
)

METRIC = np.diag([1.0, -1.0, -1.0, -1.0])
SQRT2 = math.sqrt(2.0)


# ---------------------------------------------------------------------------
# four-vector and spinor helpers
# ---------------------------------------------------------------------------

def minkowski_dot(u, v):
    """u.v with signature (+,-,-,-); works on stacked arrays (..., 4)."""
    u = np.asarray(u)
    v = np.asarray(v)
    return (u[..., 0] * v[..., 0] - u[..., 1] * v[..., 1]
            - u[..., 2] * v[..., 2] - u[..., 3] * v[..., 3])


def vector_to_spinor_matrix(v):
    """Hermitian 2x2 matrix v^{AA'} of a four-vector."""
    v = np.asarray(v)
    return np.array(
        [[v[0] + v[3], v[1] + 1j * v[2]],
         [v[1] - 1j * v[2], v[0] - v[3]]],
        dtype=complex) / SQRT2


def spinor_matrix_to_vector(m):
    """Inverse of :func:`vector_to_spinor_matrix`; complex components in general."""
    return np.array(
        [m[0, 0] + m[1, 1],
         m[0, 1] + m[1, 0],
         1j * (m[1, 0] - m[0, 1]),
         m[0, 0] - m[1, 1]]) / SQRT2


def lower_spinor(xi):
    """Lower components (xi_0, xi_1) = (-xi^1, xi^0)."""
    xi = np.asarray(xi, dtype=complex)
    return np.array([-xi[1], xi[0]])


def spinor_bracket(a, b):
    """Invariant pairing a_A b^A for spinors given in upper components."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return a[0] * b[1] - a[1] * b[0]


@dataclass(frozen=True)
class Spinor:
    """Two-component spinor stored through its upper components."""

    xi0: complex
    xi1: complex

    @property
    def components(self):
        return np.array([self.xi0, self.xi1], dtype=complex)

    def flagpole(self):
        """Null four-vector pi^A pibar^{A'} of the spinor."""
        c = self.components
        return spinor_matrix_to_vector(np.outer(c, c.conj())).real


@dataclass(frozen=True)
class SpinFrame:
    """Spin-frame (pi, omega) with omega_A pi^A = 1.

    ``nu`` is the seed used to fix the pi phase and ``R`` the optional unit
    timelike frame label; both are kept for bookkeeping only.
    """

    pi: Spinor
    omega: Spinor
    nu: Spinor | None = None
    R: np.ndarray | None = None

    def normalization(self):
        return spinor_bracket(self.omega.components, self.pi.components)


@dataclass(frozen=True)
class NullTetrad:
    """Null tetrad (omega^a, m^a, mbar^a, k^a) of a spin-frame."""

    omega_a: np.ndarray
    m_a: np.ndarray
    mbar_a: np.ndarray
    k_a: np.ndarray


@dataclass(frozen=True)
class MinkowskiTetrad:
    """Orthonormal tetrad (t, x, y, z), contravariant components."""

    t_a: np.ndarray
    x_a: np.ndarray
    y_a: np.ndarray
    z_a: np.ndarray

    def as_matrix(self):
        """Rows (t, x, y, z)."""
        return np.array([self.t_a, self.x_a, self.y_a, self.z_a])


@dataclass(frozen=True)
class WignerData:
    """Little-group data (Theta, |phi|, xi) of one transformation at one k."""

    theta: float
    phi_abs: float
    xi: float


# ---------------------------------------------------------------------------
# spin-frames
# ---------------------------------------------------------------------------

_NU_DEFAULT = np.array([1.0, 0.0], dtype=complex)   # lower components nu_A
_NU_FALLBACK = np.array([0.0, 1.0], dtype=complex)


def _validate_null_future(k, tol):
    k = np.asarray(k, dtype=float)
    if k.shape != (4,) or not np.all(np.isfinite(k)):
        raise NotNull("k must be a finite four-vector")
    if k[0] <= 0.0:
        raise NotFuturePointing(f"k0 = {k[0]} is not positive")
    if abs(minkowski_dot(k, k)) > tol * k[0] ** 2:
        raise NotNull(f"k.k = {minkowski_dot(k, k)} is not null")
    return k


def _pi_components(k, nu_lower):
    """Flagpole spinor built from a k-independent lower-component seed nu."""
    kmat = vector_to_spinor_matrix(k)
    # k^{BB'} nu_B nubar_{B'}
    denom = np.real(nu_lower @ kmat @ nu_lower.conj())
    if denom <= 0.0:
        return None
    return (kmat @ nu_lower.conj()) / math.sqrt(denom)


def pi_from_k(k, tol=1e-9):
    """Flagpole spinor of a null future-pointing wave vector.

    The phase is fixed by seeding with nu_A = (1, 0), which yields
    pi = (sqrt(a), c/sqrt(a)) in terms of the entries [[a, cbar], [c, b]]
    of k^{AA'}; when k points (numerically) along -z the seed degenerates
    and nu_A = (0, 1) is used instead.
    """
    k = _validate_null_future(k, tol)
    pi = _pi_components(k, _NU_DEFAULT)
    if pi is None or np.real(_nu_weight(k, _NU_DEFAULT)) < 1e-12 * k[0]:
        pi = _pi_components(k, _NU_FALLBACK)
    return Spinor(pi[0], pi[1])


def _nu_weight(k, nu_lower):
    kmat = vector_to_spinor_matrix(k)
    return np.real(nu_lower @ kmat @ nu_lower.conj())


def com_spin_frame(R, k, nu=None, tol=1e-9):
    """Spin-frame labelled by a unit timelike R.

    pi is the flagpole spinor of k (phase fixed by nu); omega follows from
    omega^A = -R^{AA'} pibar_{A'} / (R.k), which forces omega_A pi^A = 1 and
    is invariant under rescaling of R.
    """
    k = _validate_null_future(k, tol)
    R = np.asarray(R, dtype=float)
    rr = minkowski_dot(R, R)
    if rr <= 0.0 or R[0] <= 0.0:
        raise NonTimelikeR(f"R.R = {rr}, R0 = {R[0]}")
    R = R / math.sqrt(rr)

    if nu is None:
        nu_lower = _NU_DEFAULT
        if _nu_weight(k, nu_lower) < 1e-12 * k[0]:
            nu_lower = _NU_FALLBACK
    else:
        nu_lower = nu.components if isinstance(nu, Spinor) else np.asarray(nu, dtype=complex)
        if _nu_weight(k, nu_lower) <= tol * k[0] * np.vdot(nu_lower, nu_lower).real:
            raise DegenerateNu("flagpole of nu is parallel to k")

    pi = _pi_components(k, nu_lower)
    rk = minkowski_dot(R, k)
    omega = -(vector_to_spinor_matrix(R) @ lower_spinor(pi.conj())) / rk
    return SpinFrame(
        pi=Spinor(pi[0], pi[1]),
        omega=Spinor(omega[0], omega[1]),
        nu=Spinor(nu_lower[0], nu_lower[1]),
        R=R,
    )


R_REST = np.array([1.0, 0.0, 0.0, 0.0])


def standard_spin_frame(k, tol=1e-9):
    """k-only spin-frame: canonical completion of pi_from_k.

    Identical to the R = (1,0,0,0) frame, but used as a function of k alone
    (the label does not participate in Lorentz transformations).
    """
    f = com_spin_frame(R_REST, k, tol=tol)
    return SpinFrame(pi=f.pi, omega=f.omega, nu=f.nu, R=None)


def omega_vector(R, k):
    """Null-tetrad leg omega^a of the R-labelled frame, in closed form.

    omega^a = (2 (k.R) R^a - k^a) / (2 (k.R)^2) for unit timelike R; this is
    the flagpole of the omega spinor of :func:`com_spin_frame` and is what
    the transverse projector is built from.
    """
    kr = minkowski_dot(k, R)
    return (2.0 * kr * np.asarray(R, dtype=float) - np.asarray(k, dtype=float)) / (2.0 * kr * kr)


def tetrads_from_frame(frame):
    """Null and Minkowski tetrads of a spin-frame (Eqs. of the appendix).

    t = (omega + k)/sqrt2, x = (m + mbar)/sqrt2, y = i(m - mbar)/sqrt2,
    z = (omega - k)/sqrt2 with m^a the flagpole mix omega^A pibar^{A'}.
    """
    p = frame.pi.components
    o = frame.omega.components
    k = spinor_matrix_to_vector(np.outer(p, p.conj())).real
    w = spinor_matrix_to_vector(np.outer(o, o.conj())).real
    m = spinor_matrix_to_vector(np.outer(o, p.conj()))
    null = NullTetrad(omega_a=w, m_a=m, mbar_a=m.conj(), k_a=k)
    mink = MinkowskiTetrad(
        t_a=(w + k) / SQRT2,
        x_a=((m + m.conj()) / SQRT2).real,
        y_a=(1j * (m - m.conj()) / SQRT2).real,
        z_a=(w - k) / SQRT2,
    )
    return null, mink


# ---------------------------------------------------------------------------
# SL(2,C) and the covering map
# ---------------------------------------------------------------------------

# Pauli matrices conjugated to match the spinor-matrix convention above.
_SIGMA = np.array([
    [[0.0, 1.0], [1.0, 0.0]],            # sigma_x
    [[0.0, -1j], [1j, 0.0]],             # sigma_y
    [[1.0, 0.0], [0.0, -1.0]],           # sigma_z
], dtype=complex)
_SIGMA_C = _SIGMA.conj()


def _unit_axis(axis):
    axis = np.asarray(axis, dtype=float)
    n = np.linalg.norm(axis)
    if n == 0.0 or not np.isfinite(n):
        raise ZeroAxis("axis must be a nonzero 3-vector")
    return axis / n


def sl2c_boost(axis, rapidity):
    """SL(2,C) element of a pure boost with the given rapidity."""
    n = _unit_axis(axis)
    ns = np.tensordot(n, _SIGMA_C, axes=1)
    return math.cosh(rapidity / 2.0) * np.eye(2) + math.sinh(rapidity / 2.0) * ns


def sl2c_rotation(axis, angle):
    """SL(2,C) element of a right-handed rotation by ``angle`` about ``axis``."""
    n = _unit_axis(axis)
    ns = np.tensordot(n, _SIGMA_C, axes=1)
    return math.cos(angle / 2.0) * np.eye(2) + 1j * math.sin(angle / 2.0) * ns


def sl2c_element(kind, axis, parameter):
    """Dispatch on kind: 'boost' (rapidity) or 'rotation' (angle)."""
    if kind == "boost":
        return sl2c_boost(axis, parameter)
    if kind == "rotation":
        return sl2c_rotation(axis, parameter)
    raise ValueError(f"unknown kind {kind!r}")


_BASIS = np.eye(4)


def so13_from_sl2c(m):
    """SO(1,3) matrix induced by V -> M V M†; a 2:1 group homomorphism."""
    m = np.asarray(m, dtype=complex)
    cols = []
    for b in range(4):
        v = vector_to_spinor_matrix(_BASIS[b])
        cols.append(spinor_matrix_to_vector(m @ v @ m.conj().T).real)
    return np.column_stack(cols)


def so13_inverse(L):
    """Inverse of an SO(1,3) matrix via g L^T g."""
    return METRIC @ np.asarray(L).T @ METRIC


def ccr_form_preserved(L, tol=1e-12):
    """True iff L g L^T = g, i.e. the mixing b = L.(a0†, a1, a2, a3) keeps
    the oscillator commutator normalization intact."""
    L = np.asarray(L, dtype=float)
    return bool(np.max(np.abs(L @ METRIC @ L.T - METRIC)) < tol)


# ---------------------------------------------------------------------------
# frame fields and little-group data
# ---------------------------------------------------------------------------

class StandardFrameField:
    """k-only spin-frame field (the gauge-type mixing phi is nonzero)."""

    def frame(self, k):
        return standard_spin_frame(k)

    def pulled_back(self, so13_inv):
        return self


class ComFrameField:
    """R-labelled frame field; the label transforms along with k."""

    def __init__(self, R0=R_REST, nu=None):
        self.R0 = np.asarray(R0, dtype=float)
        self.nu = nu

    def frame(self, k):
        return com_spin_frame(self.R0, k, nu=self.nu)

    def pulled_back(self, so13_inv):
        return ComFrameField(np.asarray(so13_inv) @ self.R0, nu=self.nu)


def wigner_data(m, frame_field, k, check_tol=1e-8):
    """Extract (Theta, |phi|, xi) of one SL(2,C) element at one momentum.

    e^{i Theta} = pi^A(k) [Lambda omega]_A and
    phi = e^{-i Theta} omega_A(k) [Lambda omega]^A, where
    [Lambda omega](k) = M omega'(Lambda^{-1} k) and omega' is the field
    pulled back by Lambda (for R-labelled fields the label moves too).
    The defining property M pi'(Lambda^{-1}k) = e^{-i Theta} pi(k) is
    verified and a violation raises FrameUndefined.
    """
    m = np.asarray(m, dtype=complex)
    L = so13_from_sl2c(m)
    k_back = so13_inverse(L) @ np.asarray(k, dtype=float)
    try:
        here = frame_field.frame(k)
        back = frame_field.pulled_back(so13_inverse(L)).frame(k_back)
    except (NotNull, NotFuturePointing, DegenerateNu, NonTimelikeR) as exc:
        raise FrameUndefined(str(exc)) from exc

    lam_omega = m @ back.omega.components
    lam_pi = m @ back.pi.components
    phase = spinor_bracket(lam_omega, here.pi.components)
    theta = cmath.phase(phase)
    if abs(abs(phase) - 1.0) > check_tol:
        raise FrameUndefined(f"|pi^A Lambda omega_A| = {abs(phase)} != 1")
    resid = np.max(np.abs(lam_pi - np.exp(-1j * theta) * here.pi.components))
    if resid > 1e-6 * max(1.0, np.max(np.abs(here.pi.components))):
        raise FrameUndefined(f"pi does not transform by a phase (residual {resid})")
    phi = np.exp(-1j * theta) * spinor_bracket(here.omega.components, lam_omega)
    return WignerData(theta=theta, phi_abs=abs(phi), xi=cmath.phase(phi))


# ---------------------------------------------------------------------------
# momentum-space transformation matrices
# ---------------------------------------------------------------------------

def l_matrix_standard(w):
    """4x4 tetrad-index transformation matrix in terms of (Theta, |phi|, xi)."""
    th, p, xi = w.theta, w.phi_abs, w.xi
    c2, s2 = math.cos(2 * th), math.sin(2 * th)
    cx, sx = math.cos(xi), math.sin(xi)
    cx2, sx2 = math.cos(xi + 2 * th), math.sin(xi + 2 * th)
    return np.array([
        [1 + p * p / 2, -p * cx2, p * sx2, -p * p / 2],
        [-p * cx, c2, -s2, p * cx],
        [p * sx, s2, c2, -p * sx],
        [p * p / 2, -p * cx2, p * sx2, 1 - p * p / 2],
    ])


def l_matrix_com(theta):
    """R-labelled case: identity on (t, z), rotation by 2 Theta on (x, y)."""
    c, s = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, c, -s, 0.0],
        [0.0, s, c, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ])


def triangular_transform(w):
    """Upper-triangular matrix acting on (b+, a+, a-, b-).

    For phi = 0 it reduces to diag(1, e^{2i Theta}, e^{-2i Theta}, 1): the
    transverse circular operators then carry irreducible zero-mass phases.
    """
    th, p, xi = w.theta, w.phi_abs, w.xi
    phi = p * np.exp(1j * xi)
    e2 = np.exp(2j * th)
    return np.array([
        [1.0, -phi * e2, -phi.conjugate() / e2, -p * p],
        [0.0, e2, 0.0, phi.conjugate()],
        [0.0, 0.0, 1.0 / e2, phi],
        [0.0, 0.0, 0.0, 1.0],
    ])


# Real adjoint generators of the E(2)-type operators (L1, L2, L3) acting on
# the column (a0†, a1, a2, a3); entry conventions follow from the oscillator
# commutators [L_i, A_j] = (M_i)_{jk} A_k, with G_i = i M_i real.
_G1 = np.array([
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])
_G2 = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
])
_G3 = np.array([
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0],
])


def v_matrix(theta, phi_abs, xi):
    """Exponential of the generator combination reproducing l_matrix_standard.

    The coefficients are alpha1 = (Theta/sin Theta) |phi| sin(xi + Theta),
    alpha2 = (Theta/sin Theta) |phi| cos(xi + Theta), alpha3 = 2 Theta; the
    Theta/sin Theta factor tends to 1 at Theta = 0.
    """
    if abs(theta) < 1e-8:
        scale = 1.0 + theta * theta / 6.0
    else:
        scale = theta / math.sin(theta)
    a1 = scale * phi_abs * math.sin(xi + theta)
    a2 = scale * phi_abs * math.cos(xi + theta)
    a3 = 2.0 * theta
    return expm(a1 * _G1 + a2 * _G2 + a3 * _G3)
