"""Regularized electrodynamics of classical pointlike sources on the Milne
universe: spin-frame algebra, cutoff profiles, potentials and photon
statistics."""

from .errors import (
    ConfigError,
    DegenerateNu,
    DivergentIntegral,
    EmptySupport,
    FrameUndefined,
    MilneQEDError,
    MomentOverflow,
    NegativeTau,
    NonFinite,
    NonPositiveR,
    NonTimelikeR,
    NotFuturePointing,
    NotNull,
    ToleranceNotMet,
    ZeroAxis,
)
from .fields import (
    ChargeResult,
    CoherentAmplitudes,
    StaticChargeParams,
    amplitude_norm,
    field_tensor,
    free_potential_average,
    lorenz_residual,
    potential_A0,
    potential_A0_origin,
    potential_asymptotic,
    potential_general,
    potential_irreducible,
    rho_eff,
    rho_eff_parts,
    rho_general,
    total_charge,
)
from .numerics import (
    CutoffProfile,
    QuadratureSpec,
    RDistribution,
    lightcone_integral,
    q_renormalized,
    r_average,
    sine_integral,
)
from .spin_algebra import (
    ComFrameField,
    MinkowskiTetrad,
    NullTetrad,
    SpinFrame,
    Spinor,
    StandardFrameField,
    WignerData,
    ccr_form_preserved,
    com_spin_frame,
    l_matrix_com,
    l_matrix_standard,
    minkowski_dot,
    pi_from_k,
    sl2c_boost,
    sl2c_element,
    sl2c_rotation,
    so13_from_sl2c,
    standard_spin_frame,
    tetrads_from_frame,
    triangular_transform,
    v_matrix,
    wigner_data,
)
from .statistics import (
    GeneratingSample,
    MeanPhotons,
    PhotonDistribution,
    Trajectory,
    brems_generating,
    covariance_check,
    four_velocity,
    generating_function,
    mean_mode_exponent,
    mean_photons,
    mode_exponent,
    photon_probabilities,
    poisson_probabilities,
    probabilities_from_moments,
    transverse_tensor,
    tv_distance,
    uniform_spectrum,
    uniform_vacuum_probability,
)

__version__ = "0.1.0"
