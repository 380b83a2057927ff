"""Simulator and validator for the homogeneous nonlinear Schrodinger equation

    i psi_t = -psi''/2 + (R{psi} + i I{psi}) psi

with finite-length and exponentially confined soliton solutions.
"""
from .coeffs import (
    CCoeffs,
    DerivedParams,
    FlsBranch,
    GaugeInvariants,
    NonlinearCoeffs,
    Regime,
    SolitonParams,
    c_to_lambda,
    check_galilean,
    classify_regime,
    derive_params,
    dispersion_omega,
    drift_kappa,
    exponents,
    fls_admissible,
    is_simpl_family,
    lambda_to_c,
    ngt_invariants,
    ngt_invariants_simpl,
    soliton_params,
)
from .errors import (
    ConfigError,
    DegenerateExponent,
    DisconnectedSupport,
    EmptySupport,
    InadmissibleParams,
    InvalidGrid,
    NotSimplFamily,
    OutsideSupport,
    SSDGError,
    TooFewSnapshots,
    UnstableStep,
)
from .fields import ComplexField, Grid1D, eval_functionals, eval_omega_psi, make_grid, observables
from .analytic import (
    build_cosh_soliton,
    build_fls,
    build_free_gaussian,
    build_plane_wave,
    radial_profile,
    sample,
)
from .gauge import GaugeTransform, apply_ngt
from .propagator import PropagatorConfig, TrajectoryRecord, run, stability_limit

__version__ = "0.1.0"
