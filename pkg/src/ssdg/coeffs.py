"""Coefficient algebra for the homogeneous logarithmic-derivative nonlinearity.

Everything here is plain arithmetic on user supplied reals. The functions
accept ``float`` as well as ``fractions.Fraction`` inputs; with Fractions the
lambda/c conversions are exact.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, fields
from numbers import Real
from typing import Optional

from .errors import DegenerateExponent, NotSimplFamily

__all__ = [
    "NonlinearCoeffs",
    "CCoeffs",
    "DerivedParams",
    "SolitonParams",
    "GaugeInvariants",
    "FlsBranch",
    "Regime",
    "lambda_to_c",
    "c_to_lambda",
    "derive_params",
    "check_galilean",
    "fls_admissible",
    "exponents",
    "dispersion_omega",
    "drift_kappa",
    "classify_regime",
    "soliton_params",
    "is_simpl_family",
    "ngt_invariants_simpl",
    "ngt_invariants",
]


def _check_finite(obj):
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not math.isfinite(v):
            raise ValueError(f"{type(obj).__name__}.{f.name} must be finite, got {v!r}")


@dataclass(frozen=True)
class NonlinearCoeffs:
    """One equation instance, stored in lambda form.

    ``D`` weighs the imaginary (density-Laplacian) part of the nonlinearity and
    ``Dtilde`` multiplies the real part.
    """

    lambda1: Real = 0.0
    lambda2: Real = 0.0
    lambda3: Real = 0.0
    lambda4: Real = 0.0
    lambda5: Real = 0.0
    D: Real = 0.0
    Dtilde: Real = 1.0

    def __post_init__(self):
        _check_finite(self)
        if self.D < 0:
            raise ValueError(f"D must be >= 0, got {self.D!r}")

    @property
    def lambdas(self) -> tuple:
        return (self.lambda1, self.lambda2, self.lambda3, self.lambda4, self.lambda5)

    @classmethod
    def from_lambdas(cls, lambdas, D=0.0, Dtilde=1.0) -> "NonlinearCoeffs":
        l1, l2, l3, l4, l5 = lambdas
        return cls(l1, l2, l3, l4, l5, D=D, Dtilde=Dtilde)

    @classmethod
    def from_c(cls, c: "CCoeffs", D=0.0, Dtilde=1.0) -> "NonlinearCoeffs":
        return c_to_lambda(c, D=D, Dtilde=Dtilde)

    @classmethod
    def simpl(cls, xi) -> "NonlinearCoeffs":
        """The one-parameter functional (xi/8) (rho'/rho)^2 with Dtilde = 1."""
        return cls(0.0, 0.0, xi / 4, 0.0, xi / 4, D=0.0, Dtilde=1.0)

    @classmethod
    def linear(cls) -> "NonlinearCoeffs":
        return cls(D=0.0, Dtilde=0.0)

    def to_c(self) -> "CCoeffs":
        return lambda_to_c(self)


@dataclass(frozen=True)
class CCoeffs:
    """Weights of the density/current functionals R1..R5."""

    c1: Real = 0.0
    c2: Real = 0.0
    c3: Real = 0.0
    c4: Real = 0.0
    c5: Real = 0.0

    def __post_init__(self):
        _check_finite(self)

    @property
    def values(self) -> tuple:
        return (self.c1, self.c2, self.c3, self.c4, self.c5)


@dataclass(frozen=True)
class DerivedParams:
    sigma: Real
    xi: Real
    eta: Real
    mu: Real
    nu: Real


@dataclass(frozen=True)
class SolitonParams:
    """Shape-invariant solution parameters; v == k always."""

    k: float
    omega: float
    gamma_sq: float
    kappa: float
    gamma_tilde: Optional[float]
    s: Optional[float]
    alpha: float
    delta: float

    @property
    def v(self) -> float:
        return self.k


@dataclass(frozen=True)
class GaugeInvariants:
    tau1: Real
    tau2: Real
    tau3: Real
    tau4: Real
    iota5: Real


class FlsBranch(enum.Enum):
    WEAK = "WeakBranch"
    STRONG = "StrongBranch"
    INADMISSIBLE = "Inadmissible"


class Regime(enum.Enum):
    EXPONENTIAL_SOLITON = "ExponentialSoliton"
    NON_NORMALIZABLE = "NonNormalizable"
    FINITE_LENGTH_SOLITON = "FiniteLengthSoliton"
    PLANE_WAVE_LIMIT = "PlaneWaveLimit"


def lambda_to_c(coeffs: NonlinearCoeffs) -> CCoeffs:
    l1, l2, l3, l4, l5 = coeffs.lambdas
    return CCoeffs(
        c1=l2,
        c2=l1 / 2,
        c3=l5 - l1 - l3,
        c4=l4,
        c5=(l5 + l3 - l1) / 4,
    )


def c_to_lambda(c: CCoeffs, D=0.0, Dtilde=1.0) -> NonlinearCoeffs:
    return NonlinearCoeffs(
        lambda1=2 * c.c2,
        lambda2=c.c1,
        lambda3=2 * c.c5 - c.c3 / 2,
        lambda4=c.c4,
        lambda5=2 * c.c2 + 2 * c.c5 + c.c3 / 2,
        D=D,
        Dtilde=Dtilde,
    )


def derive_params(coeffs: NonlinearCoeffs) -> DerivedParams:
    l1, l2, l3, l4, l5 = coeffs.lambdas
    two_dt = 2 * coeffs.Dtilde
    return DerivedParams(
        sigma=two_dt * l1,
        xi=two_dt * (l3 + l5),
        eta=two_dt * (l5 - l3 - l1),
        mu=two_dt * (l2 + l4),
        nu=two_dt * l2,
    )


def check_galilean(p: DerivedParams) -> bool:
    """Galilean invariance holds iff mu == 0 and eta == 0 (exact comparison)."""
    return p.mu == 0 and p.eta == 0


def fls_admissible(sigma, xi) -> FlsBranch:
    if 0 < xi < 1 - sigma:
        return FlsBranch.WEAK
    if 0 > xi > 1 - sigma:
        return FlsBranch.STRONG
    return FlsBranch.INADMISSIBLE


def exponents(sigma, xi) -> tuple:
    """Return ``(alpha, delta)`` of the substitution ``g = f**alpha``.

    Raises
    ------
    DegenerateExponent
        If ``1 - sigma - xi == 0``.
    """
    denom = 1 - sigma - xi
    if denom == 0:
        raise DegenerateExponent(f"1 - sigma - xi vanishes (sigma={sigma!r}, xi={xi!r})")
    return (1 - sigma) / denom, xi / denom


def dispersion_omega(k, gamma, p: DerivedParams) -> float:
    """Frequency of a shape-invariant packet with wavenumber k and width parameter gamma.

    For the exponentially confined branch (gamma^2 < 0) use :func:`soliton_params`.
    """
    return _omega_from_gamma_sq(k, gamma * gamma, p)


def _omega_from_gamma_sq(k, gamma_sq, p: DerivedParams):
    denom = 1 - p.sigma - p.xi
    if denom == 0:
        raise DegenerateExponent("1 - sigma - xi vanishes; frequency undefined")
    return k * k * (1 + p.eta) / 2 + gamma_sq * (1 - p.sigma) ** 2 / denom / 2


def drift_kappa(k, p: DerivedParams):
    """Drift rate of the linearized amplitude equation, mu*k/(1 - sigma).

    This is the value that makes f'' - 2*kappa*f' + gamma^2 f = 0 follow from
    the reduced amplitude equation; see the residual tests for kappa != 0.
    """
    if p.mu * k == 0:
        return 0 * p.mu
    if p.sigma == 1:
        raise DegenerateExponent("sigma == 1: the reduced amplitude equation loses its second-order term")
    return p.mu * k / (1 - p.sigma)


def classify_regime(gamma_sq, kappa) -> Regime:
    kappa_sq = kappa * kappa
    if gamma_sq < 0:
        return Regime.EXPONENTIAL_SOLITON
    if gamma_sq == 0 and kappa == 0:
        return Regime.PLANE_WAVE_LIMIT
    if gamma_sq > kappa_sq:
        return Regime.FINITE_LENGTH_SOLITON
    # 0 < gamma^2 < kappa^2 plus the undiscussed boundaries gamma^2 == kappa^2 != 0
    # and gamma^2 == 0 with kappa != 0
    return Regime.NON_NORMALIZABLE


def soliton_params(k, gamma_sq, p: DerivedParams) -> SolitonParams:
    """Assemble all shape-invariant parameters for wavenumber ``k`` and free parameter ``gamma_sq``."""
    alpha, delta = exponents(p.sigma, p.xi)
    kappa = drift_kappa(k, p)
    omega = _omega_from_gamma_sq(k, gamma_sq, p)
    diff = gamma_sq - kappa * kappa
    gamma_tilde = math.sqrt(diff) if diff >= 0 else None
    s = math.sqrt(-diff) if diff < 0 else None
    return SolitonParams(
        k=k, omega=omega, gamma_sq=gamma_sq, kappa=kappa,
        gamma_tilde=gamma_tilde, s=s, alpha=alpha, delta=delta,
    )


def is_simpl_family(coeffs: NonlinearCoeffs) -> bool:
    p = derive_params(coeffs)
    return (
        coeffs.D == 0
        and p.sigma == 0
        and p.nu == 0
        and p.mu == 0
        and p.eta == 0
        and 0 < p.xi < 1
    )


def ngt_invariants_simpl(xi) -> GaugeInvariants:
    """Gauge invariants of the one-parameter functional (xi/8) (rho'/rho)^2."""
    if not 0 < xi < 1:
        raise NotSimplFamily(f"xi must satisfy 0 < xi < 1, got {xi!r}")
    return GaugeInvariants(tau1=0, tau2=0.125, tau3=-1, tau4=0, iota5=-xi / 16)


def ngt_invariants(coeffs: NonlinearCoeffs) -> GaugeInvariants:
    if not is_simpl_family(coeffs):
        raise NotSimplFamily(
            "invariant values are only available for the nu = sigma = mu = eta = D = 0, 0 < xi < 1 family"
        )
    return ngt_invariants_simpl(derive_params(coeffs).xi)
