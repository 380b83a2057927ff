"""Closed-form shape-invariant solutions and their time derivatives.

Every 1D solution has the form psi = A * g(x - k t - x0) exp(i (k x - omega t))
with a real envelope g; the time derivative is therefore
(-k g'/g - i omega) psi, evaluated in closed form.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy import integrate

from .coeffs import (
    DerivedParams,
    SolitonParams,
    check_galilean,
    drift_kappa,
    exponents,
    fls_admissible,
    FlsBranch,
    soliton_params,
)
from .errors import InadmissibleParams, OutsideSupport
from .fields import ComplexField, Grid1D
from .special import bessel_j, first_sign_change_root, spherical_bessel_j

__all__ = [
    "FlsSolution1D",
    "CoshSoliton",
    "PlaneWave",
    "FreeGaussian",
    "LinearMode",
    "RadialProfile",
    "AnalyticSolution",
    "build_fls",
    "build_cosh_soliton",
    "build_plane_wave",
    "build_free_gaussian",
    "build_linear_mode",
    "radial_profile",
    "evaluate",
    "time_derivative",
    "sample",
]


def _phase(k, omega, x, t):
    return np.exp(1j * (k * np.asarray(x, dtype=float) - omega * t))


def _scalar_or_array(out, x):
    return complex(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class FlsSolution1D:
    """Finite-length soliton, zero outside |x - x0 - k t| < pi / (2 gamma_tilde)."""

    params: SolitonParams
    x0: float = 0.0
    normalization: float = 1.0
    galilean: bool = True

    @property
    def k(self) -> float:
        return self.params.k

    @property
    def omega(self) -> float:
        return self.params.omega

    @property
    def delta(self) -> float:
        return self.params.delta

    @property
    def half_width(self) -> float:
        return math.pi / (2.0 * self.params.gamma_tilde)

    def support(self, t: float = 0.0) -> tuple:
        c = self.x0 + self.k * t
        return (c - self.half_width, c + self.half_width)

    def envelope(self, u):
        """Real envelope g(u) including the normalization constant."""
        p = self.params
        u = np.asarray(u, dtype=float)
        arg = p.gamma_tilde * u
        inside = np.abs(arg) < math.pi / 2
        out = np.zeros(u.shape)
        ui = u[inside]
        a = 1.0 + p.delta
        out[inside] = self.normalization * np.cos(arg[inside]) ** a * np.exp(a * p.kappa * ui)
        return out

    def log_derivative(self, u):
        p = self.params
        u = np.asarray(u, dtype=float)
        return (1.0 + p.delta) * (p.kappa - p.gamma_tilde * np.tan(p.gamma_tilde * u))

    def _u(self, x, t):
        return np.asarray(x, dtype=float) - self.k * t - self.x0

    def eval(self, x, t=0.0):
        out = self.envelope(self._u(x, t)) * _phase(self.k, self.omega, x, t)
        return _scalar_or_array(out, x)

    def time_derivative(self, x, t=0.0):
        u = self._u(x, t)
        if np.any(np.abs(self.params.gamma_tilde * u) >= math.pi / 2):
            raise OutsideSupport("time derivative requested on or outside the support boundary")
        psi = self.envelope(u) * _phase(self.k, self.omega, x, t)
        out = (-self.k * self.log_derivative(u) - 1j * self.omega) * psi
        return _scalar_or_array(out, x)

    def norm_sq(self) -> float:
        """Exact L2 norm squared of the continuum profile."""
        p = self.params
        a = 1.0 + p.delta
        if p.kappa == 0:
            val = math.sqrt(math.pi) * math.exp(math.lgamma(a + 0.5) - math.lgamma(a + 1.0)) / p.gamma_tilde
        else:
            hw = self.half_width
            val, _ = integrate.quad(
                lambda u: math.cos(p.gamma_tilde * u) ** (2 * a) * math.exp(2 * a * p.kappa * u),
                -hw, hw, epsabs=0.0, epsrel=1e-13, limit=200,
            )
        return self.normalization ** 2 * val


@dataclass(frozen=True)
class CoshSoliton:
    """Exponentially confined soliton [cosh(beta (x - k t - x0))]^(-|alpha|)."""

    k: float
    beta: float
    abs_alpha: float
    omega: float
    x0: float = 0.0
    normalization: float = 1.0

    def envelope(self, u):
        u = np.asarray(u, dtype=float)
        return self.normalization * np.cosh(self.beta * u) ** (-self.abs_alpha)

    def log_derivative(self, u):
        return -self.abs_alpha * self.beta * np.tanh(self.beta * np.asarray(u, dtype=float))

    def _u(self, x, t):
        return np.asarray(x, dtype=float) - self.k * t - self.x0

    def eval(self, x, t=0.0):
        out = self.envelope(self._u(x, t)) * _phase(self.k, self.omega, x, t)
        return _scalar_or_array(out, x)

    def time_derivative(self, x, t=0.0):
        u = self._u(x, t)
        psi = self.envelope(u) * _phase(self.k, self.omega, x, t)
        out = (-self.k * self.log_derivative(u) - 1j * self.omega) * psi
        return _scalar_or_array(out, x)

    def norm_sq(self) -> float:
        a = self.abs_alpha
        beta_fn = math.exp(math.lgamma(0.5) + math.lgamma(a) - math.lgamma(a + 0.5))
        return self.normalization ** 2 * beta_fn / self.beta


@dataclass(frozen=True)
class PlaneWave:
    k: float
    omega: float
    amplitude: float = 1.0

    def eval(self, x, t=0.0):
        out = self.amplitude * _phase(self.k, self.omega, x, t)
        return _scalar_or_array(out, x)

    def time_derivative(self, x, t=0.0):
        return -1j * self.omega * self.eval(x, t)


@dataclass(frozen=True)
class FreeGaussian:
    """Exact solution of the linear equation (all nonlinear weights zero).

    Initial data exp(-(x - x0)^2 / (4 s0^2) + i k x); the density variance is
    s0^2 + t^2 / (4 s0^2).
    """

    s0: float
    k: float = 0.0
    x0: float = 0.0
    amplitude: float = 1.0

    def _parts(self, x, t):
        y = np.asarray(x, dtype=float) - self.x0 - self.k * t
        a = 1.0 + 1j * t / (2.0 * self.s0 ** 2)
        base = self.amplitude / np.sqrt(a) * np.exp(-(y ** 2) / (4.0 * self.s0 ** 2 * a))
        phase = np.exp(1j * (self.k * np.asarray(x, dtype=float) - 0.5 * self.k ** 2 * t))
        return y, a, base, phase

    def eval(self, x, t=0.0):
        _, _, base, phase = self._parts(x, t)
        return _scalar_or_array(base * phase, x)

    def time_derivative(self, x, t=0.0):
        y, a, base, phase = self._parts(x, t)
        s2 = self.s0 ** 2
        d_y = -y / (2.0 * s2 * a) * base
        d_yy = (y ** 2 / (4.0 * s2 ** 2 * a ** 2) - 1.0 / (2.0 * s2 * a)) * base
        d_t = 0.5j * d_yy
        out = (d_t - self.k * d_y - 0.5j * self.k ** 2 * base) * phase
        return _scalar_or_array(out, x)

    def variance(self, t: float) -> float:
        return self.s0 ** 2 + t ** 2 / (4.0 * self.s0 ** 2)

    def norm_sq(self) -> float:
        return self.amplitude ** 2 * math.sqrt(2.0 * math.pi) * self.s0


@dataclass(frozen=True)
class LinearMode:
    """Real solution e^{kappa x} (C1 e^{s x} + C2 e^{-s x}) of the linearized amplitude equation."""

    C1: float
    C2: float
    kappa: float
    s: float

    def eval(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        out = np.exp(self.kappa * x) * (self.C1 * np.exp(self.s * x) + self.C2 * np.exp(-self.s * x))
        return float(out) if out.ndim == 0 else out

    def diverges_at(self) -> frozenset:
        """Which of ``"-inf"``/``"+inf"`` the mode blows up at."""
        ends = set()
        for c, rate in ((self.C1, self.kappa + self.s), (self.C2, self.kappa - self.s)):
            if c == 0:
                continue
            if rate > 0:
                ends.add("+inf")
            elif rate < 0:
                ends.add("-inf")
        return frozenset(ends)


AnalyticSolution = Union[FlsSolution1D, CoshSoliton, PlaneWave, FreeGaussian, LinearMode]


@dataclass(frozen=True)
class RadialProfile:
    """Radial Helmholtz profile: J_m(gamma r) in 2D, gamma j_l(gamma r) in 3D."""

    dim: int
    mode_index: int
    gamma: float
    first_zero: float

    def radial(self, r):
        r = np.asarray(r, dtype=float)
        z = self.gamma * r
        if self.dim == 2:
            out = bessel_j(self.mode_index, z)
        else:
            out = self.gamma * spherical_bessel_j(self.mode_index, z)
        return float(out) if np.ndim(out) == 0 else out

    def eval(self, r, phi=0.0):
        """Profile including the azimuthal factor cos(m phi) in 2D."""
        val = self.radial(r)
        if self.dim == 2 and self.mode_index:
            val = val * np.cos(self.mode_index * np.asarray(phi, dtype=float))
        return val

    def fls_modulus(self, r, delta: float):
        """|f|^(1+delta) on the first nodal cell (0, first_zero), zero beyond it."""
        r = np.asarray(r, dtype=float)
        f = np.asarray(self.radial(r), dtype=float)
        out = np.where(r < self.first_zero, np.abs(f) ** (1.0 + delta), 0.0)
        return float(out) if out.ndim == 0 else out


def build_fls(k: float, gamma_tilde: float, p: DerivedParams, x0: float = 0.0,
              normalize: bool = False) -> FlsSolution1D:
    """Construct a finite-length soliton with drift and frequency fixed by ``p``.

    ``normalize=True`` scales the profile to unit L2 norm; otherwise the
    cosine factor peaks at 1.
    """
    _, delta = exponents(p.sigma, p.xi)
    if not delta > 0:
        raise InadmissibleParams(f"finite-length solitons need delta > 0, got delta={delta!r}")
    if fls_admissible(p.sigma, p.xi) is FlsBranch.INADMISSIBLE:  # pragma: no cover - implied by delta > 0
        raise InadmissibleParams("sigma, xi outside both admissible branches")
    if not gamma_tilde > 0:
        raise InadmissibleParams(f"gamma_tilde must be > 0, got {gamma_tilde!r}")
    kappa = drift_kappa(k, p)
    params = soliton_params(k, gamma_tilde ** 2 + kappa ** 2, p)
    # keep the caller's gamma_tilde bit-exact; sqrt(gamma^2 - kappa^2) may round
    params = dataclasses.replace(params, gamma_tilde=float(gamma_tilde))
    sol = FlsSolution1D(params=params, x0=float(x0), galilean=check_galilean(p))
    if normalize:
        sol = FlsSolution1D(params=params, x0=float(x0), normalization=1.0 / math.sqrt(sol.norm_sq()),
                            galilean=sol.galilean)
    return sol


def build_cosh_soliton(k: float, beta: float, p: DerivedParams, x0: float = 0.0,
                       normalize: bool = False) -> CoshSoliton:
    alpha, _ = exponents(p.sigma, p.xi)
    if not alpha < 0:
        raise InadmissibleParams(f"exponentially confined solitons need alpha < 0, got alpha={alpha!r}")
    if not beta > 0:
        raise InadmissibleParams(f"beta must be > 0, got {beta!r}")
    if p.mu * k != 0:
        raise InadmissibleParams("the symmetric cosh profile needs zero drift (mu * k == 0)")
    params = soliton_params(k, -beta * beta, p)
    sol = CoshSoliton(k=float(k), beta=float(beta), abs_alpha=float(-alpha), omega=float(params.omega),
                      x0=float(x0))
    if normalize:
        sol = CoshSoliton(k=sol.k, beta=sol.beta, abs_alpha=sol.abs_alpha, omega=sol.omega, x0=sol.x0,
                          normalization=1.0 / math.sqrt(sol.norm_sq()))
    return sol


def build_plane_wave(k: float, p: Optional[DerivedParams] = None) -> PlaneWave:
    """Plane wave with omega = k^2 (1 + eta) / 2.

    Without ``p`` (or for any Galilean-invariant ``p``) this is the free
    dispersion k^2/2.
    """
    eta = 0.0 if p is None else p.eta
    return PlaneWave(k=float(k), omega=0.5 * k * k * (1.0 + eta))


def build_free_gaussian(s0: float, k: float = 0.0, x0: float = 0.0) -> FreeGaussian:
    if not s0 > 0:
        raise InadmissibleParams("s0 must be > 0")
    return FreeGaussian(s0=float(s0), k=float(k), x0=float(x0))


def build_linear_mode(C1: float, C2: float, gamma_sq: float, kappa: float) -> LinearMode:
    diff = kappa * kappa - gamma_sq
    if diff < 0:
        raise InadmissibleParams("gamma^2 > kappa^2 gives oscillatory modes; use build_fls")
    return LinearMode(C1=float(C1), C2=float(C2), kappa=float(kappa), s=math.sqrt(diff))


def radial_profile(dim: int, mode_index: int, gamma: float) -> RadialProfile:
    if dim not in (2, 3):
        raise ValueError("dim must be 2 or 3")
    if mode_index < 0 or int(mode_index) != mode_index:
        raise ValueError("mode_index must be a nonnegative integer")
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    if dim == 2:
        f = lambda r: bessel_j(mode_index, gamma * r)  # noqa: E731
    else:
        f = lambda r: spherical_bessel_j(mode_index, gamma * r)  # noqa: E731
    zero = first_sign_change_root(f, 0.1 / gamma, 20.0 / gamma, n_scan=1000)
    return RadialProfile(dim=dim, mode_index=int(mode_index), gamma=float(gamma), first_zero=zero)


def evaluate(sol, x, t=0.0):
    """Exact value of ``sol`` at (x, t); scalars or arrays."""
    return sol.eval(x, t)


def time_derivative(sol, x, t=0.0):
    return sol.time_derivative(x, t)


def sample(sol, grid: Grid1D, t: float = 0.0) -> ComplexField:
    return ComplexField(grid, np.asarray(sol.eval(grid.x, t), dtype=np.complex128))
