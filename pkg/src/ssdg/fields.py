"""Gridded 1D complex fields, derivatives, observables and the nonlinear functionals."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from . import kernels
from .coeffs import NonlinearCoeffs
from .errors import EmptySupport, InvalidGrid

__all__ = [
    "DEFAULT_FLOOR",
    "DEFAULT_SCHEME",
    "Grid1D",
    "ComplexField",
    "Observables",
    "FunctionalValues",
    "make_grid",
    "derivative",
    "observables",
    "eval_functionals",
    "eval_omega_psi",
    "write_field_csv",
    "read_field_csv",
]

DEFAULT_FLOOR = 1e-12
DEFAULT_SCHEME = "fd"
SCHEMES = ("fd", "spectral")


@dataclass(frozen=True)
class Grid1D:
    """Uniform periodic grid; ``x_max`` is excluded from the samples."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max)):
            raise InvalidGrid("grid bounds must be finite")
        if not self.x_max > self.x_min:
            raise InvalidGrid(f"empty domain: x_max={self.x_max} <= x_min={self.x_min}")
        if int(self.n) != self.n or self.n < 8:
            raise InvalidGrid(f"need an integer n >= 8, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "x_min", float(self.x_min))
        object.__setattr__(self, "x_max", float(self.x_max))

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.n) * self.dx

    @property
    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n, d=self.dx)

    def refined(self, factor: int = 2) -> "Grid1D":
        return Grid1D(self.x_min, self.x_max, self.n * factor)


def make_grid(x_min: float, x_max: float, n: int) -> Grid1D:
    return Grid1D(x_min, x_max, n)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Wavefunction samples on a grid. The stored array is read-only."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n,):
            raise ValueError(f"expected {self.grid.n} samples, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def rho(self) -> np.ndarray:
        return self.values.real ** 2 + self.values.imag ** 2

    def with_values(self, values) -> "ComplexField":
        return ComplexField(self.grid, values)


@dataclass(frozen=True)
class Observables:
    rho: np.ndarray
    j: np.ndarray


@dataclass(frozen=True)
class FunctionalValues:
    """Lambda_1..5 and R_1..5 sampled pointwise, shape (5, n) each.

    Entries outside ``valid_mask`` are zero.
    """

    lambda_vals: np.ndarray
    r_vals: np.ndarray
    valid_mask: np.ndarray = dc_field(repr=False)

    def lambda_sum(self, weights) -> np.ndarray:
        return np.tensordot(np.asarray(weights, dtype=float), self.lambda_vals, axes=1)

    def r_sum(self, weights) -> np.ndarray:
        return np.tensordot(np.asarray(weights, dtype=float), self.r_vals, axes=1)


def _check_scheme(scheme):
    if scheme not in SCHEMES:
        raise ValueError(f"unknown derivative scheme {scheme!r}; expected one of {SCHEMES}")


def derivative(values, grid: Grid1D, order: int, scheme: str = DEFAULT_SCHEME) -> np.ndarray:
    """Periodic derivative of order 1 or 2.

    ``scheme="fd"`` uses second-order central differences, ``"spectral"`` the
    FFT. The Nyquist mode is dropped for the first spectral derivative.
    Real input gives real output.
    """
    if order not in (1, 2):
        raise ValueError(f"order must be 1 or 2, got {order!r}")
    _check_scheme(scheme)
    values = np.asarray(values)
    is_real = not np.iscomplexobj(values)
    if scheme == "fd":
        d1, d2 = kernels.fd_derivatives(values, grid.dx)
        out = d1 if order == 1 else d2
    else:
        kk = grid.wavenumbers
        if order == 1:
            if grid.n % 2 == 0:
                kk = kk.copy()
                kk[grid.n // 2] = 0.0
            mult = 1j * kk
        else:
            mult = -(kk ** 2)
        out = np.fft.ifft(mult * np.fft.fft(values))
    return out.real.copy() if is_real else np.asarray(out, dtype=np.complex128)


def _derivatives(psi, grid, scheme):
    if scheme == "fd":
        return kernels.fd_derivatives(psi, grid.dx)
    return derivative(psi, grid, 1, scheme), derivative(psi, grid, 2, scheme)


def observables(field: ComplexField, scheme: str = DEFAULT_SCHEME) -> Observables:
    psi = field.values
    d1 = derivative(psi, field.grid, 1, scheme)
    return Observables(rho=field.rho, j=(np.conj(psi) * d1).imag)


def eval_functionals(field: ComplexField, floor: float = DEFAULT_FLOOR,
                     scheme: str = DEFAULT_SCHEME) -> FunctionalValues:
    """Evaluate both columns of the functional table on ``rho > floor * max(rho)``.

    The density and current derivatives are assembled from psi' and psi'' by
    the product rule, so both columns share one discretization of psi.
    """
    if floor < 0:
        raise ValueError("floor must be >= 0")
    psi = field.values
    rho = field.rho
    rmax = rho.max()
    if rmax == 0.0:
        raise EmptySupport("field vanishes identically")
    mask = rho > floor * rmax
    d1, d2 = _derivatives(psi, field.grid, scheme)

    lam = np.zeros((5, psi.size))
    rv = np.zeros((5, psi.size))
    p, r, p1, p2 = psi[mask], rho[mask], d1[mask], d2[mask]
    pc = np.conj(p)
    a = p1 * pc / r  # grad psi / psi
    b = p2 * pc / r  # lap psi / psi
    lam[0, mask] = b.real
    lam[1, mask] = b.imag
    lam[2, mask] = (a * a).real
    lam[3, mask] = (a * a).imag
    lam[4, mask] = np.abs(p1) ** 2 / r

    j = (pc * p1).imag
    div_j = (pc * p2).imag
    grad_rho = 2.0 * (pc * p1).real
    lap_rho = 2.0 * (pc * p2).real + 2.0 * np.abs(p1) ** 2
    rv[0, mask] = div_j / r
    rv[1, mask] = lap_rho / r
    rv[2, mask] = j ** 2 / r ** 2
    rv[3, mask] = j * grad_rho / r ** 2
    rv[4, mask] = grad_rho ** 2 / r ** 2
    return FunctionalValues(lambda_vals=lam, r_vals=rv, valid_mask=mask)


def eval_omega_psi(field: ComplexField, coeffs: NonlinearCoeffs, floor: float = DEFAULT_FLOOR,
                   scheme: str = DEFAULT_SCHEME) -> np.ndarray:
    """Return (R{psi} + i I{psi}) psi, zero wherever rho <= floor * max(rho)."""
    if floor < 0:
        raise ValueError("floor must be >= 0")
    psi = field.values
    rmax = field.rho.max()
    if rmax == 0.0:
        raise EmptySupport("field vanishes identically")
    if scheme == "fd":
        return kernels.omega_psi_fd(psi, field.grid.dx, coeffs.lambdas, coeffs.D, coeffs.Dtilde, floor)
    d1, d2 = _derivatives(psi, field.grid, scheme)
    om = kernels.omega_pointwise(psi, d1, d2, coeffs.lambdas, coeffs.D, coeffs.Dtilde, floor * rmax)
    return om * psi


def _fmt(v: float) -> str:
    return repr(float(v))


def write_field_csv(path, field: ComplexField, x=None) -> Path:
    """Write columns ``x, re, im, rho`` with shortest round-trip float formatting.

    ``x`` overrides the grid coordinates (used to pass a re-read column
    through unchanged).
    """
    path = Path(path)
    xs = field.grid.x if x is None else np.asarray(x, dtype=float)
    vals = field.values
    rho = field.rho
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "re", "im", "rho"])
        for xi, v, r in zip(xs, vals, rho):
            w.writerow([_fmt(xi), _fmt(v.real), _fmt(v.imag), _fmt(r)])
    return path


def read_field_csv(path):
    """Read a field CSV. Returns ``(field, x)`` where ``x`` is the raw coordinate column."""
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ValueError(f"{path}: no data rows")
    try:
        x = np.array([float(r["x"]) for r in rows])
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    except KeyError as exc:
        raise ValueError(f"{path}: missing column {exc}") from None
    n = x.size
    dx = (x[-1] - x[0]) / (n - 1)
    grid = make_grid(x[0], x[0] + n * dx, n)
    return ComplexField(grid, vals), x
