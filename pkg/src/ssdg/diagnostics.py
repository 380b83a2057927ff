"""Scalar and pointwise verification instruments."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .coeffs import NonlinearCoeffs
from .errors import EmptySupport, TooFewSnapshots
from .fields import DEFAULT_FLOOR, DEFAULT_SCHEME, ComplexField, Grid1D, derivative, eval_omega_psi

__all__ = [
    "ResidualReport",
    "norm",
    "centroid",
    "width",
    "support_width",
    "overlap_error",
    "average_energy",
    "energy_series",
    "pde_residual",
    "convergence_order",
]


@dataclass(frozen=True)
class ResidualReport:
    max_interior: float
    interior_threshold: float
    boundary_excluded_points: int
    n: int = 0
    dx: float = float("nan")


def norm(field: ComplexField) -> float:
    """Discrete L2 norm squared, sum(rho) * dx."""
    return float(np.sum(field.rho) * field.grid.dx)


def _unwrapped_x(grid: Grid1D, reference: Optional[float]):
    x = grid.x
    if reference is None:
        return x
    L = grid.length
    return reference + np.mod(x - reference + 0.5 * L, L) - 0.5 * L


def centroid(field: ComplexField, reference: Optional[float] = None) -> float:
    """Density-weighted mean position.

    With ``reference`` (e.g. the previous centroid of a trajectory) the
    coordinates are unwrapped into [reference - L/2, reference + L/2).
    """
    rho = field.rho
    total = rho.sum()
    if total == 0.0:
        raise EmptySupport("centroid of a vanishing field")
    x = _unwrapped_x(field.grid, reference)
    return float(np.sum(x * rho) / total)


def width(field: ComplexField, reference: Optional[float] = None) -> float:
    """RMS width (standard deviation of the normalized density)."""
    rho = field.rho
    total = rho.sum()
    if total == 0.0:
        raise EmptySupport("width of a vanishing field")
    c = centroid(field, reference)
    x = _unwrapped_x(field.grid, c)
    return float(np.sqrt(np.sum((x - c) ** 2 * rho) / total))


def support_width(field: ComplexField, threshold: float = 1e-12) -> float:
    """Measure of the set where rho > threshold * max(rho)."""
    rho = field.rho
    if rho.max() == 0.0:
        return 0.0
    return float(np.count_nonzero(rho > threshold * rho.max()) * field.grid.dx)


def _normalized(values, dx):
    nrm = np.sqrt(np.sum(np.abs(values) ** 2) * dx)
    if nrm == 0.0:
        raise EmptySupport("cannot normalize a vanishing field")
    return values / nrm


def overlap_error(field: ComplexField, sol, t: float) -> float:
    """Phase-factored L2 distance between ``field`` and ``sol`` sampled at ``t``.

    Both are scaled to unit discrete norm; the optimal global phase is the
    argument of their inner product.
    """
    dx = field.grid.dx
    a = _normalized(field.values, dx)
    b = _normalized(np.asarray(sol.eval(field.grid.x, t), dtype=np.complex128), dx)
    inner = np.vdot(b, a)
    phase = inner / abs(inner) if inner != 0 else 1.0
    return float(np.sqrt(np.sum(np.abs(a - phase * b) ** 2) * dx))


def energy_series(record) -> tuple:
    """Centered-difference estimates of i <psi, d psi/dt> / <psi, psi> at interior snapshots."""
    snaps = record.snapshots
    times = np.asarray(record.times, dtype=float)
    if len(snaps) < 3:
        raise TooFewSnapshots(f"need at least 3 snapshots, got {len(snaps)}")
    dx = snaps[0].grid.dx
    out = []
    for i in range(1, len(snaps) - 1):
        dpsi = (snaps[i + 1].values - snaps[i - 1].values) / (times[i + 1] - times[i - 1])
        psi = snaps[i].values
        e = 1j * np.vdot(psi, dpsi) * dx / (np.vdot(psi, psi).real * dx)
        out.append(e)
    return times[1:-1], np.asarray(out)


def average_energy(record) -> float:
    """Packet average energy, averaged over interior times.

    Snapshots are divided by their own norm, so unit normalization of the
    trajectory is not required in practice.
    """
    _, e = energy_series(record)
    return float(np.mean(e.real))


def pde_residual(sol, t: float, grid: Grid1D, coeffs: NonlinearCoeffs,
                 interior_threshold: float = 1e-3, scheme: str = DEFAULT_SCHEME,
                 floor: float = DEFAULT_FLOOR) -> ResidualReport:
    """Max of |i psi_t + psi''/2 - Omega{psi} psi| where rho > interior_threshold * max(rho).

    The time derivative is the closed form from the solution object, so the
    report measures spatial discretization error only.
    """
    if not 0 < interior_threshold < 1:
        raise ValueError("interior_threshold must lie in (0, 1)")
    x = grid.x
    psi = np.asarray(sol.eval(x, t), dtype=np.complex128)
    field = ComplexField(grid, psi)
    rho = field.rho
    rmax = rho.max()
    if rmax == 0.0:
        raise EmptySupport("solution vanishes on the grid")
    mask = rho > interior_threshold * rmax
    lap = derivative(psi, grid, 2, scheme)
    nl = eval_omega_psi(field, coeffs, floor=floor, scheme=scheme)
    dt_psi = np.asarray(sol.time_derivative(x[mask], t), dtype=np.complex128)
    res = 1j * dt_psi + 0.5 * lap[mask] - nl[mask]
    excluded = int(np.count_nonzero((rho > 0) & ~mask))
    return ResidualReport(
        max_interior=float(np.max(np.abs(res))),
        interior_threshold=float(interior_threshold),
        boundary_excluded_points=excluded,
        n=grid.n,
        dx=grid.dx,
    )


def convergence_order(dxs, errors) -> float:
    """Least-squares slope of log(error) against log(dx)."""
    dxs = np.asarray(dxs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    slope, _ = np.polyfit(np.log(dxs), np.log(errors), 1)
    return float(slope)
