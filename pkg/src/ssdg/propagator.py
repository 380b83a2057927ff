"""Time integration of i psi_t = -psi''/2 + Omega{psi} psi on a periodic grid.

Two schemes:

``RK4-FD``
    classical RK4 on the method-of-lines system with central differences.
``SplitStep``
    Strang splitting; exact linear propagation in Fourier space around a
    nonlinear sub-step psi <- psi exp(-i Omega dt) with Omega frozen.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import kernels
from .coeffs import NonlinearCoeffs
from .diagnostics import centroid, norm, overlap_error, width
from .errors import UnstableStep
from .fields import DEFAULT_FLOOR, ComplexField, Grid1D, _derivatives

__all__ = [
    "SCHEMES",
    "PropagatorConfig",
    "TrajectoryRecord",
    "stability_limit",
    "step",
    "run",
    "perturb",
    "mollify",
    "record_from_solution",
]

log = logging.getLogger(__name__)

SCHEMES = ("RK4-FD", "SplitStep")
RK4_CFL = 0.2
SPLIT_CFL = 0.1
GROWTH_LIMIT = 10.0


def stability_limit(grid: Grid1D, scheme: str) -> float:
    if scheme == "RK4-FD":
        return RK4_CFL * grid.dx ** 2
    if scheme == "SplitStep":
        return SPLIT_CFL * grid.dx
    raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")


@dataclass(frozen=True)
class PropagatorConfig:
    dt: float
    scheme: str = "RK4-FD"
    density_floor: float = DEFAULT_FLOOR
    record_every: int = 1
    derivative_scheme: str = "fd"  # derivatives inside Omega for SplitStep
    perturbation: float = 0.0
    mollify_width: float = 0.0
    seed: Optional[int] = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.density_floor < 0:
            raise ValueError("density_floor must be >= 0")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValueError("record_every must be an integer >= 1")
        if self.perturbation < 0 or self.mollify_width < 0:
            raise ValueError("perturbation and mollify_width must be >= 0")

    def check_stable(self, grid: Grid1D) -> None:
        lim = stability_limit(grid, self.scheme)
        if self.dt > lim:
            raise ValueError(f"dt={self.dt:g} exceeds the {self.scheme} stability limit {lim:g}")


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    snapshots: list
    diagnostics: dict = dc_field(default_factory=dict)

    def rows(self):
        keys = ("t", "norm", "centroid", "width", "l2_error_vs_analytic")
        cols = [self.times] + [self.diagnostics[k] for k in keys[1:]]
        for vals in zip(*cols):
            yield dict(zip(keys, (float(v) for v in vals)))


def _split_step(psi, grid, coeffs, dt, floor, dscheme, half_kernel):
    psi = np.fft.ifft(half_kernel * np.fft.fft(psi))
    rho = psi.real ** 2 + psi.imag ** 2
    rmax = rho.max()
    if rmax > 0.0:
        d1, d2 = _derivatives(psi, grid, dscheme)
        om = kernels.omega_pointwise(psi, d1, d2, coeffs.lambdas, coeffs.D, coeffs.Dtilde, floor * rmax)
        psi = psi * np.exp(-1j * om * dt)
    return np.fft.ifft(half_kernel * np.fft.fft(psi))


def _half_kernel(grid, dt):
    return np.exp(-0.25j * grid.wavenumbers ** 2 * dt)


def _advance(psi, grid, coeffs, dt, nsteps, cfg):
    """Advance ``nsteps`` steps of signed size ``dt``; returns (psi, failed_step)."""
    if cfg.scheme == "RK4-FD":
        return kernels.rk4_fd_advance(psi, grid.dx, dt, nsteps, coeffs.lambdas, coeffs.D, coeffs.Dtilde,
                                      cfg.density_floor, GROWTH_LIMIT)
    half = _half_kernel(grid, dt)
    u = np.asarray(psi, dtype=np.complex128)
    for i in range(nsteps):
        before = np.abs(u).max()
        new = _split_step(u, grid, coeffs, dt, cfg.density_floor, cfg.derivative_scheme, half)
        after = np.abs(new).max()
        if not np.isfinite(after) or (before > 0 and after > GROWTH_LIMIT * before):
            return u, i
        u = new
    return u, -1


def step(field: ComplexField, coeffs: NonlinearCoeffs, cfg: PropagatorConfig) -> ComplexField:
    """One time step of size ``cfg.dt``."""
    cfg.check_stable(field.grid)
    psi, failed = _advance(field.values, field.grid, coeffs, cfg.dt, 1, cfg)
    if failed >= 0:
        raise UnstableStep(f"max|psi| grew more than {GROWTH_LIMIT:g}x in one step", time=cfg.dt)
    return ComplexField(field.grid, psi)


def perturb(field: ComplexField, amplitude: float, seed: Optional[int]) -> ComplexField:
    """Multiply by (1 + amplitude * eta) with eta complex standard normal noise."""
    if amplitude == 0:
        return field
    rng = np.random.default_rng(seed)
    eta = rng.standard_normal(field.grid.n) + 1j * rng.standard_normal(field.grid.n)
    return field.with_values(field.values * (1.0 + amplitude * eta))


def mollify(field: ComplexField, width_: float) -> ComplexField:
    """Gaussian smoothing of the initial data (off by default)."""
    if width_ == 0:
        return field
    kk = field.grid.wavenumbers
    return field.with_values(np.fft.ifft(np.fft.fft(field.values) * np.exp(-0.5 * (kk * width_) ** 2)))


def run(initial: ComplexField, coeffs: NonlinearCoeffs, T: float, cfg: PropagatorConfig,
        reference=None, reverse: bool = False) -> TrajectoryRecord:
    """Integrate over [0, T] (or backwards with ``reverse=True``), recording snapshots.

    ``reference`` is an analytic solution used for the overlap-error column;
    without it that column is NaN. The number of steps is round(T/dt), so the
    final time lies within dt/2 of T.

    Raises
    ------
    UnstableStep
        With ``.time`` set to the time at which the blow-up detector fired.
    """
    if not T > 0:
        raise ValueError("T must be > 0")
    grid = initial.grid
    cfg.check_stable(grid)
    field0 = mollify(perturb(initial, cfg.perturbation, cfg.seed), cfg.mollify_width)
    nsteps = max(1, int(round(T / cfg.dt)))
    sign = -1.0 if reverse else 1.0
    dt = sign * cfg.dt

    times = [0.0]
    snaps = [field0]
    psi = np.array(field0.values)
    done = 0
    while done < nsteps:
        chunk = min(cfg.record_every, nsteps - done)
        psi, failed = _advance(psi, grid, coeffs, dt, chunk, cfg)
        if failed >= 0:
            t_fail = (done + failed + 1) * dt
            raise UnstableStep(f"blow-up detected at t={t_fail:.6g}", time=t_fail)
        done += chunk
        times.append(done * dt)
        snaps.append(ComplexField(grid, psi))
    log.debug("ran %d steps of %s, dt=%g", nsteps, cfg.scheme, dt)
    return _record(np.asarray(times), snaps, reference)


def _record(times, snaps, reference) -> TrajectoryRecord:
    norms, cents, widths, errs = [], [], [], []
    prev = None
    for t, f in zip(times, snaps):
        norms.append(norm(f))
        if f.rho.max() > 0:
            c = centroid(f, prev)
            cents.append(c)
            widths.append(width(f, c))
            prev = c
        else:
            cents.append(math.nan)
            widths.append(math.nan)
        errs.append(overlap_error(f, reference, t) if reference is not None and f.rho.max() > 0 else math.nan)
    diag = {
        "norm": np.asarray(norms),
        "centroid": np.asarray(cents),
        "width": np.asarray(widths),
        "l2_error_vs_analytic": np.asarray(errs),
    }
    return TrajectoryRecord(times=times, snapshots=snaps, diagnostics=diag)


def record_from_solution(sol, grid: Grid1D, times) -> TrajectoryRecord:
    """Trajectory built by sampling an analytic solution (no integration)."""
    times = np.asarray(times, dtype=float)
    snaps = [ComplexField(grid, np.asarray(sol.eval(grid.x, t), dtype=np.complex128)) for t in times]
    return _record(times, snaps, sol)
