import math

import numpy as np
import pytest

from ssdg import analytic, coeffs as cf, diagnostics as dg, propagator
from ssdg.coeffs import NonlinearCoeffs
from ssdg.errors import TooFewSnapshots
from ssdg.fields import ComplexField, make_grid


def test_norm_constant():
    g = make_grid(0, 3.0, 64)
    assert dg.norm(ComplexField(g, np.ones(64))) == pytest.approx(3.0)


def test_centroid_and_width():
    g = make_grid(-10, 10, 2048)
    fld = ComplexField(g, np.exp(-(g.x - 2) ** 2 / 4))  # rho variance 1
    assert dg.centroid(fld) == pytest.approx(2.0, abs=1e-12)
    assert dg.width(fld) == pytest.approx(1.0, rel=1e-10)


def test_centroid_periodic_unwrap():
    g = make_grid(-10, 10, 1024)
    fld = ComplexField(g, np.exp(-(g.x - 9.5) ** 2) + np.exp(-(g.x + 10.5) ** 2))
    assert dg.centroid(fld, reference=9.0) == pytest.approx(9.5, abs=1e-6)


def test_overlap_error_phase_and_scale():
    g = make_grid(-4, 4, 256)
    sol = analytic.build_fls(0.0, 1.0, cf.derive_params(NonlinearCoeffs.simpl(0.5)))
    fld = ComplexField(g, 3 * np.exp(1j * math.pi / 3) * sol.eval(g.x))
    assert dg.overlap_error(fld, sol, 0.0) < 1e-14
    shifted = ComplexField(g, sol.eval(g.x - 0.3))
    assert dg.overlap_error(shifted, sol, 0.0) > 0.1


def test_average_energy_plane_wave():
    g = make_grid(0, 2 * np.pi, 64)
    pw = analytic.build_plane_wave(3.0)
    rec = propagator.record_from_solution(pw, g, np.linspace(0, 0.01, 11))
    assert dg.average_energy(rec) == pytest.approx(4.5, rel=1e-5)
    with pytest.raises(TooFewSnapshots):
        dg.average_energy(propagator.record_from_solution(pw, g, [0.0, 0.1]))


def test_residual_plane_wave_spectral():
    g = make_grid(0, 2 * np.pi, 64)
    co = NonlinearCoeffs(0.2, 0.1, -0.3, 0.4, 0.5, D=0.2)
    pw = analytic.build_plane_wave(2.0, cf.derive_params(co))
    rep = dg.pde_residual(pw, 0.7, g, co, scheme="spectral")
    assert rep.max_interior < 1e-12 and rep.boundary_excluded_points == 0


def test_residual_counts_excluded_points():
    co = NonlinearCoeffs.simpl(0.5)
    sol = analytic.build_fls(0.0, 1.0, cf.derive_params(co))
    rep = dg.pde_residual(sol, 0.0, make_grid(-4, 4, 512), co)
    assert rep.boundary_excluded_points > 0 and rep.n == 512
    with pytest.raises(ValueError):
        dg.pde_residual(sol, 0.0, make_grid(-4, 4, 512), co, interior_threshold=2.0)


def test_fls_with_drift_residual_converges():
    co = NonlinearCoeffs(0.1, 0.05, 0.1, 0.05, 0.1)
    sol = analytic.build_fls(1.0, 1.0, cf.derive_params(co))
    reps = [dg.pde_residual(sol, 0.3, make_grid(-4, 4, n), co) for n in (512, 1024, 2048)]
    order = dg.convergence_order([r.dx for r in reps], [r.max_interior for r in reps])
    assert abs(order - 2.0) < 0.3


def test_convergence_order():
    dx = np.array([0.1, 0.05, 0.025])
    assert dg.convergence_order(dx, 3 * dx ** 2) == pytest.approx(2.0)


def test_support_width():
    g = make_grid(-4, 4, 800)
    sol = analytic.build_fls(0.0, 1.0, cf.derive_params(NonlinearCoeffs.simpl(0.5)))
    assert dg.support_width(ComplexField(g, sol.eval(g.x)), threshold=0.0) == pytest.approx(math.pi, abs=0.02)
