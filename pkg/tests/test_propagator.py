import numpy as np
import pytest

from ssdg import analytic, coeffs as cf, kernels, propagator as pr
from ssdg.coeffs import NonlinearCoeffs
from ssdg.diagnostics import overlap_error
from ssdg.errors import UnstableStep
from ssdg.fields import ComplexField, make_grid


def test_config_validation():
    with pytest.raises(ValueError):
        pr.PropagatorConfig(dt=0)
    with pytest.raises(ValueError):
        pr.PropagatorConfig(dt=1e-3, scheme="Euler")
    with pytest.raises(ValueError):
        pr.PropagatorConfig(dt=1e-3, record_every=0)
    g = make_grid(-1, 1, 64)
    cfg = pr.PropagatorConfig(dt=1.0)
    with pytest.raises(ValueError):
        cfg.check_stable(g)


def test_stability_limits():
    g = make_grid(0, 1, 100)
    assert pr.stability_limit(g, "RK4-FD") == pytest.approx(0.2e-4)
    assert pr.stability_limit(g, "SplitStep") == pytest.approx(1e-3)


def test_splitstep_linear_plane_wave_exact():
    g = make_grid(0, 2 * np.pi, 64)
    pw = analytic.build_plane_wave(3.0)
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "SplitStep"), scheme="SplitStep", record_every=50)
    rec = pr.run(analytic.sample(pw, g), NonlinearCoeffs.linear(), 1.0, cfg, reference=pw)
    assert np.nanmax(rec.diagnostics["l2_error_vs_analytic"]) < 1e-12


def test_free_gaussian_spreading():
    g = make_grid(-30, 30, 512)
    sol = analytic.build_free_gaussian(1.0, k=0.5)
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "SplitStep"), scheme="SplitStep", record_every=40)
    rec = pr.run(analytic.sample(sol, g), NonlinearCoeffs.linear(), 2.0, cfg, reference=sol)
    t = rec.times[-1]
    assert rec.diagnostics["width"][-1] ** 2 == pytest.approx(sol.variance(t), rel=1e-8)
    assert rec.diagnostics["centroid"][-1] == pytest.approx(0.5 * t, abs=1e-8)


def test_rk4_linear_gaussian_second_order_in_space():
    sol = analytic.build_free_gaussian(1.0)
    errs = []
    for n in (128, 256):
        g = make_grid(-15, 15, n)
        cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "RK4-FD"))
        rec = pr.run(analytic.sample(sol, g), NonlinearCoeffs.linear(), 0.5, cfg, reference=sol)
        errs.append(rec.diagnostics["l2_error_vs_analytic"][-1])
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.1)


def test_cosh_soliton_propagates_shape_invariant():
    co = NonlinearCoeffs.simpl(2.0)
    sol = analytic.build_cosh_soliton(0.0, 1.0, cf.derive_params(co))
    g = make_grid(-12, 12, 512)
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "SplitStep"), scheme="SplitStep", record_every=100)
    rec = pr.run(analytic.sample(sol, g), co, 1.0, cfg, reference=sol)
    d = rec.diagnostics
    assert d["l2_error_vs_analytic"][-1] < 1e-2
    assert abs(d["norm"][-1] - d["norm"][0]) / d["norm"][0] < 1e-10


def test_reverse_run_returns_initial_data():
    g = make_grid(-15, 15, 256)
    sol = analytic.build_free_gaussian(1.0, k=1.0)
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "SplitStep"), scheme="SplitStep", record_every=1000)
    fwd = pr.run(analytic.sample(sol, g), NonlinearCoeffs.linear(), 1.0, cfg)
    back = pr.run(fwd.snapshots[-1], NonlinearCoeffs.linear(), 1.0, cfg, reverse=True)
    assert overlap_error(back.snapshots[-1], sol, 0.0) < 1e-12
    assert back.times[-1] < 0


def test_blow_up_detected():
    g = make_grid(-1, 1, 64)
    co = NonlinearCoeffs(0, 0, 0, 0, 0, D=50.0)
    psi = np.exp(-40 * g.x ** 2) + 1e-3
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "RK4-FD"), record_every=10)
    with pytest.raises(UnstableStep) as info:
        pr.run(ComplexField(g, psi), co, 5.0, cfg)
    assert info.value.time is not None and info.value.time > 0


def test_perturbation_is_seeded():
    g = make_grid(-1, 1, 32)
    fld = ComplexField(g, np.ones(32))
    a = pr.perturb(fld, 1e-3, seed=4).values
    b = pr.perturb(fld, 1e-3, seed=4).values
    assert np.array_equal(a, b) and not np.array_equal(a, fld.values)


def test_record_rows():
    g = make_grid(0, 2 * np.pi, 32)
    rec = pr.record_from_solution(analytic.build_plane_wave(1.0), g, [0.0, 0.5])
    rows = list(rec.rows())
    assert [r["t"] for r in rows] == [0.0, 0.5]
    assert set(rows[0]) == {"t", "norm", "centroid", "width", "l2_error_vs_analytic"}


@pytest.mark.skipif("numba" not in kernels.available_backends(), reason="numba not installed")
def test_backends_agree_on_run():
    co = NonlinearCoeffs.simpl(0.5)
    sol = analytic.build_fls(1.0, 1.0, cf.derive_params(co))
    g = make_grid(-4, 4, 128)
    cfg = pr.PropagatorConfig(dt=0.5 * pr.stability_limit(g, "RK4-FD"), record_every=50)
    out = {}
    for name in ("numpy", "numba"):
        with kernels.use_backend(name):
            out[name] = pr.run(analytic.sample(sol, g), co, 0.05, cfg).snapshots[-1].values
    np.testing.assert_allclose(out["numba"], out["numpy"], rtol=0, atol=1e-12)
