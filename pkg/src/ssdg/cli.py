"""Command-line front end: ``ssdg {classify,analytic,residual,evolve,gauge} --config PATH --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import analytic, coeffs as cf, diagnostics, gauge, propagator
from .errors import ConfigError, SSDGError
from .fields import DEFAULT_FLOOR, SCHEMES as DERIV_SCHEMES, make_grid, read_field_csv, write_field_csv

log = logging.getLogger("ssdg")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

SOLUTION_TYPES = ("fls", "cosh", "plane_wave", "gaussian")
EXACT_RESIDUAL = 1e-9


class Section:
    """A dict from the config plus its dotted path and the raw text, for located errors."""

    def __init__(self, data, path: str, text: str):
        if not isinstance(data, dict):
            raise ConfigError("expected an object", field=path or "<root>", line=_line_of(text, path))
        self.data = data
        self.path = path
        self.text = text
        self.base_dir = Path(".")

    def _where(self, key):
        full = f"{self.path}.{key}" if self.path else key
        return full, _line_of(self.text, full)

    def has(self, key) -> bool:
        return key in self.data

    def section(self, key, required=True) -> Optional["Section"]:
        if key not in self.data:
            if required:
                full, line = self._where(key)
                raise ConfigError("missing section", field=full, line=line)
            return None
        full, _ = self._where(key)
        return Section(self.data[key], full, self.text)

    def get(self, key, kind=float, default: Any = ..., check=None, msg=""):
        full, line = self._where(key)
        if key not in self.data:
            if default is ...:
                raise ConfigError("missing field", field=full, line=line)
            return default
        raw = self.data[key]
        try:
            if kind is float:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)):
                    raise TypeError
                val = float(raw)
                if not math.isfinite(val):
                    raise TypeError
            elif kind is int:
                if isinstance(raw, bool) or not isinstance(raw, (int, float)) or int(raw) != raw:
                    raise TypeError
                val = int(raw)
            elif kind is bool:
                if not isinstance(raw, bool):
                    raise TypeError
                val = raw
            elif kind is str:
                if not isinstance(raw, str):
                    raise TypeError
                val = raw
            else:
                val = kind(raw)
        except (TypeError, ValueError):
            name = getattr(kind, "__name__", str(kind))
            raise ConfigError(f"expected {name}, got {raw!r}", field=full, line=line) from None
        if check is not None and not check(val):
            raise ConfigError(msg or f"invalid value {raw!r}", field=full, line=line)
        return val

    def fail(self, key, message):
        full, line = self._where(key)
        raise ConfigError(message, field=full, line=line)


def _line_of(text: str, dotted: str) -> Optional[int]:
    """Line of the last key in ``dotted``, found by scanning keys in order."""
    if not dotted:
        return None
    pos = 0
    idx = -1
    for key in dotted.split("."):
        idx = text.find(f'"{key}"', pos)
        if idx < 0:
            return None
        pos = idx + 1
    return text.count("\n", 0, idx) + 1


def load_config(path) -> Section:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    root = Section(data, "", text)
    root.base_dir = path.parent
    return root


def parse_coefficients(root: Section) -> cf.NonlinearCoeffs:
    sec = root.section("coefficients")
    forms = [k for k in ("lambda", "c", "simpl") if sec.has(k)]
    if len(forms) != 1:
        sec.fail(forms[1] if len(forms) > 1 else "lambda",
                 "give exactly one of 'lambda', 'c' or 'simpl'")
    form = forms[0]
    D = sec.get("D", default=0.0, check=lambda v: v >= 0, msg="D must be >= 0")
    Dtilde = sec.get("Dtilde", default=1.0)
    if form == "simpl":
        if sec.has("D") or sec.has("Dtilde"):
            sec.fail("simpl", "'simpl' fixes D = 0 and Dtilde = 1; drop D/Dtilde")
        return cf.NonlinearCoeffs.simpl(sec.get("simpl"))
    vals = sec.data[form]
    if not (isinstance(vals, list) and len(vals) == 5 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v) for v in vals)):
        sec.fail(form, "expected a list of 5 finite numbers")
    vals = [float(v) for v in vals]
    if form == "lambda":
        return cf.NonlinearCoeffs.from_lambdas(vals, D=D, Dtilde=Dtilde)
    return cf.NonlinearCoeffs.from_c(cf.CCoeffs(*vals), D=D, Dtilde=Dtilde)


def parse_grid(root: Section):
    sec = root.section("grid")
    x_min = sec.get("x_min")
    x_max = sec.get("x_max", check=lambda v: v > x_min, msg="x_max must exceed x_min")
    n = sec.get("n", int, check=lambda v: v >= 8, msg="n must be an integer >= 8")
    return make_grid(x_min, x_max, n)


def build_solution(root: Section, coeffs: cf.NonlinearCoeffs):
    """Construct the analytic solution. Constructor rejections propagate as SSDGError."""
    sec = root.section("solution")
    kind = sec.get("type", str, check=lambda v: v in SOLUTION_TYPES,
                   msg=f"type must be one of {SOLUTION_TYPES}")
    k = sec.get("k", default=0.0)
    x0 = sec.get("x0", default=0.0)
    normalize = sec.get("normalize", bool, default=False)
    p = cf.derive_params(coeffs)
    if kind == "fls":
        return analytic.build_fls(k, sec.get("gamma_tilde"), p, x0=x0, normalize=normalize)
    if kind == "cosh":
        return analytic.build_cosh_soliton(k, sec.get("beta"), p, x0=x0, normalize=normalize)
    if kind == "plane_wave":
        return analytic.build_plane_wave(k, p)
    return analytic.build_free_gaussian(sec.get("s0"), k=k, x0=x0)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _write_json(out: Path, name: str, payload) -> Path:
    path = out / name
    path.write_text(json.dumps(_jsonable(payload), indent=2) + "\n")
    return path


def _solution_meta(sol) -> dict:
    meta = {"kind": type(sol).__name__}
    if isinstance(sol, analytic.FlsSolution1D):
        meta.update(asdict(sol.params), x0=sol.x0, normalization=sol.normalization,
                    half_width=sol.half_width)
    elif isinstance(sol, (analytic.CoshSoliton, analytic.PlaneWave, analytic.FreeGaussian)):
        meta.update(asdict(sol))
    return meta


# -- subcommands ------------------------------------------------------------------


def cmd_classify(root: Section, out: Path) -> dict:
    coeffs = parse_coefficients(root)
    p = cf.derive_params(coeffs)
    report: dict = {"coefficients": asdict(coeffs), "c": asdict(coeffs.to_c()), "derived": asdict(p)}
    linear = coeffs.Dtilde == 0 or all(v == 0 for v in coeffs.lambdas)
    linear = linear and coeffs.D == 0
    report["linear_schrodinger"] = linear
    report["galilean"] = cf.check_galilean(p)
    report["fls_branch"] = cf.fls_admissible(p.sigma, p.xi)
    try:
        alpha, delta = cf.exponents(p.sigma, p.xi)
        report["alpha"], report["delta"] = alpha, delta
    except ZeroDivisionError:
        report["alpha"] = report["delta"] = None

    sec = root.section("classify", required=False)
    sol_sec = root.section("solution", required=False)
    gamma_sq = None
    k = 0.0
    if sec is not None:
        k = sec.get("k", default=0.0)
        if sec.has("gamma_sq"):
            gamma_sq = sec.get("gamma_sq")
    if gamma_sq is None and sol_sec is not None:
        kind = sol_sec.get("type", str, default="")
        k = sol_sec.get("k", default=k)
        if kind == "fls":
            kappa = cf.drift_kappa(k, p)
            gamma_sq = sol_sec.get("gamma_tilde") ** 2 + kappa ** 2
        elif kind == "cosh":
            gamma_sq = -sol_sec.get("beta") ** 2
        elif kind == "plane_wave":
            gamma_sq = 0.0
    if gamma_sq is not None:
        kappa = cf.drift_kappa(k, p)
        report.update(k=k, gamma_sq=gamma_sq, kappa=kappa, regime=cf.classify_regime(gamma_sq, kappa))
        if report["alpha"] is not None:
            report["omega"] = cf.soliton_params(k, gamma_sq, p).omega
    report["ngt_invariants"] = asdict(cf.ngt_invariants(coeffs)) if cf.is_simpl_family(coeffs) else None

    if linear:
        print("linear Schrodinger equation (nonlinearity switched off)")
    d = report["derived"]
    print("sigma={sigma:.6g} xi={xi:.6g} eta={eta:.6g} mu={mu:.6g} nu={nu:.6g}".format(**d))
    print(f"galilean={report['galilean']} branch={report['fls_branch'].value}")
    if "regime" in report:
        print(f"gamma^2={report['gamma_sq']:.6g} kappa={report['kappa']:.6g} regime={report['regime'].value}")
    if report["ngt_invariants"] is not None:
        print("ngt invariants " + " ".join(f"{k_}={v}" for k_, v in report["ngt_invariants"].items()))
    _write_json(out, "classify.json", report)
    return report


def cmd_analytic(root: Section, out: Path) -> dict:
    coeffs = parse_coefficients(root)
    grid = parse_grid(root)
    sol = build_solution(root, coeffs)
    times = root.data.get("times", [0.0])
    if not (isinstance(times, list) and times and all(
            isinstance(t, (int, float)) and not isinstance(t, bool) for t in times)):
        root.fail("times", "expected a non-empty list of numbers")
    files = []
    for i, t in enumerate(times):
        fld = analytic.sample(sol, grid, float(t))
        name = f"snapshot_{i:03d}.csv"
        write_field_csv(out / name, fld)
        files.append({"file": name, "t": float(t)})
    meta = {"solution": _solution_meta(sol), "grid": asdict(grid), "snapshots": files}
    if isinstance(sol, analytic.FlsSolution1D):
        meta["support"] = [list(sol.support(float(t))) for t in times]
    _write_json(out, "analytic.json", meta)
    print(f"wrote {len(files)} snapshot(s) of {type(sol).__name__}")
    return meta


def cmd_residual(root: Section, out: Path) -> dict:
    coeffs = parse_coefficients(root)
    grid = parse_grid(root)
    sol = build_solution(root, coeffs)
    sec = root.section("residual", required=False) or Section({}, "residual", root.text)
    default_scheme = "spectral" if isinstance(sol, analytic.PlaneWave) else "fd"
    scheme = sec.get("scheme", str, default=default_scheme, check=lambda v: v in DERIV_SCHEMES,
                     msg=f"scheme must be one of {DERIV_SCHEMES}")
    thr = sec.get("interior_threshold", default=1e-3, check=lambda v: 0 < v < 1,
                  msg="interior_threshold must lie in (0, 1)")
    t = sec.get("t", default=0.0)
    floor = sec.get("floor", default=DEFAULT_FLOOR, check=lambda v: v >= 0)
    reports = []
    for factor in (1, 2, 4):
        g = make_grid(grid.x_min, grid.x_max, grid.n * factor)
        reports.append(diagnostics.pde_residual(sol, t, g, coeffs, interior_threshold=thr,
                                                scheme=scheme, floor=floor))
    errs = [r.max_interior for r in reports]
    scale = max(1.0, float(np.max(np.abs(analytic.sample(sol, grid, t).values))))
    if max(errs) <= EXACT_RESIDUAL * scale:
        order: Any = "exact"
    else:
        order = diagnostics.convergence_order([r.dx for r in reports], errs)
    report = {"scheme": scheme, "t": t, "reports": [asdict(r) for r in reports], "order": order}
    for r in reports:
        print(f"n={r.n:6d} dx={r.dx:.4g} max_residual={r.max_interior:.3e} excluded={r.boundary_excluded_points}")
    print(f"order={order if isinstance(order, str) else format(order, '.3f')}")
    _write_json(out, "residual.json", report)
    return report


def parse_propagation(root: Section, grid) -> tuple:
    sec = root.section("propagation")
    T = sec.get("T", check=lambda v: v > 0, msg="T must be > 0")
    scheme = sec.get("scheme", str, default="RK4-FD", check=lambda v: v in propagator.SCHEMES,
                     msg=f"scheme must be one of {propagator.SCHEMES}")
    limit = propagator.stability_limit(grid, scheme)
    raw_dt = sec.data.get("dt", "auto")
    if raw_dt == "auto":
        dt = 0.5 * limit
    else:
        dt = sec.get("dt", check=lambda v: v > 0, msg="dt must be > 0 or \"auto\"")
        if dt > limit:
            sec.fail("dt", f"dt={dt:g} exceeds the {scheme} stability limit {limit:g}; refusing to start")
    cfg = propagator.PropagatorConfig(
        dt=dt,
        scheme=scheme,
        density_floor=sec.get("density_floor", default=DEFAULT_FLOOR, check=lambda v: v >= 0),
        record_every=sec.get("record_every", int, default=1, check=lambda v: v >= 1),
        derivative_scheme=sec.get("derivative_scheme", str, default="fd",
                                  check=lambda v: v in DERIV_SCHEMES),
        perturbation=sec.get("perturbation", default=0.0, check=lambda v: v >= 0),
        mollify_width=sec.get("mollify_width", default=0.0, check=lambda v: v >= 0),
        seed=sec.get("seed", int, default=None),
    )
    write_snapshots = sec.get("write_snapshots", bool, default=True)
    return T, cfg, write_snapshots


def _spreading_fit(record, sol: analytic.FreeGaussian) -> dict:
    """Fit width^2 = A + B t^2 and compare B with the free-spreading value 1/(4 s0^2)."""
    t = np.asarray(record.times)
    w2 = record.diagnostics["width"] ** 2
    B, A = np.polyfit(t ** 2, w2, 1)
    expected = 1.0 / (4.0 * sol.s0 ** 2)
    return {"A": float(A), "B": float(B), "B_expected": expected, "rel_error": abs(B - expected) / expected}


def cmd_evolve(root: Section, out: Path) -> dict:
    coeffs = parse_coefficients(root)
    grid = parse_grid(root)
    T, cfg, write_snapshots = parse_propagation(root, grid)
    sol = build_solution(root, coeffs)
    reference = sol
    if isinstance(sol, analytic.FreeGaussian) and any(v != 0 for v in coeffs.lambdas) and coeffs.Dtilde != 0:
        log.warning("free Gaussian reference is exact only for zero nonlinearity; overlap column disabled")
        reference = None
    initial = analytic.sample(sol, grid, 0.0)
    record = propagator.run(initial, coeffs, T, cfg, reference=reference)

    with (out / "diagnostics.csv").open("w") as fh:
        fh.write("t,norm,centroid,width,l2_error_vs_analytic\n")
        for row in record.rows():
            fh.write(",".join(repr(v) for v in row.values()) + "\n")
    if write_snapshots:
        for i, (t, fld) in enumerate(zip(record.times, record.snapshots)):
            write_field_csv(out / f"snapshot_{i:04d}.csv", fld)

    d = record.diagnostics
    n0 = d["norm"][0]
    times = np.asarray(record.times)
    summary = {
        "scheme": cfg.scheme,
        "dt": cfg.dt,
        "steps": int(round(T / cfg.dt)),
        "t_final": float(times[-1]),
        "final_overlap_error": float(d["l2_error_vs_analytic"][-1]),
        "max_overlap_error": float(np.nanmax(d["l2_error_vs_analytic"])) if reference is not None else None,
        "norm_drift": float(np.max(np.abs(d["norm"] - n0)) / n0),
        "centroid_velocity": float(np.polyfit(times, d["centroid"], 1)[0]) if times.size > 1 else None,
        "k": getattr(sol, "k", None),
    }
    if isinstance(sol, analytic.FreeGaussian):
        summary["spreading_fit"] = _spreading_fit(record, sol)
    print(f"{cfg.scheme}: {summary['steps']} steps, dt={cfg.dt:.4g}")
    print(f"final overlap error={summary['final_overlap_error']:.3e} norm drift={summary['norm_drift']:.3e} "
          f"centroid velocity={summary['centroid_velocity']:.6g}")
    if "spreading_fit" in summary:
        print(f"spreading fit rel. error={summary['spreading_fit']['rel_error']:.3e}")
    _write_json(out, "summary.json", summary)
    return summary


def _parse_z(sec: Section) -> complex:
    raw = sec.data.get("z")
    full, line = sec._where("z")
    if raw is None:
        raise ConfigError("missing field", field=full, line=line)
    try:
        if isinstance(raw, list) and len(raw) == 2:
            return complex(float(raw[0]), float(raw[1]))
        if isinstance(raw, (int, float)) and not isinstance(raw, bool):
            return complex(raw)
        if isinstance(raw, str):
            return complex(raw.replace(" ", ""))
    except (TypeError, ValueError):
        pass
    raise ConfigError(f"expected [re, im], a number or a complex string like \"0.5j\", got {raw!r}",
                      field=full, line=line)


def cmd_gauge(root: Section, out: Path) -> dict:
    sec = root.section("gauge")
    xf = gauge.GaugeTransform(_parse_z(sec))
    floor = sec.get("floor", default=DEFAULT_FLOOR, check=lambda v: v >= 0)
    source = sec.get("source", str, default="analytic")
    x_col = None
    if source == "analytic":
        coeffs = parse_coefficients(root)
        grid = parse_grid(root)
        sol = build_solution(root, coeffs)
        fld = analytic.sample(sol, grid, sec.get("t", default=0.0))
    else:
        path = Path(source)
        if not path.is_absolute():
            path = root.base_dir / path
        if not path.exists():
            sec.fail("source", f"no such file: {path}")
        try:
            fld, x_col = read_field_csv(path)
        except ValueError as exc:
            sec.fail("source", str(exc))
    res = gauge.apply_ngt(fld, xf, floor=floor)
    write_field_csv(out / "gauge.csv", res, x=x_col)
    amp = np.abs(fld.values)
    dev = float(np.max(np.abs(np.abs(res.values) - amp)[res.rho > 0])) if np.any(res.rho > 0) else 0.0
    rel = dev / float(amp.max())
    report = {"z": xf.z, "a": xf.a, "b": xf.b, "floor": floor, "source": source,
              "modulus_max_rel_deviation": rel, "modulus_preserved": rel <= 1e-12}
    print(f"z={xf.z} modulus max rel. deviation={rel:.3e} ({'ok' if rel <= 1e-12 else 'FAILED'})")
    _write_json(out, "gauge.json", report)
    return report


COMMANDS = {
    "classify": cmd_classify,
    "analytic": cmd_analytic,
    "residual": cmd_residual,
    "evolve": cmd_evolve,
    "gauge": cmd_gauge,
}


def run_one(command: str, config: str, out: str) -> int:
    """Run a single subcommand; returns the exit code."""
    try:
        root = load_config(config)
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        COMMANDS[command](root, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SSDGError, ArithmeticError, ValueError) as exc:
        stamp = f" at t={exc.time:.6g}" if getattr(exc, "time", None) is not None else ""
        print(f"numerical failure{stamp}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def _sweep_job(args):
    command, config, out = args
    return config, run_one(command, config, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssdg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        src = sp.add_mutually_exclusive_group(required=True)
        src.add_argument("--config", metavar="PATH")
        src.add_argument("--sweep", metavar="PATH", nargs="+",
                         help="run several configs concurrently, each into OUT/<config stem>")
        sp.add_argument("--out", metavar="DIR", required=True)
        sp.add_argument("--jobs", type=int, default=None, help="worker processes for --sweep")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.config is not None:
        return run_one(args.command, args.config, args.out)
    jobs = [(args.command, c, str(Path(args.out) / Path(c).stem)) for c in args.sweep]
    codes = []
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        for config, code in pool.map(_sweep_job, jobs):
            print(f"[{config}] exit {code}")
            codes.append(code)
    return max(codes)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
