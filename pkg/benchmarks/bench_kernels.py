"""Time the numba and numpy kernels side by side.

    python benchmarks/bench_kernels.py [--n 2048] [--steps 2000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from ssdg import analytic, kernels
from ssdg.coeffs import NonlinearCoeffs, derive_params
from ssdg.fields import make_grid
from ssdg.propagator import stability_limit


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2048)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    co = NonlinearCoeffs.simpl(0.5)
    grid = make_grid(-20.0, 20.0, args.n)
    psi = analytic.sample(analytic.build_fls(1.0, 1.0, derive_params(co)), grid).values
    dt = 0.5 * stability_limit(grid, "RK4-FD")
    d1, d2 = kernels.fd_derivatives(psi, grid.dx)

    cases = {
        "omega_pointwise": lambda: kernels.omega_pointwise(psi, d1, d2, co.lambdas, co.D, co.Dtilde, 1e-12),
        "omega_psi_fd": lambda: kernels.omega_psi_fd(psi, grid.dx, co.lambdas, co.D, co.Dtilde, 1e-12),
        f"rk4_fd_advance x{args.steps}": lambda: kernels.rk4_fd_advance(
            psi, grid.dx, dt, args.steps, co.lambdas, co.D, co.Dtilde, 1e-12),
    }
    backends = kernels.available_backends()
    results = {}
    for backend in backends:
        with kernels.use_backend(backend):
            for name, fn in cases.items():
                fn()  # warm-up / JIT compile
                results[backend, name] = best_of(fn, args.repeat)

    print(f"n={args.n}, best of {args.repeat}")
    print(f"{'kernel':28s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name in cases:
        row = f"{name:28s}" + "".join(f"{results[b, name] * 1e3:10.3f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{results['numpy', name] / results['numba', name]:11.1f}x"
        print(row)
    if len(backends) > 1:
        with kernels.use_backend("numpy"):
            ref = kernels.rk4_fd_advance(psi, grid.dx, dt, 200, co.lambdas, co.D, co.Dtilde, 1e-12)[0]
        with kernels.use_backend("numba"):
            got = kernels.rk4_fd_advance(psi, grid.dx, dt, 200, co.lambdas, co.D, co.Dtilde, 1e-12)[0]
        print(f"max |numba - numpy| after 200 RK4 steps: {np.max(np.abs(got - ref)):.2e}")


if __name__ == "__main__":
    main()
