#!/usr/bin/env python3
"""Benchmark the compiled stencil kernels against the numpy fallback.

Times the three hot kernels on representative grids and a full barotropic
step at 128^2 under each backend.  Run after installing the package:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from surfcalc._kernels import get_backend


def _time(fn, repeats=200):
    fn()  # warm up
    best = np.inf
    for _ in range(5):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def bench_kernels():
    backends = {}
    for name in ("numpy", "compiled"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name!r} unavailable, skipping")
    sizes = (33, 65, 129, 257)
    print(f"{'kernel':<28}{'n':>6}" + "".join(f"{b:>14}" for b in backends)
          + f"{'speedup':>10}")
    for n in sizes:
        f = np.sin(np.linspace(0, 4, n))[:, None] * np.cos(np.linspace(0, 5, n - 1))
        a = 1.0 + 0.1 * f
        rows = {
            "diff1 axis0 order2": lambda b: b.diff1(f, 0, 0.01),
            "diff1 axis1 periodic": lambda b: b.diff1(f, 1, 0.01, 2, True),
            "diff1 axis0 order4": lambda b: b.diff1(f, 0, 0.01, 4),
            "compact_flux_div axis0": lambda b: b.compact_flux_div(a, f, 0, 0.01),
            "pairwise_sum": lambda b: b.pairwise_sum(f.ravel()),
        }
        for label, call in rows.items():
            times = {name: _time(lambda impl=impl: call(impl))
                     for name, impl in backends.items()}
            speed = (times.get("numpy", np.nan) / times["compiled"]
                     if "compiled" in times else np.nan)
            cells = "".join(f"{1e6 * times[name]:>12.1f}us" for name in backends)
            print(f"{label:<28}{n:>6}" + cells + f"{speed:>9.1f}x")


def bench_solver_step():
    import os

    print("\nfull barotropic step, 128^2 grid:")
    for name in ("numpy", "compiled"):
        os.environ["SURFCALC_BACKEND"] = name
        # re-import under the requested backend in a clean namespace
        import importlib
        import surfcalc
        import surfcalc._kernels
        importlib.reload(surfcalc._kernels)
        from surfcalc import solver as sv
        importlib.reload(sv)
        import surfcalc.flowmap as fm
        from surfcalc.constitutive import pressure_quadratic
        from surfcalc.domain import Grid
        from surfcalc.geometry import SurfaceGeometry

        surf = fm.flat_disk()
        grid = Grid(surf.domain, 128)
        geo = SurfaceGeometry(surf.spec, grid, 0.0)
        rho = 1.0 + 1e-3 * np.exp(-((np.hypot(geo.x[0], geo.x[1]) - 0.6) / 0.15) ** 2)
        state = sv.FluidState(rho=rho, v=np.zeros((3,) + grid.shape))
        press = pressure_quadratic()
        dt = sv.stable_dt_barotropic(state, geo, press)

        def step():
            sv.step_tangential_barotropic(state, geo, press, dt, check_cfl=False)

        t = _time(step, repeats=20)
        print(f"  {name:<10}{1e3 * t:>10.2f} ms/step")
    os.environ.pop("SURFCALC_BACKEND", None)


if __name__ == "__main__":
    bench_kernels()
    bench_solver_step()
