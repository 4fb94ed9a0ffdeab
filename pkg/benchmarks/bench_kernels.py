"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py --n 2500 --repeat 3
"""

import argparse
import time

import numpy as np

from linegeom import kernels


def sweep_points(n, rng):
    side = int(round(np.sqrt(n)))
    L, C = np.meshgrid(np.linspace(0.01, 1, side), np.linspace(0.01, 1, side), indexing="ij")
    pts = np.column_stack([L.ravel(), C.ravel(), np.full(L.size, 1e-6)])
    return pts, rng.uniform([1e-3, 1e-3], [1.0, 1.0], size=(pts.shape[0], 2))


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2500, help="grid points (rounded to a square)")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--omega", type=float, default=1.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    lcr_pts, lr_pts = sweep_points(args.n, rng)
    backends = kernels.available_backends()
    print(f"backends available: {', '.join(backends)}")

    results = {}
    for name in backends:
        mod = kernels.backend_module(name)
        for label, kind, pts in (("lcr grid", kernels.LCR_KIND, lcr_pts),
                                 ("lr grid", kernels.LR_KIND, lr_pts)):
            t, out = best_of(lambda: mod.grid(kind, pts, args.omega), args.repeat)
            results[(name, label)] = (t, out)
            print(f"{name:>7}  {label:<9} {pts.shape[0]:6d} pts  {t * 1e3:9.2f} ms"
                  f"  {t / pts.shape[0] * 1e6:8.2f} us/pt")

    if len(backends) == 2:
        for label in ("lcr grid", "lr grid"):
            tc, oc = results[("cython", label)]
            tp, op = results[("python", label)]
            ok = np.isfinite(oc[2]) & np.isfinite(op[2])
            # R relative to the curvature scale: the LR scalar is zero
            dr = np.max(np.abs(oc[2][ok] - op[2][ok]) / op[3][ok], initial=0.0)
            fin = np.isfinite(op[1])
            dd = np.max(np.abs(oc[1][fin] - op[1][fin]) / np.abs(op[1][fin]), initial=0.0)
            same = np.array_equal(oc[4], op[4])
            print(f"{label}: speedup {tp / tc:6.1f}x, max rel diff det {dd:.1e}, "
                  f"R (scaled) {dr:.1e}, status codes identical: {same}")


if __name__ == "__main__":
    main()
