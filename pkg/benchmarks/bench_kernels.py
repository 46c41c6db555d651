"""Time the compiled kernels against the numpy reference.

Usage: python benchmarks/bench_kernels.py [--n 256] [--repeat 20]
"""

import argparse
import timeit

import numpy as np

from nsac import kernels


def _inputs(n, rng):
    h = 1.0 / n
    Up = rng.standard_normal((n + 2, n + 2))
    Vp = rng.standard_normal((n + 2, n + 2))
    Cp = np.tanh(rng.standard_normal((n + 2, n + 2)))
    Lp = rng.standard_normal((n + 2, n + 2))
    Np = 0.1 + rng.random((n + 2, n + 2))
    t = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    pts = rng.random((n * n // 4, 2))
    return h, Up, Vp, Cp, Lp, Np, np.cos(t), np.sin(t), pts


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=256)
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    h, Up, Vp, Cp, Lp, Np, cx, cy, pts = _inputs(args.n, rng)
    try:
        backends = {"python": kernels.get_backend("python"), "cython": kernels.get_backend("cython")}
    except ImportError:
        backends = {"python": kernels.get_backend("python")}
        print("compiled extension not available; timing the numpy path only")
    cases = {
        "momentum_rhs": lambda k: k.momentum_rhs(Up, Vp, Cp, Lp, Np, h, 0.02),
        "flux_divergence": lambda k: k.flux_divergence(Cp, Up, Vp, h),
        "polyline_nearest": lambda k: k.polyline_nearest(pts[:, 0], pts[:, 1], cx, cy),
    }
    print(f"{'kernel':<18}" + "".join(f"{b:>14}" for b in backends) + "   speedup")
    for name, fn in cases.items():
        times = {}
        for b, mod in backends.items():
            times[b] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) * 1e3
        line = f"{name:<18}" + "".join(f"{times[b]:>11.3f} ms" for b in backends)
        if "cython" in times:
            line += f"   {times['python'] / times['cython']:.1f}x"
        print(line)


if __name__ == "__main__":
    main()
