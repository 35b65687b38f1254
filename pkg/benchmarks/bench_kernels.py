"""Timing comparison of the compiled kernels against the NumPy fallback.

Run as ``python3 benchmarks/bench_kernels.py``. Reports per-call times
for the pentadiagonal solver, the orbit integrator, and the directed
Hausdorff distance at a few problem sizes.
"""

import time

import numpy as np

from elastica._kernels import _fallback

try:
    from elastica._kernels import _core
except ImportError:
    _core = None


def _time(fn, *args, repeat=20):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_pentadiagonal(mod, n):
    rng = np.random.default_rng(7)
    d = 6.0 + rng.random(n)
    l1 = -4.0 + 0.1 * rng.random(n - 1)
    u1 = -4.0 + 0.1 * rng.random(n - 1)
    l2 = 1.0 + 0.01 * rng.random(n - 2)
    u2 = 1.0 + 0.01 * rng.random(n - 2)
    rhs = rng.random((n, 2))
    return _time(mod.solve_pentadiagonal, l2, l1, d, u1, u2, rhs)


def bench_orbit(mod, n):
    return _time(mod.integrate_orbit, 1.5, 0.0, 0.0, 1.0, 0.01, n, 8)


def bench_hausdorff(mod, n):
    rng = np.random.default_rng(7)
    a = rng.random((n, 2))
    b = rng.random((n, 2))
    return _time(mod.directed_hausdorff, a, b, repeat=5)


def main():
    backends = [("fallback", _fallback)]
    if _core is not None:
        backends.insert(0, ("compiled", _core))
    cases = [
        ("pentadiagonal solve", bench_pentadiagonal, [256, 1024, 4096]),
        ("orbit integration", bench_orbit, [256, 1024, 4096]),
        ("directed hausdorff", bench_hausdorff, [128, 512, 1024]),
    ]
    for label, fn, sizes in cases:
        print(f"\n{label}")
        for n in sizes:
            row = [f"n={n:5d}"]
            times = {}
            for name, mod in backends:
                t = fn(mod, n)
                times[name] = t
                row.append(f"{name}: {1e6 * t:9.1f} us")
            if "compiled" in times:
                row.append(
                    f"speedup: {times['fallback'] / times['compiled']:.1f}x")
            print("  " + "  ".join(row))


if __name__ == "__main__":
    main()
