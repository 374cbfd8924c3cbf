"""Time the numba and numpy flavours of the hot loops side by side.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 20000]

The numba column excludes compilation (one warm-up call first).  Both
flavours are imported directly, so TRICOMI_DISABLE_NUMBA does not matter here.
"""
import argparse
import time

import numpy as np

from tricomi import _accel, _kernels
from tricomi.bump import profile_polynomial
from tricomi.specfun import _series_coefficients


def best_of(fn, args, repeat):
    fn(*args)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def cases(size, rng):
    w = 0.8 * np.sqrt(rng.uniform(0, 1, size)) * np.exp(2j * np.pi * rng.uniform(0, 1, size))
    coefs = np.ascontiguousarray(_series_coefficients(0.3, 0.7, 1.9, 400), dtype=np.complex128)
    yield "power_series", (coefs, np.ascontiguousarray(w), 1e-16)

    m = max(1, size // 20)
    start = np.full(m, 0.5 + 0j)
    # F(0.3, 0.7; 1.9; z) and its derivative at z = 1/2 from the plain series
    f0, _ = _kernels._power_series_np(coefs, start, 1e-16)
    dcoefs = np.ascontiguousarray(coefs[1:] * np.arange(1, coefs.size), dtype=np.complex128)
    df0, _ = _kernels._power_series_np(dcoefs, start, 1e-16)
    target = np.ascontiguousarray(0.5 + 0.6 * np.exp(1j * rng.uniform(0.3, 2.8, m)))
    yield "taylor_path", (0.3, 0.7, 1.9, start, f0, df0, target, 1e-17, 200)

    s = np.ascontiguousarray(rng.uniform(-1.1, 1.1, size * 10))
    yield "bump_profile", (s, np.array(profile_polynomial(2), dtype=float), 2)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--size", type=int, default=20000)
    args = parser.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy flavour can run")
        return
    rng = np.random.default_rng(7)
    print(f"{'kernel':<14}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}{'max diff':>12}")
    for name, case in cases(args.size, rng):
        t_np = best_of(_kernels.NUMPY[name], case, args.repeat)
        t_nb = best_of(_kernels.NUMBA[name], case, args.repeat)
        a, b = _kernels.NUMPY[name](*case), _kernels.NUMBA[name](*case)
        a, b = (a[0], b[0]) if isinstance(a, tuple) else (a, b)
        diff = np.max(np.abs(a - b) / np.maximum(1.0, np.abs(a)))
        print(f"{name:<14}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>12.1e}")


if __name__ == "__main__":
    main()
