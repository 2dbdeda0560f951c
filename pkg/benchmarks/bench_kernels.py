"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run on the same inputs through both backends; the table shows
the best wall time of ``--repeat`` runs and the largest difference between
the two results.
"""

import argparse
import time

import numpy as np

from renormqp import kernels


def best_of(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def cases(rng):
    coeffs = rng.normal(size=41) * 0.5 ** np.arange(41) + 0j
    z = 0.2 + 1.3 * np.exp(2j * np.pi * rng.random(20_000))
    table = (rng.normal(size=(17, 41)) + 1j * rng.normal(size=(17, 41))) * 0.5 ** np.arange(41)
    theta = rng.random(20_000)
    y = rng.random(512)
    th = rng.random(512)
    omega = (np.sqrt(5) - 1) / 2
    return {
        "horner (deg 40, 2e4 pts)": lambda b: b.horner(coeffs, 0.2, z),
        "qp_eval (K=8, deg 40, 2e4 pts)": lambda b: b.qp_eval(table, 0.2, theta, z),
        "flm_orbit (512 fibres, 2e3 steps)": lambda b: b.flm_orbit(3.5, 0.01, omega, th, y, 2000, False)[0],
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(7)
    py = kernels.get_backend("python")
    try:
        cy = kernels.get_backend("cython")
    except ImportError:
        print("compiled kernels not built; only the numpy fallback is available")
        cy = None
    print(f"{'kernel':36s} {'numpy [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max diff':>10s}")
    for name, fn in cases(rng).items():
        tp, rp = best_of(lambda: fn(py), args.repeat)
        if cy is None:
            print(f"{name:36s} {tp:11.4f}")
            continue
        tc, rc = best_of(lambda: fn(cy), args.repeat)
        diff = float(np.abs(np.asarray(rp) - np.asarray(rc)).max())
        print(f"{name:36s} {tp:11.4f} {tc:11.4f} {tp / tc:8.1f} {diff:10.2e}")


if __name__ == "__main__":
    main()
