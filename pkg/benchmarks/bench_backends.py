"""Time the numpy and numba implementations of each hot kernel on the same inputs.

    python benchmarks/bench_backends.py [--repeat N]

Numba compile time is excluded (one warm-up call per implementation).
"""

import argparse
import time

import numpy as np

from spinberry import kernels
from spinberry.dirac import DiracFamily, basis_bispinors
from spinberry.linalg import GAMMA, I4, SPIN_OPERATORS


def forms_case():
    fam = DiracFamily()
    grid = fam.grid()
    e = grid.energy(fam.mass)
    wts = grid.weights * fam.profile(grid.radii) ** 2 / e**2
    ops = np.stack([I4, GAMMA[0]] + list(SPIN_OPERATORS))
    return (wts, basis_bispinors(grid.nodes, fam.mass), ops), f"{len(wts)} nodes x {len(ops)} operators"


def plane_wave_case():
    rng = np.random.default_rng(0)
    fam = DiracFamily()
    grid = fam.grid()
    e = grid.energy(fam.mass)
    pts = rng.normal(size=(200, 3))
    amp = grid.weights * fam.profile(grid.radii) / e
    return (pts, 0.5, grid.nodes, e, amp, basis_bispinors(grid.nodes, fam.mass)), f"200 points x {len(e)} nodes"


def propagate_case():
    u = (np.arange(100_000) + 0.5) / 100_000
    phi = 2 * np.pi * u
    b = 0.5 * np.stack([np.sin(1.0) * np.cos(phi), np.sin(1.0) * np.sin(phi), np.full_like(phi, np.cos(1.0))], axis=1)
    return (b, 500.0 / 100_000, np.array([1.0, 0.0], dtype=complex)), "100000 steps"


CASES = {"quadrature_forms": forms_case, "plane_wave_sum": plane_wave_case, "propagate_midpoint": propagate_case}


def best_time(func, args, repeat):
    func(*args)
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    print(f"{'kernel':<20} {'size':<28} {'numpy [s]':>10} {'numba [s]':>10} {'speedup':>8}")
    for name, case in CASES.items():
        inputs, size = case()
        impls = kernels.IMPLEMENTATIONS[name]
        t_np = best_time(impls["numpy"], inputs, args.repeat)
        if "numba" in impls:
            t_nb = best_time(impls["numba"], inputs, args.repeat)
            print(f"{name:<20} {size:<28} {t_np:>10.4f} {t_nb:>10.4f} {t_np / t_nb:>8.2f}")
        else:
            print(f"{name:<20} {size:<28} {t_np:>10.4f} {'n/a':>10} {'':>8}")


if __name__ == "__main__":
    main()
