#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the p-energy gradient evaluation and the full discrete modulus
solve under both backends and prints a comparison table.

Usage: python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from pmoduli._kernels import get_backend
from pmoduli.moduli import RingSpec
from pmoduli.discrete import Grid, sample_joining_curves
from pmoduli.discrete.capacity import _setup, _warm_start
import pmoduli.discrete.modulus as modmod


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_energy_grad(backend, dim, cells, p, repeat):
    ring = RingSpec(dim=dim, center=(0.0,) * dim, r1=1.0, r2=2.0)
    grid = Grid.around((0.0,) * dim, 2.6, cells)
    u, free, inv, dist = _setup(grid, ring, "cut")
    u = _warm_start(u, free, dist, ring, dim, p)
    free_u8 = free.astype(np.uint8)

    def run():
        backend.capacity_energy_grad(u, inv, free_u8, grid.shape,
                                     grid.cell_volume, p, 1e-12)

    return _time(run, repeat)


def bench_modulus(backend_name, cells, count, repeat):
    ring = RingSpec(dim=2, center=(0.0, 0.0), r1=1.0, r2=2.0)
    grid = Grid.around((0.0, 0.0), 2.6, cells)
    family = sample_joining_curves(ring, grid, count)
    original = modmod.get_backend

    def run():
        modmod.get_backend = lambda n=None: get_backend(backend_name)
        try:
            modmod.discrete_p_module(grid, family, 2.0)
        finally:
            modmod.get_backend = original

    return _time(run, repeat)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = {"python": get_backend("python")}
    try:
        backends["cython"] = get_backend("cython")
    except Exception:
        print("compiled extension unavailable; benchmarking fallback only")
    rows = []
    for name, backend in backends.items():
        rows.append((f"energy+grad 2D 256^2 (p=2) [{name}]",
                     bench_energy_grad(backend, 2, 256, 2.0, args.repeat)))
        rows.append((f"energy+grad 3D 48^3 (p=2) [{name}]",
                     bench_energy_grad(backend, 3, 48, 2.0, args.repeat)))
    for name in backends:
        rows.append((f"modulus solve 128^2, 256 curves [{name}]",
                     bench_modulus(name, 128, 256, args.repeat)))
    width = max(len(r[0]) for r in rows)
    print(f"{'kernel benchmark':<{width}}  best time")
    print("-" * (width + 12))
    for label, t in rows:
        print(f"{label:<{width}}  {t * 1000:9.2f} ms")
    if "cython" in backends:
        print("\nspeedups (python / cython):")
        labels = [r[0].rsplit(" [", 1)[0] for r in rows]
        times = {r[0]: r[1] for r in rows}
        for base in dict.fromkeys(labels):
            py = times.get(f"{base} [python]")
            cy = times.get(f"{base} [cython]")
            if py and cy:
                print(f"  {base}: {py / cy:.2f}x")


if __name__ == "__main__":
    main()
