#!/usr/bin/env python3
"""Benchmark the compiled kernels against the NumPy fallback.

Times the four hot element kernels and one full staggered step per mesh
size, printing a table with the speedup.  Usage:

    python3 benchmarks/bench_kernels.py [--sizes 16 32 64] [--repeat 5]
"""

import argparse
import time

import numpy as np

from pffrac.fem_core import build_structured_mesh
from pffrac.kernels import _numpy as knp

try:
    from pffrac.kernels import _fast as kfast
except ImportError:
    kfast = None


def best_of(repeat, fn, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(n, repeat):
    mesh = build_structured_mesh(n, n, 1.0, 1.0)
    rng = np.random.default_rng(0)
    u = rng.standard_normal(2 * mesh.n_nodes)
    hbar = rng.uniform(0.1, 1.1, mesh.n_tris)
    strains = knp.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y)

    cases = {
        "strains": lambda k: k.element_strains(u, mesh.tris, mesh.grad_x, mesh.grad_y),
        "residual": lambda k: k.residual_u(strains, hbar, mesh.areas, mesh.tris,
                                           mesh.grad_x, mesh.grad_y, 1.0, 1.0, mesh.n_nodes),
        "tangent": lambda k: k.tangent_values(strains, hbar, mesh.areas,
                                              mesh.grad_x, mesh.grad_y, 1.0, 1.0),
        "energy": lambda k: k.elastic_energy(strains, hbar, mesh.areas, 1.0, 1.0),
    }
    rows = []
    for name, fn in cases.items():
        t_np = best_of(repeat, fn, knp)
        t_cy = best_of(repeat, fn, kfast) if kfast else float("nan")
        rows.append((f"{name} ({mesh.n_tris} tris)", t_np, t_cy))
    return rows


def bench_step(n, repeat):
    from pffrac.evolution import EvolutionConfig, LinearDrive, prepare_initial_state, staggered_step
    from pffrac.tensor_mech import default_material

    import pffrac.kernels as kern

    mesh = build_structured_mesh(n, n, 1.0, 1.0,
                                 dirichlet=lambda x, y: y < 1e-12 or y > 1 - 1e-12)
    prof = np.zeros(2 * mesh.n_nodes)
    prof[0::2] = mesh.nodes[:, 1]
    cfg = EvolutionConfig(mesh=mesh, material=default_material(),
                          boundary=LinearDrive(prof, rate=2.0), T=1.0, steps=10, delta=0.05)
    u0, z0 = prepare_initial_state(cfg, np.ones(mesh.n_nodes))

    results = {}
    backends = [("numpy", knp)] + ([("fast", kfast)] if kfast else [])
    for label, impl in backends:
        saved = {name: getattr(kern, name) for name in
                 ("element_strains", "elastic_state", "scatter_vertex",
                  "residual_u", "tangent_values", "elastic_energy")}
        for name in saved:
            setattr(kern, name, getattr(impl, name))
        try:
            results[label] = best_of(repeat, staggered_step, u0, z0, cfg.tau, cfg)
        finally:
            for name, fn in saved.items():
                setattr(kern, name, fn)
    return [(f"staggered step ({mesh.n_tris} tris)",
             results["numpy"], results.get("fast", float("nan")))]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[16, 32, 64])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if kfast is None:
        print("note: compiled kernels not built (python3 setup.py build_ext --inplace)")
    print(f"{'case':<34} {'numpy':>12} {'compiled':>12} {'speedup':>9}")
    for n in args.sizes:
        for name, t_np, t_cy in bench_kernels(n, args.repeat) + bench_step(n, args.repeat):
            ratio = t_np / t_cy if t_cy == t_cy and t_cy > 0 else float("nan")
            print(f"{name:<34} {t_np * 1e3:>10.3f}ms {t_cy * 1e3:>10.3f}ms {ratio:>8.2f}x")


if __name__ == "__main__":
    main()
