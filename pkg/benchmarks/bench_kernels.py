"""Census kernel timings: pure Python versus the compiled extension.

Workloads are the package's real shape of input: exterior points of heavy-tail
clouds at increasing n, plus one denser uniform annulus.  The graph is built
once per workload; only the clique census is timed.

    python3 benchmarks/bench_kernels.py [--repeats 3] [--t-max 3.0]
"""

import argparse
import time

import numpy as np

from tailchi import default_grid, points_outside, preset, radius_R_n, sample_cloud
from tailchi._spatial import forward_adjacency, neighbor_pairs
from tailchi import _kernels_py

try:
    from tailchi import _kernels as _kernels_c
except ImportError:
    _kernels_c = None

U = 2.0 ** -0.5  # max-norm rule threshold used throughout


def tail_points(n: int, seed: int) -> np.ndarray:
    law = preset("example_3_2")
    cloud = sample_cloud(law, n, seed)
    return points_outside(cloud, radius_R_n(law, n))


def annulus_points(m: int, seed: int) -> np.ndarray:
    gen = np.random.default_rng(seed)
    r = np.sqrt(gen.uniform(10.0 ** 2, 20.0 ** 2, m))
    phi = gen.uniform(0.0, 2.0 * np.pi, m)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def build_graph(pts: np.ndarray, t_max: float):
    ii, jj, dist = neighbor_pairs(pts, U * t_max, "linf")
    return forward_adjacency(pts.shape[0], ii, jj, dist / U)


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--t-max", type=float, default=3.0)
    ap.add_argument("--budget", type=int, default=2_000_000_000)
    args = ap.parse_args()

    grid = default_grid(args.t_max, 0.02)
    workloads = [
        ("tail n=1e4", tail_points(10_000, 1)),
        ("tail n=1e5", tail_points(100_000, 1)),
        ("tail n=1e6", tail_points(1_000_000, 1)),
        ("annulus m=1500", annulus_points(1500, 2)),
    ]

    if _kernels_c is None:
        print("compiled extension not importable; timing the pure kernel only")
    header = f"{'workload':<16}{'points':>8}{'edges':>9}{'pure ms':>10}"
    if _kernels_c is not None:
        header += f"{'compiled ms':>13}{'speedup':>9}"
    print(header)
    print("-" * len(header))

    for name, pts in workloads:
        indptr, indices, wts = build_graph(pts, args.t_max)
        run_py = lambda: _kernels_py.rips_census(indptr, indices, wts, grid,
                                                 args.budget)
        t_py = best_of(run_py, args.repeats)
        line = f"{name:<16}{pts.shape[0]:>8}{indices.shape[0]:>9}{t_py * 1e3:>10.1f}"
        if _kernels_c is not None:
            run_c = lambda: _kernels_c.rips_census(indptr, indices, wts, grid,
                                                   args.budget)
            t_c = best_of(run_c, args.repeats)
            d_py, n_py, _ = _kernels_py.rips_census(indptr, indices, wts, grid,
                                                    args.budget)
            d_c, n_c, _ = _kernels_c.rips_census(indptr, indices, wts, grid,
                                                 args.budget)
            assert n_py == n_c and np.array_equal(d_py, d_c), name
            line += f"{t_c * 1e3:>13.1f}{t_py / t_c:>9.1f}"
        print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
