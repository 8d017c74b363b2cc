"""Compare the compiled and pure-Python simplex kernels.

Usage: python benchmarks/bench_simplex.py [--repeat 5]

Times ``solve_lp`` on the LPs the optimizer actually builds (random 10-node
networks, 1-3 packets, both bandwidth modes) and on random dense LPs, and
checks that both kernels agree on every objective.
"""
import argparse
import time

import numpy as np

from mia_routing.formulation import ConstraintSet, build_lp
from mia_routing.network import NetworkParams, Traffic, generate_random_network
from mia_routing.optimizer import initial_order
from mia_routing.simplex import KERNELS, from_dense, solve_lp


def routing_lps(n_seeds=5):
    out = []
    for seed in range(n_seeds):
        for mode, params in (("per-node", NetworkParams()), ("sum", NetworkParams(total_bandwidth=10))):
            net = generate_random_network(10, seed, params)
            for n in (1, 2, 3):
                tr = Traffic.single_file(20, n)
                lp, _ = build_lp(net, tr, initial_order(net, tr), constraints=ConstraintSet(mode))
                out.append((f"route N={n} {mode}", lp))
    return out


def random_lps(k=20, m=40, n=60, seed=1):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(k):
        A = rng.uniform(0, 1, (m, n))
        out.append((f"dense {m}x{n}", from_dense(-rng.uniform(0, 1, n), A_ub=A, b_ub=rng.uniform(1, 2, m))))
    return out


def bench(lps, kernel, repeat):
    best = np.inf
    objs = None
    for _ in range(repeat):
        t = time.perf_counter()
        objs = [solve_lp(lp, kernel=kernel).objective for _, lp in lps]
        best = min(best, time.perf_counter() - t)
    return best, objs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in KERNELS:
        print("compiled kernel not built; only the python kernel is available")
    for name, lps in (("routing", routing_lps()), ("dense", random_lps())):
        times = {}
        objs = {}
        for kernel in KERNELS:
            times[kernel], objs[kernel] = bench(lps, kernel, args.repeat)
        ref = objs["python"]
        for kernel, o in objs.items():
            assert np.allclose(o, ref, rtol=1e-9, atol=1e-9), f"{kernel} disagrees on {name}"
        line = f"{name:8s} {len(lps):3d} LPs  " + "  ".join(
            f"{k}: {t * 1e3 / len(lps):8.3f} ms/LP" for k, t in times.items())
        if "compiled" in times:
            line += f"  speedup x{times['python'] / times['compiled']:.1f}"
        print(line)


if __name__ == "__main__":
    main()
