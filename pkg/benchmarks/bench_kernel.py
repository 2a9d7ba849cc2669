"""Time the compiled chain kernel against the pure-Python fallback.

    python benchmarks/bench_kernel.py [--runs 200] [--agents 100]

Both kernels get the same draws; outputs are checked for equality before timing is reported.
"""

import argparse
import time

import numpy as np

from infocascade import _backend, rng
from infocascade.belief import ChoiceMode, ModelParams, TrueValue
from infocascade.sim import run_chain

CASES = [
    ModelParams(0.8, 1, ChoiceMode.DETERMINISTIC),
    ModelParams(0.8, 40, ChoiceMode.DETERMINISTIC),
    ModelParams(0.7, 20, ChoiceMode.WEIGHTED_RANDOM),
]


def time_kernel(kernel, params, draws):
    start = time.perf_counter()
    out = [run_chain(params, TrueValue.V1, d, kernel=kernel) for d in draws]
    return time.perf_counter() - start, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--agents", type=int, default=100)
    args = ap.parse_args()

    if _backend.compiled_simulate_chain is None:
        raise SystemExit("compiled kernel not available; reinstall with Cython present")

    seeds = rng.derive_seeds(0, range(args.runs))
    draws = rng.uniforms(seeds, 2 * args.agents).reshape(args.runs, args.agents, 2)
    print(f"{'case':<28}{'python s':>10}{'compiled s':>12}{'speedup':>10}")
    for params in CASES:
        t_py, out_py = time_kernel(_backend.python_simulate_chain, params, draws)
        t_c, out_c = time_kernel(_backend.compiled_simulate_chain, params, draws)
        for a, b in zip(out_py, out_c):
            for x, y in zip(a, b):
                np.testing.assert_array_equal(x, y)
        label = f"p={params.p} k={params.k} {params.mode.value}"
        print(f"{label:<28}{t_py:>10.3f}{t_c:>12.4f}{t_py / t_c:>9.0f}x")


if __name__ == "__main__":
    main()
