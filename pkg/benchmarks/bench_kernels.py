#!/usr/bin/env python3
"""Benchmark the compiled flow kernel against the pure-Python fallback.

Times the flow phase (network build excluded) on default-shaped scenarios
over a ladder of user counts, for both augmenting-path searches and both
network forms.  The pure-Python reference search on the split network is
skipped above --python-cap users unless --full is given (it is the slow
combination the compiled kernel exists for).

Usage: python benchmarks/bench_kernels.py [--sizes 25,50,100] [--repeats 3]
"""

import argparse
import time

from pcdnsched import kernels
from pcdnsched.flow import build_network, solve_mcmf
from pcdnsched.scengen import GenConfig, generate

COMBOS = (
    ("bellman-ford", False),
    ("bellman-ford", True),
    ("dijkstra", False),
    ("dijkstra", True),
)


def time_solve(network, method, backend, repeats):
    best = None
    objective = None
    for _ in range(repeats):
        start = time.perf_counter()
        solution = solve_mcmf(network, method=method, backend=backend)
        elapsed = time.perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
        objective = solution.objective
    return best, objective


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="25,50,100")
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--python-cap", type=int, default=25,
                        help="max users for python bellman-ford on the "
                             "split network (see --full)")
    parser.add_argument("--full", action="store_true",
                        help="run every combination at every size")
    args = parser.parse_args()

    sizes = [int(s) for s in args.sizes.split(",")]
    backends = kernels.available_backends()
    print(f"kernel backends: {', '.join(backends)} "
          f"(default: {kernels.DEFAULT_BACKEND})")
    header = f"{'users':>6} {'method':>13} {'agg':>5} {'backend':>9} " \
             f"{'ms':>10} {'objective':>10}"
    print(header)
    print("-" * len(header))

    for users in sizes:
        config = GenConfig(users=users, seed=args.seed)
        scenario = generate(config)
        objectives = set()
        for method, aggregate in COMBOS:
            network = build_network(scenario, aggregate=aggregate)
            for backend in backends:
                if (backend == "python" and method == "bellman-ford"
                        and not aggregate and users > args.python_cap
                        and not args.full):
                    print(f"{users:>6} {method:>13} {aggregate!s:>5} "
                          f"{backend:>9} {'skipped':>10}")
                    continue
                elapsed, objective = time_solve(network, method, backend,
                                                args.repeats)
                objectives.add(objective)
                print(f"{users:>6} {method:>13} {aggregate!s:>5} "
                      f"{backend:>9} {elapsed * 1e3:>10.2f} "
                      f"{str(objective):>10}")
        if len(objectives) != 1:
            raise SystemExit(f"objective mismatch at users={users}: {objectives}")
        print()


if __name__ == "__main__":
    main()
