"""Benchmark the numba and numpy kernel lanes against each other.

Times the two hot scans on a Bell scenario: marking satisfiable parity
vectors and marking support-compatible global assignments. Lanes are
verified to agree before any timing is reported.

Usage: python benchmarks/bench_kernels.py [--parties 4] [--settings 2]
       [--repeat 5]
"""

import argparse
from time import perf_counter

import numpy as np

from amcc.csp import apply_plan, reference_plan
from amcc.kernels import available_kernels, compatible_mask, scan_satisfiable
from amcc.parity import parity_patterns
from amcc.possibilistic import _support_bool
from amcc.scenario import bell_scenario, global_size, restriction_table


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = perf_counter()
        fn()
        times.append(perf_counter() - t0)
    return min(times)


def bench_scan(scenario, repeat):
    patterns = parity_patterns(scenario)
    n_vec = 1 << scenario.n_contexts
    rows = {}
    masks = {}
    for kernel in available_kernels():
        scan_satisfiable(patterns, 0, 1, kernel=kernel)  # compile before timing
        masks[kernel] = scan_satisfiable(patterns, 0, n_vec, kernel=kernel)
        rows[kernel] = best_of(
            repeat, lambda k=kernel: scan_satisfiable(patterns, 0, n_vec, kernel=k)
        )
    reference = next(iter(masks.values()))
    for mask in masks.values():
        assert (mask == reference).all(), "kernel lanes disagree"
    return rows


def bench_compatible(scenario, repeat):
    if (len(scenario.measurements), scenario.n_contexts) == (8, 16):
        support = apply_plan(reference_plan())
    else:
        from amcc.model import uniform_model
        from amcc.possibilistic import support_of

        support = support_of(uniform_model(scenario))
    sup = _support_bool(support)
    table = restriction_table(scenario)
    ng = global_size(scenario)
    rows = {}
    masks = {}
    for kernel in available_kernels():
        compatible_mask(sup, table, 0, 1, kernel=kernel)
        masks[kernel] = compatible_mask(sup, table, 0, ng, kernel=kernel)
        rows[kernel] = best_of(
            repeat, lambda k=kernel: compatible_mask(sup, table, 0, ng, kernel=k)
        )
    reference = next(iter(masks.values()))
    for mask in masks.values():
        assert (mask == reference).all(), "kernel lanes disagree"
    return rows


def print_rows(title, rows):
    print(title)
    slowest = max(rows.values())
    for kernel, t in sorted(rows.items(), key=lambda kv: kv[1]):
        print(f"  {kernel:<6} {t * 1e3:9.3f} ms   x{slowest / t:.1f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--parties", type=int, default=4)
    parser.add_argument("--settings", type=int, default=2)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    scenario = bell_scenario(args.parties, args.settings, 2)
    n_vec = 1 << scenario.n_contexts
    print(
        f"({args.parties},{args.settings},2): {n_vec} parity vectors, "
        f"{global_size(scenario)} global assignments, "
        f"lanes: {', '.join(available_kernels())}"
    )
    print_rows("scan_satisfiable", bench_scan(scenario, args.repeat))
    print_rows("compatible_mask", bench_compatible(scenario, args.repeat))


if __name__ == "__main__":
    main()
