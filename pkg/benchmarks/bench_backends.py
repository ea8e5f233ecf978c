#!/usr/bin/env python3
"""Benchmark the compiled kernel against the pure-numpy fallback.

Usage:  python benchmarks/bench_backends.py [--trials N]

Times the full trial chain (draws, relay decisions, both fusion rules) on
three representative scenarios and prints trials/second per backend.
"""

import argparse
import time

from molrelay.config import preset_config
from molrelay.simulator import HAVE_EXTENSION, available_backends, compile_scenario
from molrelay.simulator.engine import _counts


def scenarios():
    fig2a = preset_config("fig2a").template
    fig2c = preset_config("fig2c").template
    yield "cooperative N=1", compile_scenario(fig2a.network_config(n_relays=1, budget=3e9))
    yield "cooperative N=3", compile_scenario(fig2a.network_config(n_relays=3, budget=3e9))
    yield "siso", compile_scenario(fig2c.network_config(n_relays=2, budget=3e9), "siso")
    yield "simo (2 nodes)", compile_scenario(fig2c.network_config(n_relays=2, budget=3e9), "simo")


def bench(scn, backend: str, trials: int) -> float:
    _counts(scn, 1, 0, 10_000, backend)  # warm up
    best = float("inf")
    for rep in range(3):
        start = time.perf_counter()
        _counts(scn, 1, 0, trials, backend)
        best = min(best, time.perf_counter() - start)
    return trials / best


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--trials", type=int, default=1_000_000)
    args = parser.parse_args()

    if not HAVE_EXTENSION:
        print("note: compiled kernel not built; only the numpy backend is timed")
    print(f"{'scenario':<18} {'backend':<10} {'trials/s':>14} {'speedup':>9}")
    for name, scn in scenarios():
        rates = {}
        for backend in available_backends():
            rates[backend] = bench(scn, backend, args.trials)
        base = rates["numpy"]
        for backend, rate in rates.items():
            print(f"{name:<18} {backend:<10} {rate:>14,.0f} {rate / base:>8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
