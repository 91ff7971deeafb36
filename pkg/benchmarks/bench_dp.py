"""Time the compiled walk-counting kernel against the numpy fallback.

    python3 benchmarks/bench_dp.py [--n 24] [--repeat 5]
"""

import argparse
import statistics
import time

from trikernel.enumerate import HAVE_COMPILED, count_walks
from trikernel.model import preset

MODELS = ["reverse-kreweras", "simple", "e-w-n-s-sw"]


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times), statistics.median(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n", type=int, default=24)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = ["numpy"] + (["compiled"] if HAVE_COMPILED else [])
    if not HAVE_COMPILED:
        print("compiled extension not built; timing the numpy path only")
    print(f"{'model':<24}{'backend':<10}{'best (ms)':>12}{'median (ms)':>14}")
    for name in MODELS:
        steps = preset(name)
        n = args.n
        # keep counts inside 64 bits so both paths are comparable
        while len(steps) ** n > 2**63 - 1:
            n -= 1
        ref = None
        for backend in backends:
            best, med = best_of(lambda: count_walks(steps, "3q", (0, 0), n, backend=backend), args.repeat)
            table = count_walks(steps, "3q", (0, 0), n, backend=backend)
            if ref is None:
                ref = table.excursions()
            elif table.excursions() != ref:
                raise SystemExit(f"{name}: backends disagree")
            print(f"{name + f' n={n}':<24}{backend:<10}{best * 1e3:>12.2f}{med * 1e3:>14.2f}")


if __name__ == "__main__":
    main()
