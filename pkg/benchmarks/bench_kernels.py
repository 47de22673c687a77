#!/usr/bin/env python3
"""Time the compiled core against the numpy fallback on the hot kernels.

    python3 benchmarks/bench_kernels.py [--limit 1e7] [--repeat 3] [--json out.json]
"""
import argparse
import json
import timeit

import numpy as np

from shiftprimes import kernels
from shiftprimes.prime_engine import primes_upto


def cases(limit):
    spf = kernels.sieve_spf(limit)
    vals = np.arange(1, limit + 1, dtype=np.int64)
    ps = primes_upto(1000)
    return {
        "sieve_spf": lambda k: k.sieve_spf(limit, 1 << 20),
        "smooth_parts(y=1000)": lambda k: k.smooth_parts(vals, 1000, spf),
        "omega_upto(t=limit)": lambda k: k.omega_upto(vals, spf, limit),
        "smooth_numbers(y=1000)": lambda k: k.smooth_numbers(ps, limit, 10**8),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--limit", type=float, default=1e7)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the timings here")
    args = ap.parse_args()
    limit = int(args.limit)

    found = kernels.backends()
    if "cython" not in found:
        print("compiled core not built; timing the fallback only")
    rows = []
    for name, fn in cases(limit).items():
        best = {b: min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
                for b, mod in found.items()}
        rows.append({"kernel": name, "limit": limit, **{f"{b}_s": t for b, t in best.items()}})

    print(f"{'kernel':<24}" + "".join(f"{b + ' (s)':>14}" for b in found) + f"{'speedup':>10}")
    for r in rows:
        line = f"{r['kernel']:<24}" + "".join(f"{r[b + '_s']:>14.3f}" for b in found)
        if "cython" in found:
            line += f"{r['python_s'] / r['cython_s']:>10.1f}"
        print(line)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=1)


if __name__ == "__main__":
    main()
