#!/usr/bin/env python3
"""Communication/efficiency frontier for partition-restricted bidding.

For each part count k, reporting on a partition field costs 2^k numbers per
buyer, and the cheapest worst-case surplus ratio over all k-part shapes of m
goods is what this script tabulates.

Usage: python scripts/partition_tradeoff.py --m 9 [--max-k 5]
"""
import argparse
import sys
import time

from vcbundle import feasible_family_bound, max_feasible_family, partition_from_sizes


def shapes(m: int, k: int):
    def rec(remaining, max_part, parts):
        if len(parts) == k:
            if remaining == 0:
                yield tuple(parts)
            return
        for size in range(min(remaining - (k - len(parts) - 1), max_part), 0, -1):
            parts.append(size)
            yield from rec(remaining - size, size, parts)
            parts.pop()

    yield from rec(m, m, [])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, required=True, help="number of goods")
    parser.add_argument("--max-k", type=int, default=None, help="largest part count (default m, capped at 8)")
    args = parser.parse_args()
    max_k = min(args.max_k or args.m, args.m, 8)

    print(f"{'k':>2} {'2^k':>5} {'best r':>7} {'best shape':<20} {'bound at best':>13} {'secs':>6}")
    for k in range(1, max_k + 1):
        started = time.monotonic()
        best = None
        for sizes in shapes(args.m, k):
            part = partition_from_sizes(list(sizes))
            r = max_feasible_family(part).s
            if best is None or r < best[0]:
                best = (r, sizes, feasible_family_bound(part))
        r, sizes, bound = best
        elapsed = time.monotonic() - started
        print(f"{k:>2} {2 ** k:>5} {r:>7} {str(sizes):<20} {str(bound):>13} {elapsed:>6.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
