#!/usr/bin/env python3
"""Exhaustive minimum of the worst-case ratio over all k-part shapes of m goods.

The interesting configuration is m=21, k=7: the equal split into triples has
ratio 7, while (2,4,3,3,3,3,3) achieves 6.  This sweep confirms (offline; it
is not part of the acceptance gate) whether 6 is the minimum over all 7-part
shapes.

Usage: python scripts/min_ratio_partitions.py [--m 21] [--k 7]
"""
import argparse
import sys
import time

from vcbundle import max_feasible_family, partition_from_sizes


def shapes(m: int, k: int):
    def rec(remaining, max_part, parts):
        if len(parts) == k:
            if remaining == 0:
                yield tuple(parts)
            return
        slots_left = k - len(parts) - 1
        for size in range(min(remaining - slots_left, max_part), 0, -1):
            parts.append(size)
            yield from rec(remaining - size, size, parts)
            parts.pop()

    yield from rec(m, m, [])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--m", type=int, default=21)
    parser.add_argument("--k", type=int, default=7)
    args = parser.parse_args()

    best = None
    total = 0
    started = time.monotonic()
    for sizes in shapes(args.m, args.k):
        total += 1
        t0 = time.monotonic()
        result = max_feasible_family(partition_from_sizes(list(sizes)))
        print(f"{sizes}: r = {result.s}  ({time.monotonic() - t0:.2f}s)", flush=True)
        if best is None or result.s < best[0]:
            best = (result.s, sizes)
    r, sizes = best
    print(f"\nminimum ratio over {total} shapes: {r}, attained at {sizes}")
    print(f"total time {time.monotonic() - started:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
