#!/usr/bin/env python3
"""Search for the smallest fundamental |D|, inert at every given prime,
whose simultaneous reduction hits every tuple of supersingular classes.

Example:
    python3 scripts/smallest_joint_surjective.py --primes 11,23 --dmax 5000
"""

import argparse

from cmreduce.quadforms import admissible_discriminants
from cmreduce.reduction import joint_reduce


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--primes", default="11,23")
    ap.add_argument("--dmax", type=int, default=5000)
    args = ap.parse_args()
    primes = tuple(int(t) for t in args.primes.split(","))
    for disc in admissible_discriminants(
        inert=primes, abs_range=(3, args.dmax), fundamental_only=True
    ):
        jd = joint_reduce(disc.D, primes)
        marker = "SURJECTIVE" if jd.surjective else ""
        print(
            f"D={disc.D} h={jd.h} hit {len(jd.tuple_counts)}/{len(jd.product_measure)} "
            f"tv={float(jd.tv):.4f} {marker}"
        )
        if jd.surjective:
            print(f"smallest |D| = {-disc.D}")
            return 0
    print("no surjective discriminant in range")
    return 1


if __name__ == "__main__":
    raise SystemExit(main())
