#!/usr/bin/env python3
"""Equidistribution scan driver.

Example:
    python3 scripts/run_scan.py --primes 11,23 --dmin 100 --dmax 2000 --csv
Writes the report to stdout; identical configs reproduce identical bytes.
"""

import sys

from cmreduce.cli import run

if __name__ == "__main__":
    sys.exit(run(["scan", *sys.argv[1:]]))
