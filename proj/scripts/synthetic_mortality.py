#!/usr/bin/env python3
"""Write a synthetic two-population mortality table in long CSV format.

Rates follow a Heligman-Pollard-like shape (infant decline, accident hump,
Gompertz senescence); deaths are Poisson given the exposure.
"""
import argparse
import csv
import math
import sys

import numpy as np


def log_rate(age, pop_shift, hump_height):
    infant = 0.004 * math.exp(-1.2 * age)
    hump = hump_height * math.exp(-0.5 * ((age - 22.0) / 6.0) ** 2)
    senescent = 2.5e-5 * math.exp(0.095 * (age + pop_shift))
    return math.log(infant + hump + senescent + 8e-5)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="-")
    ap.add_argument("--first-age", type=int, default=1)
    ap.add_argument("--last-age", type=int, default=104)
    ap.add_argument("--seed", type=int, default=2011)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    pops = {"M": (4.0, 8e-4), "F": (0.0, 2.5e-4)}
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    w = csv.writer(out)
    w.writerow(["population", "age", "deaths", "exposure"])
    for pop, (shift, hump) in pops.items():
        for age in range(args.first_age, args.last_age + 1):
            exposure = 350000.0 * math.exp(-((age / 85.0) ** 6)) + 50.0
            m = math.exp(log_rate(age, shift, hump))
            deaths = int(rng.poisson(m * exposure))
            w.writerow([pop, age, deaths, f"{exposure:.1f}"])
    if out is not sys.stdout:
        out.close()


if __name__ == "__main__":
    main()
