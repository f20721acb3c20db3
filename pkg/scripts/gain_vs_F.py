"""Normalized link gain G/G_T against F for several receive aspect ratios.

Writes a CSV table (F_db, one column per aspect ratio, large-LIS level, Friis)
and prints the near-field convergence towards 1/3.

    python3 scripts/gain_vs_F.py --out gain_vs_F.csv
"""

import argparse
import csv

import numpy as np

from lislimits import Medium, make_parallel_link
from lislimits.linkbudget import gain_closed, gain_closed_square, transmit_aperture_gain


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="gain_vs_F.csv")
    ap.add_argument("--f-db", nargs=3, type=float, default=(-30.0, 40.0, 141), metavar=("START", "STOP", "N"))
    ap.add_argument("--aspect", nargs="+", type=float, default=[1, 2, 4, 8])
    args = ap.parse_args()

    lam, A_T, A_R = 0.01, 25e-4, 25.0
    g_t = transmit_aperture_gain(A_T, lam)
    f_db = np.linspace(args.f_db[0], args.f_db[1], int(args.f_db[2]))
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["F_db"] + [f"ar_{a:g}" for a in args.aspect] + ["large_lis", "friis"])
        for fd in f_db:
            F = 10 ** (fd / 10)
            d = np.sqrt(F * A_R)
            row = [fd]
            for ar in args.aspect:
                link = make_parallel_link(d, (0.05, 0.05), (np.sqrt(A_R * ar), np.sqrt(A_R / ar)), medium=Medium(lam))
                row.append(gain_closed(link) / g_t)
            row += [1 / 3, 1 / (4 * np.pi * F)]
            w.writerow(row)
    print(f"wrote {args.out}")

    print("F          G/G_T      3 G/G_T - 1")
    for F in (1e-2, 1e-3, 1e-4, 1e-5, 1e-6):
        g = gain_closed_square(F, A_T, lam) / g_t
        print(f"{F:<10.0e} {g:.6f}   {3 * g - 1:+.4%}")


if __name__ == "__main__":
    main()
