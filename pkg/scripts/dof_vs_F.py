"""Degrees of freedom against F for parallel and perpendicular transmitters.

Tabulates the closed forms, the numerically integrated wavenumber support, the
far-field count and the unbounded-surface asymptote.

    python3 scripts/dof_vs_F.py --out dof_vs_F.csv
"""

import argparse
import csv

import numpy as np

from lislimits import Medium, make_parallel_link, make_perpendicular_link
from lislimits.dof import (
    dof_asymptotic_parallel,
    dof_closed_parallel,
    dof_closed_perpendicular,
    dof_large_distance_parallel,
    dof_large_distance_perpendicular,
    dof_numeric,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="dof_vs_F.csv")
    ap.add_argument("--f-db", nargs=3, type=float, default=(-20.0, 30.0, 51), metavar=("START", "STOP", "N"))
    ap.add_argument("--no-numeric", action="store_true", help="skip the quadrature columns")
    args = ap.parse_args()

    lam, L, A_R = 0.01, 0.05, 25.0
    S = np.sqrt(A_R)
    asym = dof_asymptotic_parallel(L * L, lam)
    cols = ["F_db", "par_closed", "par_numeric", "par_far", "perp_closed", "perp_numeric", "perp_far", "asymptote"]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for fd in np.linspace(args.f_db[0], args.f_db[1], int(args.f_db[2])):
            d = S * np.sqrt(10 ** (fd / 10))
            par = make_parallel_link(d, (L, L), (S, S), medium=Medium(lam))
            perp = make_perpendicular_link(d, (L, L), (S, S), medium=Medium(lam))
            nan = float("nan")
            w.writerow([
                fd,
                dof_closed_parallel(par),
                nan if args.no_numeric else dof_numeric(par),
                dof_large_distance_parallel(par),
                dof_closed_perpendicular(perp),
                nan if args.no_numeric else dof_numeric(perp),
                dof_large_distance_perpendicular(perp),
                asym,
            ])
    print(f"wrote {args.out}; asymptote pi A_T / lambda^2 = {asym:.2f}")


if __name__ == "__main__":
    main()
