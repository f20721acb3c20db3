"""Eigenmodes of a 2 x 2 wavelength source facing an 8 x 8 wavelength surface, 2 wavelengths apart.

Prints the normalized spectrum, the 3 dB mode count against the wavenumber
estimate, the sum-rule gap and the first-mode overlap, then (optionally)
repeats the leading singular values on a finer grid through the Gram path.

    python3 scripts/desk_modes.py [--refine]
"""

import argparse
import time

import numpy as np

from lislimits import Medium, make_parallel_link
from lislimits.dof import dof_closed_parallel
from lislimits.eigenmodes import (
    assemble_kernel,
    count_dof,
    eigenfunction_field,
    gram_singular_values,
    solve_modes,
    sum_rule_check,
)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--delta", type=float, default=1 / 8, help="patch side in wavelengths")
    ap.add_argument("--refine", action="store_true", help="also run delta/2 via the Gram matrix")
    ap.add_argument("--show", type=int, default=16)
    args = ap.parse_args()

    link = make_parallel_link(2.0, (2.0, 2.0), (8.0, 8.0), medium=Medium(1.0))
    t0 = time.perf_counter()
    kernel = assemble_kernel(link, args.delta)
    spectrum = solve_modes(kernel)
    t1 = time.perf_counter()
    s = spectrum.singular_values
    print(f"kernel {kernel.matrix.shape}, solved in {t1 - t0:.2f} s")
    print(" n   xi_n^2 / xi_1^2 [dB]")
    for n in range(min(args.show, s.size)):
        print(f"{n + 1:2d}   {20 * np.log10(s[n] / s[0]):8.3f}")
    print(f"3 dB count {count_dof(spectrum)}, wavenumber estimate {dof_closed_parallel(link):.3f}")
    print(f"sum-rule relative gap {sum_rule_check(kernel, link, spectrum=spectrum):.2e}")

    a1 = eigenfunction_field(spectrum, 1).amplitude.ravel()
    a2 = eigenfunction_field(spectrum, 2).amplitude.ravel()
    print(f"|<psi_1, psi_2>| = {abs(np.vdot(spectrum.left[:, 0], spectrum.left[:, 1])):.1e}, "
          f"amplitude overlap {a1 @ a2:.3f}")

    if args.refine:
        fine = gram_singular_values(link, args.delta / 2)
        k = min(12, s.size)
        change = np.abs(fine[:k] / s[:k] - 1).max()
        print(f"delta/2: leading {k} singular values move by at most {change:.2%}")


if __name__ == "__main__":
    main()
