"""Exceptional-point coupling of the pseudo-Hermitian three-mode model versus detuning.

    python3 scripts/ep_scan.py [--delta 0 3 61] [--out ep_scan.csv]

For each detuning ``delta/gamma_1`` the script locates the smallest
coupling ``J/gamma_1`` at which the cubic discriminant vanishes and records
the coalescence order (3 only at zero detuning). Everything is in units of
``gamma_1``, so the carrier frequency drops out.
"""
import argparse
import csv
import sys

import numpy as np

from magnoep import NoSignChange, ThreeModeModel, locate_ep


def scan(deltas, j_max=3.0):
    rows = []
    for d in deltas:
        base = ThreeModeModel.pseudo_hermitian(omega_2=1.0, delta=float(d), gamma_1=1.0, j=0.0)
        try:
            j, order = locate_ep(base, "j", (1e-6, j_max))
        except NoSignChange:
            j, order = float("nan"), 0
        rows.append((float(d), j, order))
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    parser.add_argument("--delta", nargs=3, type=float, default=[0.0, 3.0, 61],
                        metavar=("START", "STOP", "NUM"), help="detuning grid in units of gamma_1")
    parser.add_argument("--j-max", type=float, default=3.0, help="upper end of the coupling bracket")
    parser.add_argument("--out", default=None, help="CSV path (default: print to stdout)")
    args = parser.parse_args(argv)

    start, stop, num = args.delta
    rows = scan(np.linspace(start, stop, int(num)), args.j_max)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["delta_over_gamma1", "j_ep_over_gamma1", "ep_order"])
        writer.writerows((format(d, ".17g"), format(j, ".17g"), o) for d, j, o in rows)
    finally:
        if fh is not sys.stdout:
            fh.close()
    return 0


if __name__ == "__main__":
    sys.exit(main())
