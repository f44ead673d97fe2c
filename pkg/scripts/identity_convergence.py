"""Discrepancy of the two-route principal-value identities under grid refinement."""

import argparse

from quasilab import suites

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--alpha", type=float, default=1.0)
parser.add_argument("--levels", type=int, default=3, help="number of grids, each halving h")
args = parser.parse_args()

per_cell, M = 32, 2**13
prev = None
print(f"{'h':>12} {'multiplier':>12} {'ratio':>7} {'assembly':>12} {'ratio':>7}")
for _ in range(args.levels):
    reps = suites.pv_identity_reports(args.alpha, per_cell, M, 1e-3)
    m, a = reps["multiplier"].lhs, reps["assembly"].lhs
    rm = f"{prev[0] / m:7.3f}" if prev else " " * 7
    ra = f"{prev[1] / a:7.3f}" if prev else " " * 7
    print(f"{args.alpha / per_cell:12.3e} {m:12.3e} {rm} {a:12.3e} {ra}")
    prev = (m, a)
    per_cell, M = 2 * per_cell, 2 * M
