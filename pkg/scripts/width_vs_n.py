"""Certified width of [c_lo, c_hi] against the predicted gap as N doubles.

    python scripts/width_vs_n.py --kmin 12 --kmax 22 > widths.csv
"""

import argparse
import csv
import logging
import math
import sys
import time

from practical_bounds.bounds import compute_bounds


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kmin", type=int, default=12)
    ap.add_argument("--kmax", type=int, default=20)
    ap.add_argument("--j", type=int, default=13)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING)

    out = csv.writer(sys.stdout)
    out.writerow(["k", "N", "c_lo", "c_hi", "width", "predicted_gap", "ratio", "eps_N_log_N", "seconds"])
    for k in range(args.kmin, args.kmax + 1):
        t0 = time.perf_counter()
        r = compute_bounds(2**k, args.j, threads=args.threads)
        dt = time.perf_counter() - t0
        out.writerow([
            k, r.N, f"{r.c_lo:.12f}", f"{r.c_hi:.12f}", f"{r.c_width:.4e}",
            f"{r.predicted_gap:.4e}", f"{r.c_width / r.predicted_gap:.4f}",
            f"{r.eps_N.mid * math.log(r.N):.5f}", f"{dt:.2f}",
        ])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
