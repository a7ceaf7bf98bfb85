"""Profile of sup |eta| on dyadic blocks [2^k, 2^(k+1)], with the table rows.

    python scripts/eta_profile.py --kmax 26
"""

import argparse
import csv
import sys

from practical_bounds.eta_bounds import MK_TABLE
from practical_bounds.primes import eta, eta_sup_bound


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--kmin", type=int, default=4)
    ap.add_argument("--kmax", type=int, default=24)
    args = ap.parse_args()

    out = csv.writer(sys.stdout)
    out.writerow(["k", "eta_at_2^k", "sup_block", "M_k"])
    for k in range(args.kmin, args.kmax):
        e = eta(2**k)
        sup = eta_sup_bound(2**k, 2 ** (k + 1))
        mk = MK_TABLE.bound(k) if k in MK_TABLE.rows else ""
        out.writerow([k, f"{e.mid:.6e}", f"{sup:.6e}", mk])
        sys.stdout.flush()


if __name__ == "__main__":
    main()
