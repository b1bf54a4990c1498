"""Spectra of random self-adjoint extensions against the distinguished one.

For Haar-random ``U`` this prints the negative eigenvalues, the first few
non-negative ones and the eigenvalue counting difference to ``U = I`` below
a cap, which stays within 2 (rank-2 perturbation of the boundary conditions).

    python3 scripts/scan_random_extensions.py [--a 1] [--count 20] [--cap 40] [--seed 0]
"""
import argparse
import time

import numpy as np

from prolate_sa import boundary_algebra as ba
from prolate_sa import extension_solver as es


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--count", type=int, default=20)
    ap.add_argument("--cap", type=float, default=40.0)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    a = args.a
    lo = es.negative_window(a)[0]
    rng = np.random.default_rng(args.seed)
    ident = ba.make_unitary(ba.PRESETS["identity"])
    n_ident = len(es.eigenvalues_scan(ident, a, lo, args.cap))
    t0 = time.perf_counter()
    print(f"a = {a}, window [{lo:g}, {args.cap:g}], N_I = {n_ident}")
    print(f"{'det U phase':>12} {'#neg':>5} {'N_U - N_I':>10}  lowest eigenvalues")
    worst = 0
    for _ in range(args.count):
        u = ba.random_unitary(rng)
        lams = es.eigenvalues_scan(u, a, lo, args.cap)
        neg = sum(1 for x in lams if x < 0)
        diff = len(lams) - n_ident
        worst = max(worst, abs(diff))
        shown = ", ".join(f"{x:.6f}" for x in lams[:4])
        print(f"{np.angle(u.det):12.4f} {neg:5d} {diff:10d}  {shown}")
    print(f"max |N_U - N_I| = {worst}; {time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
