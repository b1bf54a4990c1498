"""Commutation of extensions with the truncated Fourier operator.

Writes a CSV of ``F_E L x - L F_E x`` for ``x = psi_-`` (boundary value
``b_-a = 1``) beside the predicted boundary term, then prints the
prolate/Fourier proportionality constants and non-commutation witnesses for a
few extensions.

    python3 scripts/commutator_demo.py [--a 1] [--csv commutator.csv]
"""
import argparse

import numpy as np

from prolate_sa import boundary_algebra as ba
from prolate_sa import fourier_commutator as fc
from prolate_sa import legendre_backend as lb
from prolate_sa.functions import psi_minus


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--csv", default="commutator.csv")
    args = ap.parse_args()
    a = args.a
    x = psi_minus(a)
    t = np.linspace(-a, a, 203)[1:-1]
    lhs = fc.commutator_lhs(x, t)
    rhs = fc.commutator_rhs(1.0, 0.0, t, a)
    np.savetxt(args.csv, np.column_stack([t, lhs.real, lhs.imag, rhs.real, rhs.imag]),
               delimiter=",", header="t,lhs_re,lhs_im,rhs_re,rhs_im", comments="", fmt="%.15g")
    print(f"wrote {args.csv}; sup |lhs - rhs| = {np.max(np.abs(lhs - rhs)):.2e}, "
          f"prefactor 2/(a sqrt(2 pi)) = {fc.commutator_prefactor(a):.6f}")
    print("\nk  lambda_k       gamma_k                  residual")
    for p in lb.prolate_spectrum(40, a, 6):
        g, res = fc.pswf_fourier_check(p)
        print(f"{p.index}  {p.value:12.8f}  {g.real:+.8f}{g.imag:+.8f}j  {res:.1e}")
    print("\nextension      residual/(2/a)  y(-a), y(a) after correction")
    rng = np.random.default_rng(1)
    named = [("neg-identity", ba.make_unitary(ba.PRESETS["neg-identity"])),
             ("swap", ba.make_unitary(ba.PRESETS["swap"]))]
    named += [(f"random {i}", ba.random_unitary(rng)) for i in range(3)]
    for name, u in named:
        w = fc.noncommuting_witness(u, a)
        ends = ", ".join(f"{abs(v):.1e}" for v in w.endpoint_values)
        print(f"{name:14s} {w.residual_norm / (2 / a):14.4f}  {ends}")


if __name__ == "__main__":
    main()
