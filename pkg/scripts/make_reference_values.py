"""Freeze reference eigenvalues of the distinguished extension.

Independent of the Legendre-Galerkin backend: the prolate operator is
discretized by Chebyshev collocation on Gauss-Lobatto points including the
endpoints, where the equation degenerates to ``+-(2/a) x' + a**2 x = lam x``
and bounded (polynomial) solutions are selected automatically.  Values are
taken at two resolutions and the finer one is stored with the observed change
as its uncertainty.

    python3 scripts/make_reference_values.py [--out tests/data/reference_eigenvalues.json]
"""
import argparse
import json
from pathlib import Path

import numpy as np


def cheb_diff(n):
    """Chebyshev differentiation matrix on x_j = cos(pi j / n), j = 0..n."""
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    dx = x[:, None] - x[None, :]
    d = np.outer(c, 1 / c) / (dx + np.eye(n + 1))
    d -= np.diag(d.sum(axis=1))
    return d, x


def collocation_eigenvalues(a, n, n_modes):
    d, s = cheb_diff(n)
    t = a * s
    dt = d / a
    p = 1 - t**2 / a**2
    op = -(p[:, None] * (dt @ dt)) + (2 * t / a**2)[:, None] * dt + np.diag(t**2)
    w = np.linalg.eigvals(op)
    w = np.sort(w[np.abs(w.imag) < 1e-8 * np.abs(w).max()].real)
    return w[:n_modes]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests/data/reference_eigenvalues.json"))
    ap.add_argument("--modes", type=int, default=6)
    args = ap.parse_args()
    out = {"method": "chebyshev collocation, Gauss-Lobatto points", "resolutions": [48, 64], "values": {}}
    for a in (0.5, 1.0, 2.0):
        coarse = collocation_eigenvalues(a, 48, args.modes)
        fine = collocation_eigenvalues(a, 64, args.modes)
        out["values"][repr(a)] = {"eigenvalues": fine.tolist(),
                                  "change": np.abs(fine - coarse).tolist()}
        print(a, fine, np.abs(fine - coarse).max())
    Path(args.out).write_text(json.dumps(out, indent=2) + "\n")


if __name__ == "__main__":
    main()
