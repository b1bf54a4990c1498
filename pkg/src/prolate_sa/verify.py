"""Invariant suites run by ``prolate-sa verify``.

Every check returns a ``CheckResult`` carrying an identifier, the measured
quantity, the tolerance and the outcome.  Suites are deterministic: random
draws use a fixed seed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import boundary_algebra as ba
from . import endpoint_forms as ef
from . import extension_solver as es
from . import fourier_commutator as fc
from . import legendre_backend as lb
from .functions import boundary_basis, bump, smooth_function

SEED = 20240611


@dataclass(frozen=True)
class CheckResult:
    ident: str
    module: str
    value: float
    tol: float
    passed: bool

    def as_dict(self):
        return asdict(self)


def _check(ident, module, value, tol, passed=None):
    value = float(value)
    ok = value <= tol if passed is None else bool(passed)
    return CheckResult(ident, module, value, float(tol), ok)


def suite_boundary_algebra(a: float, n_random: int = 100) -> list[CheckResult]:
    mod = "boundary_algebra"
    j = ba.j_matrix()
    pp, pm = ba.projectors()
    eye = np.eye(4)
    out = [
        _check("J-hermitian", mod, np.max(np.abs(j - j.conj().T)), 0.0),
        _check("J-squared-identity", mod, np.max(np.abs(j @ j - eye)), 0.0),
        _check("J-rank-4", mod, abs(np.linalg.matrix_rank(j) - 4), 0),
        _check("projector-idempotent", mod,
               max(np.max(np.abs(pp @ pp - pp)), np.max(np.abs(pm @ pm - pm))), 1e-15),
        _check("projector-orthogonal", mod, np.max(np.abs(pp @ pm)), 1e-15),
        _check("projector-sum", mod, np.max(np.abs(pp + pm - eye)), 1e-15),
    ]
    rng = np.random.default_rng(SEED)
    worst_rt, all_orth, worst_kernel = 0.0, True, 0.0
    for _ in range(n_random):
        u = ba.random_unitary(rng)
        s = ba.subspace_from_unitary(u)
        all_orth &= ba.is_j_self_orthogonal(s)
        worst_rt = max(worst_rt, np.max(np.abs(ba.unitary_from_subspace(s).matrix - u.matrix)))
        k = ba.boundary_kernel(u)
        dom = ba.domain_subspace(u)
        quads = np.array([ba.quadruple_from_coordinates(v) for v in dom.basis]).T
        # both 2-planes agree iff the stacked rank stays 2
        sv = np.linalg.svd(np.hstack([k, quads]), compute_uv=False)
        worst_kernel = max(worst_kernel, sv[2] / sv[0])
    out += [
        _check("random-subspaces-self-orthogonal", mod, 0.0 if all_orth else 1.0, 0.0),
        _check("unitary-subspace-round-trip", mod, worst_rt, 1e-10),
        _check("kernel-equals-domain-subspace", mod, worst_kernel, 1e-10),
    ]
    return out


def suite_endpoint_forms(a: float) -> list[CheckResult]:
    mod = "endpoint_forms"
    basis = boundary_basis(a)
    bvs = [ef.boundary_values(f, a) for f in basis]
    rewr = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    got = np.array([bv.quadruple for bv in bvs])
    gram = np.array([[ef.boundary_form(x, y, a) for y in bvs] for x in bvs])
    rule = lb.graded_rule(a)
    green = np.array([[ef.green_defect(x, y, rule) for y in basis] for x in basis])
    out = [
        _check("boundary-value-matrix", mod, np.max(np.abs(got - rewr)), 1e-8),
        _check("gram-reproduces-J", mod, np.max(np.abs(a / 2 * gram - ba.j_matrix())), 1e-6),
        _check("green-identity", mod, np.max(np.abs(green - 1j * gram)), 1e-6),
    ]
    worst_res, worst_cons = 0.0, 0.0
    rng = np.random.default_rng(SEED)
    for lam in (0.0, 1.0, 10.0):
        for ep in ef.ENDPOINTS:
            for sol in ef.frobenius_pair(lam, ep, a, radius=a / 2):
                t = (-a + np.linspace(1e-3, 0.5, 50) * a) if ep == ef.MINUS_A else (a - np.linspace(1e-3, 0.5, 50) * a)
                res, scale = ef.ode_residual(sol, t)
                worst_res = max(worst_res, np.max(np.abs(res) / np.maximum(scale, 1e-300)))
    for _ in range(5):
        c1, c2 = rng.normal(size=2) + 1j * rng.normal(size=2)
        lam = rng.uniform(-5, 20)
        reg, log = ef.frobenius_pair(lam, ef.MINUS_A, a, radius=a)

        def x(t):
            v1, d1 = ef.eval_solution(reg, t)
            v2, d2 = ef.eval_solution(log, t)
            return c1 * v1 + c2 * v2, c1 * d1 + c2 * d2
        lim = ef.boundary_values_numeric(x, ef.MINUS_A, a)
        b, c = ef.boundary_values_series(c1, c2, ef.MINUS_A)
        worst_cons = max(worst_cons, abs(lim.b - b), abs(lim.c - c))
    out += [
        _check("frobenius-ode-residual", mod, worst_res, 1e-8),
        _check("series-vs-numeric-boundary-values", mod, worst_cons, 1e-6),
    ]
    return out


def suite_legendre(a: float) -> list[CheckResult]:
    mod = "legendre_backend"
    n = 32
    worst = 0.0
    for aa in (0.5, 1.0, 2.0):
        m, _ = lb.galerkin_matrices(n, aa)
        w, _ = lb.symmetric_eigensolve(m)
        k = np.arange(n)
        worst = max(worst, np.max(np.abs(w - k * (k + 1) / aa**2)))
    pairs = lb.prolate_spectrum(40, a, 6)
    vals = np.array([p.value for p in pairs])
    rule = lb.gauss_legendre(80).scaled(-a, a)
    samples = np.array([p.eigenfunction(rule.nodes)[0] for p in pairs])
    gram = (samples * rule.weights) @ samples.T
    m, q = lb.galerkin_matrices(40, a)
    return [
        _check("legendre-spectrum-exact", mod, worst, 1e-10),
        _check("positive-definite", mod, -np.linalg.eigvalsh(m + q)[0], 0.0, passed=np.linalg.eigvalsh(m + q)[0] > 0),
        _check("simple-increasing", mod, -np.min(np.diff(vals)), -1e-8),
        _check("eigenfunctions-orthonormal", mod, np.max(np.abs(gram - np.eye(len(pairs)))), 1e-9),
    ]


def suite_extension(a: float, n_random: int = 10) -> list[CheckResult]:
    mod = "extension_solver"
    ident = ba.make_unitary(ba.PRESETS["identity"])
    ref = [p.value for p in lb.prolate_spectrum(40, a, 5)]
    shot = es.eigenvalues_scan(ident, a, 0.0, ref[-1] * 1.05 + 1.0)[:5]
    rel = np.max(np.abs(np.array(shot) / np.array(ref) - 1)) if len(shot) == 5 else np.inf
    rng = np.random.default_rng(SEED)
    worst_neg, worst_mult, worst_omega = 0, 0, 0.0
    lo, hi = es.negative_window(a)
    for _ in range(n_random):
        u = ba.random_unitary(rng)
        roots = es.eigenvalues_scan_report(u, a, lo, hi)
        worst_neg = max(worst_neg, sum(r.multiplicity for r in roots))
        worst_mult = max([worst_mult] + [r.multiplicity for r in roots])
    for u in (ident, ba.make_unitary(ba.PRESETS["neg-identity"]), ba.make_unitary(ba.PRESETS["swap"])):
        lams = es.eigenvalues_scan(u, a, lo, 40.0 / a**2)[:2]
        sols = [es.eigenfunction_shoot(u, a, lam, return_solution=True)[1] for lam in lams]
        q = [ef.BoundaryValues(*s.quadruple) for s in sols]
        worst_omega = max(worst_omega, abs(ef.boundary_form(q[0], q[1], a)))
    return [
        _check("shooting-matches-galerkin", mod, rel, 1e-6),
        _check("at-most-two-negative", mod, worst_neg, 2),
        _check("multiplicity-at-most-two", mod, worst_mult, 2),
        _check("eigenfunctions-omega-orthogonal", mod, worst_omega, 1e-6),
    ]


def _smooth_family(a: float):
    fam = []
    for alpha in (0.3, -0.7, 1.1):
        fam.append(smooth_function(lambda t, al=alpha: np.exp(al * t),
                                   lambda t, al=alpha: al * np.exp(al * t),
                                   lambda t, al=alpha: al * al * np.exp(al * t), a))
    for w in (1.0, 2.5):
        fam.append(smooth_function(lambda t, w=w: np.cos(w * t), lambda t, w=w: -w * np.sin(w * t),
                                   lambda t, w=w: -w * w * np.cos(w * t), a))
    fam += [bump(0.5 * a, 0.25 * a, a), bump(-0.2 * a, 0.6 * a, a)]
    return fam


def suite_fourier(a: float, n_random: int = 5) -> list[CheckResult]:
    mod = "fourier_commutator"
    smooth = max(fc.commutator_residual(x)[1].sup_norm for x in _smooth_family(a))
    basis = boundary_basis(a)
    singular = max(fc.commutator_residual(basis[1] + g * basis[0])[1].sup_norm for g in (0.0, 1.0, -2j))
    worst_prop, worst_gamma = 0.0, 0.0
    for pair in lb.prolate_spectrum(40, a, 5):
        gamma, res = fc.pswf_fourier_check(pair)
        worst_prop = max(worst_prop, res)
        worst_gamma = max(worst_gamma, abs(gamma))
    rng = np.random.default_rng(SEED)
    us = [ba.make_unitary(ba.PRESETS["neg-identity"]), ba.make_unitary(ba.PRESETS["swap"])]
    us += [ba.random_unitary(rng) for _ in range(n_random)]
    worst_wit = min(fc.noncommuting_witness(u, a).residual_norm for u in us) / (2 / a)
    return [
        _check("commutator-smooth", mod, smooth, 1e-6),
        _check("commutator-log-singular", mod, singular, 1e-3),
        _check("pswf-proportional", mod, worst_prop, 1e-6),
        _check("fourier-gamma-bounded", mod, worst_gamma, 1.0),
        _check("witness-nonzero", mod, -worst_wit, -0.1),
    ]


SUITES = {
    "boundary_algebra": suite_boundary_algebra,
    "endpoint_forms": suite_endpoint_forms,
    "legendre_backend": suite_legendre,
    "extension_solver": suite_extension,
    "fourier_commutator": suite_fourier,
}


def run_all(a: float = 1.0, suites=None) -> list[CheckResult]:
    results = []
    for name, fn in SUITES.items():
        if suites is None or name in suites:
            results.extend(fn(a))
    return results
