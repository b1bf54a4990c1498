"""The truncated Fourier operator and its commutator with the prolate operator.

``F_E x(t) = (2 pi)**-1/2 int_{-a}^{a} exp(i t xi) x(xi) dxi``.  Integrating
by parts twice against the kernel gives, for ``x`` in the maximal domain,

    F_E L x - L F_E x = (2 / (a sqrt(2 pi))) (b_a(x) exp(i a t) + b_-a(x) exp(-i a t)),

where ``b_{+-a}`` are the generalized boundary values.  The factor
``1/sqrt(2 pi)`` comes from the normalization of ``F_E``; the boundary terms
carry ``2/a``.  So every extension whose domain contains a function with
``b != 0`` fails to commute with ``F_E``, while the distinguished extension
(``b_{+-a} = 0``) commutes.

``L F_E x`` is formed by differentiating under the integral sign, so the image
is never differentiated numerically.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary_algebra import UnitaryMatrix2, boundary_condition_matrix, boundary_kernel
from .endpoint_forms import BoundaryValues, GridFunction, boundary_values
from .errors import (DegenerateEigenvalue, GridMismatch, IsIdentity, MatchSingular,
                     ValidationError)
from .functions import MaxDomainFunction, bump, phi_minus, phi_plus, psi_minus, psi_plus
from .legendre_backend import EigenPair, gauss_legendre, graded_rule

SQRT_2PI = np.sqrt(2 * np.pi)


def commutator_prefactor(a: float) -> float:
    return 2.0 / (a * SQRT_2PI)


def _kernel(t, nodes):
    return np.exp(1j * np.outer(np.atleast_1d(t), nodes)) / SQRT_2PI


def truncated_fourier(x: GridFunction, t_grid) -> GridFunction:
    """``F_E x`` sampled on ``t_grid`` (strictly inside (-a, a)) by x's quadrature rule."""
    if x.weights is None:
        raise GridMismatch(f"node family {x.node_family!r} carries no quadrature weights")
    t_grid = np.asarray(t_grid, dtype=float)
    y = _kernel(t_grid, x.nodes) @ (x.weights * x.values)
    same = t_grid.shape == x.nodes.shape and np.all(t_grid == x.nodes)
    return GridFunction(x.a, t_grid, y, x.node_family if same else "image",
                        x.weights if same else None)


class FourierImage:
    """``y = F_E x`` as an entire function, with exact derivatives and ``L y``."""

    def __init__(self, samples, rule, a: float):
        self.a = a
        self.nodes = rule.nodes
        self._wx = rule.weights * np.asarray(samples)

    @classmethod
    def of(cls, x: MaxDomainFunction, rule=None) -> "FourierImage":
        rule = graded_rule(x.a) if rule is None else rule
        return cls(x.value(rule.nodes), rule, x.a)

    def derivatives(self, t):
        k = _kernel(t, self.nodes)
        xi = self.nodes
        return k @ self._wx, k @ (1j * xi * self._wx), k @ (-(xi**2) * self._wx)

    def __call__(self, t):
        y, dy, _ = self.derivatives(t)
        return y, dy

    def value(self, t):
        return self.derivatives(t)[0]

    def apply_l(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        y, dy, d2y = self.derivatives(t)
        p = 1 - t**2 / self.a**2
        return -p * d2y + 2 * t / self.a**2 * dy + t**2 * y


@dataclass(frozen=True)
class CommutatorReport:
    sup_norm: float
    lhs_sup: float
    l2_norm: float
    b_minus: complex
    b_plus: complex
    prefactor: float


def commutator_lhs(x: MaxDomainFunction, t, rule=None):
    """``F_E L x - L F_E x`` at the points ``t``."""
    rule = graded_rule(x.a) if rule is None else rule
    flx = _kernel(t, rule.nodes) @ (rule.weights * x.apply_l(rule.nodes))
    lfx = FourierImage.of(x, rule).apply_l(t)
    return flx - lfx


def commutator_rhs(b_minus, b_plus, t, a: float):
    t = np.asarray(t, dtype=float)
    return commutator_prefactor(a) * (b_plus * np.exp(1j * a * t) + b_minus * np.exp(-1j * a * t))


def commutator_residual(x: MaxDomainFunction, a: float | None = None, t_grid=None,
                        bvals: BoundaryValues | None = None, rule=None):
    """Residual of the commutator identity on an interior grid.

    Boundary values are extracted numerically unless ``bvals`` is given.
    Returns ``(GridFunction of the residual, CommutatorReport)``.
    """
    a = x.a if a is None else a
    if a != x.a:
        raise ValidationError("function and interval half widths differ")
    if t_grid is None:
        t_grid = np.linspace(-a, a, 203)[1:-1]
    t_grid = np.asarray(t_grid, dtype=float)
    bv = boundary_values(x, a) if bvals is None else bvals
    lhs = commutator_lhs(x, t_grid, rule)
    res = lhs - commutator_rhs(bv.b_minus, bv.b_plus, t_grid, a)
    quad = gauss_legendre(64).scaled(-a, a)
    l2 = float(np.sqrt(np.sum(quad.weights * np.abs(commutator_lhs(x, quad.nodes, rule)) ** 2)))
    report = CommutatorReport(float(np.max(np.abs(res))), float(np.max(np.abs(lhs))), l2,
                              bv.b_minus, bv.b_plus, commutator_prefactor(a))
    return GridFunction(a, t_grid, res, "uniform"), report


def pswf_fourier_check(pair: EigenPair, a: float | None = None, order: int = 80):
    """``gamma = <F_E chi, chi> / <chi, chi>`` and ``||F_E chi - gamma chi|| / ||F_E chi||``."""
    chi = pair.eigenfunction
    a = chi.a if a is None else a
    rule = gauss_legendre(order).scaled(-a, a)
    v, _ = chi(rule.nodes)
    y = _kernel(rule.nodes, rule.nodes) @ (rule.weights * v)
    vv = np.sum(rule.weights * np.abs(v) ** 2)
    yy = np.sum(rule.weights * np.abs(y) ** 2)
    if yy <= 1e-28 * vv:
        raise DegenerateEigenvalue("image under F_E vanishes to rounding; Rayleigh quotient undefined")
    gamma = complex(np.sum(rule.weights * y * np.conj(v)) / vv)
    resid = float(np.sqrt(np.sum(rule.weights * np.abs(y - gamma * v) ** 2) / yy))
    return gamma, resid


def spx_gamma(u: UnitaryMatrix2) -> complex:
    """``gamma`` with ``psi_- + gamma phi_-`` obeying the ``-a`` condition of ``B(U)``.

    Valid when ``u11 != 1``; the ``-a`` row of ``B(U)`` is then satisfied
    exactly, and the whole system is when ``u21 = 0``.
    """
    if abs(1 - u.u11) < 1e-12:
        raise ValidationError("u11 = 1: use the +a construction")
    return complex(1j * (1 + u.u11) / (1 - u.u11))


def domain_function(q, a: float) -> MaxDomainFunction:
    """``b_- psi_- - c_- phi_- + b_+ psi_+ - c_+ phi_+``, whose boundary values are ``q``."""
    bm, cm, bp, cp = np.asarray(q, dtype=complex)
    return (bm * psi_minus(a) + (-cm) * phi_minus(a)
            + bp * psi_plus(a) + (-cp) * phi_plus(a))


def _pick_quadruple(u: UnitaryMatrix2) -> np.ndarray:
    """Minimum-norm kernel vector of ``B(U)`` with ``b_-a = 1`` (else ``b_a = 1``)."""
    k = boundary_kernel(u)
    for row in (0, 2):
        r = k[row]
        nr = np.vdot(r, r).real
        if nr > 1e-16:
            return k @ (np.conj(r) / nr)
    raise IsIdentity("every domain element has b = 0: the extension is the distinguished one")


CENTRE_CHOICES = (0.5, 0.375, 0.625, 0.3)


@dataclass(frozen=True)
class Witness:
    function: MaxDomainFunction
    quadruple: np.ndarray
    case: str                   # "a": F_E x in D(L_U); "b": F_E x violates B(U)
    amplitudes: tuple[complex, complex]
    centres: tuple[float, float]
    endpoint_values: tuple[complex, complex]
    residual_norm: float
    violation: float


def noncommuting_witness(u: UnitaryMatrix2, a: float, case: str = "a",
                         target=None, rule=None) -> Witness:
    """A domain element of ``L_U`` whose Fourier image breaks commutation.

    ``x = x_b + A1 bump(-c) + A2 bump(c)`` where ``x_b`` carries a
    boundary-value quadruple in ``ker B(U)`` with ``b != 0`` and the bump
    amplitudes fix ``y = F_E x`` at ``+-a``.  In case ``"a"`` the target is
    ``y(+-a) = 0`` so ``y`` lies in every extension's domain and
    ``residual_norm`` (the L2 norm of ``F_E L x - L F_E x``) is the
    non-commutation certificate.  In case ``"b"`` the target makes
    ``B(U) (0, -y(-a), 0, -y(a))`` nonzero and ``violation`` is its norm.
    """
    if u.is_identity():
        raise IsIdentity("U = I commutes with the truncated Fourier operator")
    if case not in ("a", "b"):
        raise ValidationError("case must be 'a' or 'b'")
    rule = graded_rule(a) if rule is None else rule
    q = _pick_quadruple(u)
    xb = domain_function(q, a)
    bmat = boundary_condition_matrix(u)
    if target is None:
        if case == "a":
            target = (0.0, 0.0)
        else:
            # the unit endpoint pattern that violates B(U) the most
            cand = [(1.0, 0.0), (0.0, 1.0)]
            target = max(cand, key=lambda y: np.linalg.norm(bmat @ [0, -y[0], 0, -y[1]]))
    target = np.asarray(target, dtype=complex)
    ends = np.array([-a, a])
    base = FourierImage.of(xb, rule).value(ends)
    for frac in CENTRE_CHOICES:
        centres = (-frac * a, frac * a)
        bumps = [bump(c, a / 4, a) for c in centres]
        m = np.column_stack([FourierImage.of(b, rule).value(ends) for b in bumps])
        if abs(np.linalg.det(m)) > 1e-6 * np.linalg.norm(m) ** 2:
            break
    else:
        raise MatchSingular("no bump placement gives a solvable endpoint system")
    amp = np.linalg.solve(m, target - base)
    x = xb + amp[0] * bumps[0] + amp[1] * bumps[1]
    y_end = FourierImage.of(x, rule).value(ends)
    violation = float(np.linalg.norm(bmat @ np.array([0, -y_end[0], 0, -y_end[1]])))
    quad = gauss_legendre(64).scaled(-a, a)
    lhs = commutator_lhs(x, quad.nodes, rule)
    resid = float(np.sqrt(np.sum(quad.weights * np.abs(lhs) ** 2)))
    return Witness(x, q, case, (complex(amp[0]), complex(amp[1])), centres,
                   (complex(y_end[0]), complex(y_end[1])), resid, violation)
