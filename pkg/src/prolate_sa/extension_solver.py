"""Spectra of arbitrary self-adjoint extensions by shooting.

Near each endpoint the Frobenius pair is exact; in between, the state
``(x, F = p x')`` is marched with an adaptive 8th-order Runge-Kutta method.
The connection matrix ``T(lam)`` expresses the left pair through the right one,

    x1_minus = T11 x1_plus + T12 x2_plus,
    x2_minus = T21 x1_plus + T22 x2_plus,

so the general solution ``alpha x1_minus + beta x2_minus`` has boundary-value
quadruple ``A (alpha, beta)`` with

    A = [[0, 1], [-1, 0], [T12, T22], [-T11, -T21]].

Eigenvalues of ``L_U`` are the real zeros of ``det(B(U) A)``.  Multiplying by
``exp(-i arg(det U) / 2)`` makes this determinant real for real ``lam`` and
every unitary ``U`` (all 2x2 minors of ``A`` are real and those of ``B(U)``
pair up under conjugation), which lets sign changes bracket the roots.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq, minimize_scalar

from .boundary_algebra import UnitaryMatrix2, boundary_condition_matrix
from .endpoint_forms import (MINUS_A, PLUS_A, GridFunction, eval_solution,
                             frobenius_pair, local_pair_batch)
from .errors import (MarchFailure, MatchSingular, NotAnEigenvalue, ScanTooCoarse,
                     ValidationError)
from .legendre_backend import graded_rule

HANDOFF = 0.25          # series/march handoff distance, in units of a
MARCH_RTOL = 1e-12
DEFAULT_CELLS = 400
DOUBLE_ROOT_TOL = 1e-6
MAX_REFINEMENTS = 4


@dataclass(frozen=True)
class ConnectionMatrix:
    matrix: np.ndarray
    lam: float
    a: float
    n_steps: int
    wronskian_drift: float

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))


@dataclass(frozen=True)
class _March:
    lam: float
    a: float
    potential: bool
    solution: object      # scipy OdeSolution over [t0, t1], or None
    t0: float
    t1: float
    n_steps: int
    start: np.ndarray
    end: np.ndarray


def _rhs(lam, a, k):
    def f(t, y):
        p = 1 - t * t / (a * a)
        v = k * t * t - lam
        return np.array([y[1] / p, v * y[0], y[3] / p, v * y[2]])
    return f


def _seed(lam, a, potential):
    t0 = -a + HANDOFF * a
    reg, log = frobenius_pair(lam, MINUS_A, a, potential_on=potential, radius=HANDOFF * a)
    p0 = 1 - t0**2 / a**2
    x1, d1 = eval_solution(reg, t0)
    x2, d2 = eval_solution(log, t0)
    return np.array([x1, p0 * d1, x2, p0 * d2], dtype=float)


@lru_cache(maxsize=8192)
def _march(lam: float, a: float, potential: bool, dense: bool = False) -> _March:
    t0, t1 = -a + HANDOFF * a, a - HANDOFF * a
    y0 = _seed(lam, a, potential)
    k = 1.0 if potential else 0.0
    sol = solve_ivp(_rhs(lam, a, k), (t0, t1), y0, method="DOP853", rtol=MARCH_RTOL,
                    atol=1e-14 * np.max(np.abs(y0)), dense_output=dense)
    if not sol.success:
        raise MarchFailure(f"interior march failed at lambda={lam}: {sol.message}")
    return _March(lam, a, potential, sol.sol if dense else None, t0, t1,
                  int(sol.t.size - 1), sol.y[:, 0].copy(), sol.y[:, -1].copy())


def _plus_pair_matrix(lam, a, potential):
    t1 = a - HANDOFF * a
    reg, log = frobenius_pair(lam, PLUS_A, a, potential_on=potential, radius=HANDOFF * a)
    x1, d1 = eval_solution(reg, t1)
    x2, d2 = eval_solution(log, t1)
    return np.array([[x1, x2], [d1, d2]], dtype=float)


def _match(lam, a, potential, y1):
    t1 = a - HANDOFF * a
    p1 = 1 - t1**2 / a**2
    match = _plus_pair_matrix(lam, a, potential)
    wr = np.linalg.det(match) * p1        # p (x1 x2' - x2 x1') of the +a pair, = -2/a
    if abs(wr) < 1e-8 / a:
        raise MatchSingular("Wronskian of the +a Frobenius pair vanished")
    rhs = np.array([[y1[0], y1[2]], [y1[1] / p1, y1[3] / p1]])
    return np.linalg.solve(match, rhs).T


@lru_cache(maxsize=8192)
def _connection_cached(lam: float, a: float, potential: bool) -> ConnectionMatrix:
    m = _march(lam, a, potential)
    y0, y1 = m.start, m.end
    t = _match(lam, a, potential, y1)
    w0 = y0[0] * y0[3] - y0[2] * y0[1]
    w1 = y1[0] * y1[3] - y1[2] * y1[1]
    drift = abs(w1 - w0) / abs(w0)
    t.setflags(write=False)
    return ConnectionMatrix(t, lam, a, m.n_steps, float(drift))


def connection_matrix(lam: float, a: float, potential: bool = True) -> ConnectionMatrix:
    """``T(lam)`` mapping the ``-a`` Frobenius pair onto the ``+a`` pair."""
    if not np.isfinite(lam):
        raise ValidationError("lambda must be finite")
    if a <= 0:
        raise ValidationError("half width must be positive")
    return _connection_cached(float(lam), float(a), bool(potential))


def _batch_rhs(lams, a, k):
    n = lams.size

    def f(t, y):
        y = y.reshape(4, n)
        p = 1 - t * t / (a * a)
        v = k * t * t - lams
        return np.concatenate([y[1] / p, v * y[0], y[3] / p, v * y[2]])
    return f


@lru_cache(maxsize=64)
def _connection_batch_cached(lams: tuple, a: float, potential: bool) -> np.ndarray:
    lam_arr = np.array(lams)
    h = HANDOFF * a
    t0, t1 = -a + h, a - h
    p0 = 1 - t0**2 / a**2
    y1s, dy1s, y2s, dy2s = local_pair_batch(lam_arr, a, h, potential)
    y0 = np.array([y1s, p0 * dy1s, y2s, p0 * dy2s])          # (4, n); d/dt = d/ds at -a
    k = 1.0 if potential else 0.0
    n = len(lams)
    # per-component atol keeps the weakest solution from being drowned by the RMS norm
    atol = 1e-14 * np.repeat(np.max(np.abs(y0), axis=0)[None, :], 4, axis=0).ravel()
    sol = solve_ivp(_batch_rhs(lam_arr, a, k), (t0, t1), y0.ravel(), method="DOP853",
                    rtol=max(MARCH_RTOL / np.sqrt(n), 3e-14), atol=atol / np.sqrt(n))
    if not sol.success:
        raise MarchFailure(f"batched interior march failed: {sol.message}")
    y1 = sol.y[:, -1].reshape(4, -1)
    # the same local series serve at +a, with d/dt = -d/ds
    match = np.empty((n, 2, 2))
    match[:, 0, 0], match[:, 0, 1] = y1s, y2s
    match[:, 1, 0], match[:, 1, 1] = -dy1s, -dy2s
    p1 = 1 - t1**2 / a**2
    wr = np.abs(np.linalg.det(match)) * p1
    if np.any(wr < 1e-8 / a):
        raise MatchSingular("Wronskian of the +a Frobenius pair vanished")
    rhs = np.empty((n, 2, 2))
    rhs[:, 0, 0], rhs[:, 0, 1] = y1[0], y1[2]
    rhs[:, 1, 0], rhs[:, 1, 1] = y1[1] / p1, y1[3] / p1
    out = np.transpose(np.linalg.solve(match, rhs), (0, 2, 1)).copy()
    out.setflags(write=False)
    return out


def connection_matrices(lams, a: float, potential: bool = True) -> np.ndarray:
    """``T(lam)`` for many ``lam`` at once, stacked as an ``(n, 2, 2)`` array.

    All solutions are marched as one system; the tolerance is tightened by
    ``sqrt(n)`` so the RMS error control still bounds each member.
    """
    lams = tuple(float(x) for x in np.asarray(lams, dtype=float).ravel())
    if not all(np.isfinite(lams)):
        raise ValidationError("lambda must be finite")
    if a <= 0:
        raise ValidationError("half width must be positive")
    return _connection_batch_cached(lams, float(a), bool(potential))


def quadruple_map(t: np.ndarray) -> np.ndarray:
    """The 4x2 matrix sending ``(alpha, beta)`` to ``(b_-a, c_-a, b_a, c_a)``."""
    return np.array([[0.0, 1.0], [-1.0, 0.0], [t[0, 1], t[1, 1]], [-t[0, 0], -t[1, 0]]])


@dataclass(frozen=True)
class SecularReport:
    lam: float
    det_value: complex
    indicator: float
    condition: float
    singular_values: tuple[float, float]
    scale: float


def secular_system(u: UnitaryMatrix2, a: float, lam: float, potential: bool = True):
    t = connection_matrix(lam, a, potential).matrix
    amat = quadruple_map(t)
    return boundary_condition_matrix(u) @ amat, amat


# det T = W(x1-, x2-) / W(x1+, x2+) = (2/a) / (-2/a) for every lam
DET_T = -1.0
_PAIRS = [(i, j) for i in range(4) for j in range(i + 1, 4)]


def _det_bilinear(bmat, amat) -> np.ndarray:
    """``det(B A)`` by Cauchy-Binet for a stack of ``A``, with the exact ``det T`` minor.

    The march resolves each row of ``T`` to working precision relative to its
    norm, but for very negative ``lam`` both rows align with the growing mode
    and ``T11 T22 - T12 T21`` cancels catastrophically.  Every other minor of
    ``A`` is linear in ``T``.
    """
    out = np.zeros(amat.shape[0], dtype=complex)
    for i, j in _PAIRS:
        mb = bmat[0, i] * bmat[1, j] - bmat[0, j] * bmat[1, i]
        if (i, j) == (2, 3):
            ma = DET_T
        else:
            ma = amat[:, i, 0] * amat[:, j, 1] - amat[:, j, 0] * amat[:, i, 1]
        out += mb * ma
    return out


def _phase(u: UnitaryMatrix2) -> complex:
    return np.exp(-0.5j * np.angle(u.det))


def secular_det(u: UnitaryMatrix2, a: float, lam: float, potential: bool = True) -> SecularReport:
    """Determinant of the 2x2 boundary system at ``lam`` with a real indicator.

    ``indicator`` is the phase-rotated determinant divided by
    ``||B||_F**2 ||A||_F**2``, a scale-free real function of ``lam``.
    """
    s, amat = secular_system(u, a, lam, potential)
    det = complex(_det_bilinear(boundary_condition_matrix(u), amat[None])[0])
    scale = float(np.linalg.norm(boundary_condition_matrix(u)) ** 2 * np.linalg.norm(amat) ** 2)
    sv = np.linalg.svd(s, compute_uv=False)
    cond = float(sv[0] / sv[1]) if sv[1] > 0 else float("inf")
    ind = (_phase(u) * det).real / scale
    return SecularReport(float(lam), det, float(ind), cond, (float(sv[0]), float(sv[1])), scale)


def _indicator(u, a, potential):
    return lambda lam: secular_det(u, a, lam, potential).indicator


def _indicator_batch(u, tmats) -> np.ndarray:
    """The real indicator for a stack of connection matrices."""
    bmat = boundary_condition_matrix(u)
    amat = np.zeros((len(tmats), 4, 2))
    amat[:, 0, 1], amat[:, 1, 0] = 1.0, -1.0
    amat[:, 2, 0], amat[:, 2, 1] = tmats[:, 0, 1], tmats[:, 1, 1]
    amat[:, 3, 0], amat[:, 3, 1] = -tmats[:, 0, 0], -tmats[:, 1, 0]
    det = _det_bilinear(bmat, amat)
    scale = np.linalg.norm(bmat) ** 2 * np.sum(amat**2, axis=(1, 2))
    return (_phase(u) * det).real / scale


def _is_double_root(u, a, lam, potential) -> bool:
    s, amat = secular_system(u, a, lam, potential)
    scale = np.linalg.norm(boundary_condition_matrix(u)) * np.linalg.norm(amat)
    return bool(np.linalg.svd(s, compute_uv=False)[0] / scale < DOUBLE_ROOT_TOL)


@dataclass(frozen=True)
class ScanRoot:
    lam: float
    multiplicity: int


def _scan_once(u, a, lo, hi, tol, cells, potential) -> list[ScanRoot]:
    grid = np.linspace(lo, hi, cells + 1)
    vals = _indicator_batch(u, connection_matrices(grid, a, potential))
    single = _indicator(u, a, potential)
    pinned = dict(zip(grid.tolist(), vals.tolist()))

    def f(x):
        # grid points keep their batched values so brackets stay consistent
        return pinned[x] if x in pinned else single(x)
    roots: list[ScanRoot] = []
    for i in range(cells):
        f0, f1 = vals[i], vals[i + 1]
        if f0 == 0.0:
            roots.append(ScanRoot(float(grid[i]), 1))
        elif f0 * f1 < 0:
            roots.append(ScanRoot(float(brentq(f, grid[i], grid[i + 1], xtol=tol, rtol=1e-15)), 1))
    if vals[-1] == 0.0:
        roots.append(ScanRoot(float(grid[-1]), 1))
    mags = np.abs(vals)
    for i in range(1, cells):
        if not (mags[i] <= mags[i - 1] and mags[i] <= mags[i + 1]):
            continue
        if vals[i - 1] * vals[i] <= 0 or vals[i] * vals[i + 1] <= 0:
            continue   # a sign change here is already handled
        # minimize the indicator oriented positive; a negative minimum means two roots
        sgn = np.sign(vals[i])
        res = minimize_scalar(lambda x: sgn * f(x), bounds=(grid[i - 1], grid[i + 1]),
                              method="bounded", options={"xatol": tol})
        xm = float(res.x)
        fm = f(xm)
        if fm * vals[i] < 0:
            # the indicator dips through zero twice inside this window
            roots.append(ScanRoot(float(brentq(f, grid[i - 1], xm, xtol=tol, rtol=1e-15)), 1))
            roots.append(ScanRoot(float(brentq(f, xm, grid[i + 1], xtol=tol, rtol=1e-15)), 1))
        elif _is_double_root(u, a, xm, potential):
            roots.append(ScanRoot(xm, 2))
    roots.sort(key=lambda r: r.lam)
    cell = (hi - lo) / cells
    for r0, r1 in zip(roots[:-1], roots[1:]):
        if r1.lam - r0.lam < 2 * cell:
            raise ScanTooCoarse(f"roots {r0.lam:.12g} and {r1.lam:.12g} closer than two scan cells")
    return roots


def eigenvalues_scan_report(u: UnitaryMatrix2, a: float, lam_min: float, lam_max: float,
                            tol: float = 1e-11, cells: int = DEFAULT_CELLS,
                            potential: bool = True, refine: bool = True) -> list[ScanRoot]:
    """Roots with multiplicities; the grid is doubled (up to 4 times) on ``ScanTooCoarse``."""
    if not lam_min < lam_max:
        raise ValidationError("lambda_min must be below lambda_max")
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    if a <= 0:
        raise ValidationError("half width must be positive")
    for attempt in range(MAX_REFINEMENTS + 1):
        try:
            return _scan_once(u, a, lam_min, lam_max, tol, cells * 2**attempt, potential)
        except ScanTooCoarse:
            if not refine or attempt == MAX_REFINEMENTS:
                raise
    raise AssertionError("unreachable")


def eigenvalues_scan(u: UnitaryMatrix2, a: float, lam_min: float, lam_max: float,
                     tol: float = 1e-11, **kwargs) -> list[float]:
    """Ascending eigenvalues of ``L_U`` in ``[lam_min, lam_max]``, repeated by multiplicity."""
    out = []
    for r in eigenvalues_scan_report(u, a, lam_min, lam_max, tol, **kwargs):
        out.extend([r.lam] * r.multiplicity)
    return out


def negative_window(a: float) -> tuple[float, float]:
    return -100.0 / a**2, 0.0


class ShootingSolution:
    """The solution ``alpha x1_minus + beta x2_minus`` evaluated anywhere in (-a, a)."""

    def __init__(self, lam: float, a: float, alpha: complex, beta: complex, potential: bool = True):
        self.lam, self.a = float(lam), float(a)
        self.alpha, self.beta = complex(alpha), complex(beta)
        self.potential = potential
        self.connection = connection_matrix(lam, a, potential).matrix
        self._march = _march(self.lam, self.a, potential, True)
        self._minus = frobenius_pair(self.lam, MINUS_A, a, potential_on=potential, radius=HANDOFF * a)
        self._plus = frobenius_pair(self.lam, PLUS_A, a, potential_on=potential, radius=HANDOFF * a)
        t = self.connection
        self._plus_coef = (self.alpha * t[0, 0] + self.beta * t[1, 0],
                           self.alpha * t[0, 1] + self.beta * t[1, 1])

    @property
    def quadruple(self) -> np.ndarray:
        """``(b_-a, c_-a, b_a, c_a)``, exact from the Frobenius coefficients."""
        c1p, c2p = self._plus_coef
        return np.array([self.beta, -self.alpha, c2p, -c1p], dtype=complex)

    def scaled(self, factor: complex) -> "ShootingSolution":
        return ShootingSolution(self.lam, self.a, factor * self.alpha, factor * self.beta, self.potential)

    def _series(self, pair, coef, t):
        v1, d1 = eval_solution(pair[0], t)
        v2, d2 = eval_solution(pair[1], t)
        return coef[0] * v1 + coef[1] * v2, coef[0] * d1 + coef[1] * d2

    def __call__(self, t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        a = self.a
        value = np.zeros(t.shape, dtype=complex)
        deriv = np.zeros(t.shape, dtype=complex)
        left = t <= -a + HANDOFF * a
        right = t >= a - HANDOFF * a
        mid = ~(left | right)
        if np.any(left):
            value[left], deriv[left] = self._series(self._minus, (self.alpha, self.beta), t[left])
        if np.any(right):
            value[right], deriv[right] = self._series(self._plus, self._plus_coef, t[right])
        if np.any(mid):
            y = self._march.solution(t[mid])
            p = 1 - t[mid] ** 2 / a**2
            value[mid] = self.alpha * y[0] + self.beta * y[2]
            deriv[mid] = (self.alpha * y[1] + self.beta * y[3]) / p
        return value, deriv


def null_coefficients(u: UnitaryMatrix2, a: float, lam: float, potential: bool = True,
                      tol: float = 1e-6) -> tuple[complex, complex]:
    """Null vector ``(alpha, beta)`` of the secular system at an eigenvalue."""
    s, amat = secular_system(u, a, lam, potential)
    _, sv, vh = np.linalg.svd(s)
    scale = np.linalg.norm(boundary_condition_matrix(u)) * np.linalg.norm(amat)
    if sv[1] > tol * scale:
        raise NotAnEigenvalue(f"lambda={lam} is not an eigenvalue (sigma_min/scale={sv[1] / scale:.2e})")
    null = vh[-1].conj()
    return complex(null[0]), complex(null[1])


def eigenfunction_shoot(u: UnitaryMatrix2, a: float, lam: float, potential: bool = True,
                        rule=None, return_solution: bool = False):
    """Eigenfunction of ``L_U`` at ``lam`` on a graded Gauss grid, unit L2 norm.

    The phase is fixed so that the first sample of non-negligible size is
    real and positive.
    """
    alpha, beta = null_coefficients(u, a, lam, potential)
    sol = ShootingSolution(lam, a, alpha, beta, potential)
    rule = graded_rule(a) if rule is None else rule
    values, _ = sol(rule.nodes)
    norm = np.sqrt(np.sum(rule.weights * np.abs(values) ** 2))
    big = np.abs(values) > 1e-8 * np.max(np.abs(values))
    first = values[np.argmax(big)]
    factor = np.conj(first) / abs(first) / norm
    sol = sol.scaled(factor)
    grid = GridFunction(a, rule.nodes, values * factor, "graded-gauss", rule.weights)
    return (grid, sol) if return_solution else grid


def spectrum_report(u: UnitaryMatrix2, a: float, lam_min: float, lam_max: float,
                    tol: float = 1e-11, potential: bool = True) -> dict:
    """JSON-ready spectrum with multiplicities and boundary-condition residuals."""
    bmat = boundary_condition_matrix(u)
    entries = []
    for root in eigenvalues_scan_report(u, a, lam_min, lam_max, tol, potential=potential):
        residuals = []
        if root.multiplicity == 1:
            _, sol = eigenfunction_shoot(u, a, root.lam, potential, return_solution=True)
            residuals.append(float(np.linalg.norm(bmat @ sol.quadruple)))
        entries.append({"lambda": root.lam, "multiplicity": root.multiplicity,
                        "boundary_residuals": residuals})
    return {"a": a, "U": u.to_pairs(), "eigenvalues": entries}
