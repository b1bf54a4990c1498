"""Endpoint analysis of the prolate / Legendre operator.

Near ``t = -a`` put ``s = t + a``; near ``t = +a`` put ``s = a - t``.  In
either local variable the eigenvalue equation ``-(p x')' + k t**2 x = lam x``
(``k = 1`` for the prolate operator, ``k = 0`` for the Legendre operator)
becomes

    s (2a - s) y'' + 2 (a - s) y' + a**2 (lam - k (s - a)**2) y = 0,

the same equation at both ends.  The indicial root 0 is double, giving a
regular solution ``x1 = sum c_n s**n`` (``c_0 = 1``) and a logarithmic one
``x2 = x1 ln s + w``, ``w = sum d_n s**n`` (``d_0 = 0``).  Matching powers of
``s`` gives

    2a (n+1)**2 c[n+1] = (n(n+1) - a**2 (lam - k a**2)) c[n]
                         - 2 k a**3 c[n-1] + k a**2 c[n-2]

and the same recurrence for ``d`` with the source term
``(2n + 1) c[n] - 4a (n+1) c[n+1]`` added on the right.

Generalized boundary values are the limits

    b = lim (t - e) x'(t),     c = lim ((t - e) ln|t - e| x'(t) - x(t))

at each endpoint ``e``.  For ``x = c1 x1 + c2 x2`` they are ``(b, c) = (c2, -c1)``
at either end.  The endpoint sesquilinear forms come out as

    [x, y]_{-a} = -(2/a) (c_x conj(b_y) - b_x conj(c_y))   at -a,
    [x, y]^{a}  = +(2/a) (c_x conj(b_y) - b_x conj(c_y))   at +a,

so that ``Omega(x, y) = ([x,y]^a - [x,y]_{-a}) / i`` satisfies
``(a/2) Omega = J`` on the basis ``(phi_-, psi_-, phi_+, psi_+)`` and
``b = (i a / 2) Omega(x, phi)``.  These constants were fixed by requiring both
identities simultaneously; the Legendre-operator flux tends to
``(2/a) b_{-a}`` at ``-a`` and ``-(2/a) b_a`` at ``+a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as nppoly

from .errors import GridMismatch, NoConvergence, OutOfRadius, TruncationTooShort, ValidationError

MINUS_A = "minus_a"
PLUS_A = "plus_a"
ENDPOINTS = (MINUS_A, PLUS_A)

DEFAULT_TERMS = 40
MAX_TERMS = 4000


def _check_endpoint(endpoint):
    if endpoint not in ENDPOINTS:
        raise ValidationError(f"endpoint must be one of {ENDPOINTS}, got {endpoint!r}")


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on nodes inside (-a, a).

    ``weights`` are the quadrature weights of ``node_family``; they are needed
    for inner products and for the truncated Fourier operator.
    """

    a: float
    nodes: np.ndarray
    values: np.ndarray
    node_family: str = "unspecified"
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values)
        if nodes.ndim != 1 or values.shape != nodes.shape:
            raise ValidationError("nodes and values must be 1-d arrays of equal length")
        if np.any(np.diff(nodes) <= 0):
            raise ValidationError("grid nodes must be strictly increasing")
        if nodes.size and (nodes[0] <= -self.a or nodes[-1] >= self.a):
            raise ValidationError("grid nodes must lie strictly inside (-a, a)")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.shape != nodes.shape:
                raise ValidationError("weights must match nodes")
            object.__setattr__(self, "weights", w)

    def _require_weights(self):
        if self.weights is None:
            raise GridMismatch(f"node family {self.node_family!r} carries no quadrature weights")
        return self.weights

    def inner(self, other: "GridFunction") -> complex:
        w = self._require_weights()
        if other.nodes.shape != self.nodes.shape or np.any(other.nodes != self.nodes):
            raise GridMismatch("inner product needs functions on the same grid")
        return complex(np.sum(w * self.values * np.conj(other.values)))

    def norm(self) -> float:
        w = self._require_weights()
        return float(np.sqrt(np.sum(w * np.abs(self.values) ** 2)))

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.a, self.nodes, values, self.node_family, self.weights)


@dataclass(frozen=True)
class FrobeniusSolution:
    endpoint: str
    lam: complex
    a: float
    analytic_coeffs: np.ndarray
    log_coeffs: np.ndarray
    kind: str
    potential: bool = True

    @property
    def order(self) -> int:
        return len(self.analytic_coeffs)

    def to_json_dict(self) -> dict:
        def enc(arr):
            return [[float(np.real(z)), float(np.imag(z))] for z in arr]
        lam = complex(self.lam)
        return {
            "endpoint": self.endpoint,
            "kind": self.kind,
            "lambda": [lam.real, lam.imag],
            "a": self.a,
            "potential": self.potential,
            "order": self.order,
            "analytic_coeffs": enc(self.analytic_coeffs),
            "log_coeffs": enc(self.log_coeffs),
        }


def frobenius_coefficients(lam, a: float, n_terms: int, potential: bool = True):
    """Coefficients ``(c, d)`` of the regular solution and of the ``w`` part."""
    dtype = complex if np.iscomplexobj(lam) and complex(lam).imag != 0 else float
    lam = lam if dtype is complex else float(np.real(lam))
    k = 1.0 if potential else 0.0
    c = np.zeros(n_terms, dtype=dtype)
    d = np.zeros(n_terms, dtype=dtype)
    c[0] = 1.0
    shift = a * a * (lam - k * a * a)
    for n in range(n_terms - 1):
        denom = 2 * a * (n + 1) ** 2
        cm1 = c[n - 1] if n >= 1 else 0.0
        cm2 = c[n - 2] if n >= 2 else 0.0
        c[n + 1] = ((n * (n + 1) - shift) * c[n] - 2 * k * a**3 * cm1 + k * a * a * cm2) / denom
        dm1 = d[n - 1] if n >= 1 else 0.0
        dm2 = d[n - 2] if n >= 2 else 0.0
        source = (2 * n + 1) * c[n] - 4 * a * (n + 1) * c[n + 1]
        d[n + 1] = (source + (n * (n + 1) - shift) * d[n] - 2 * k * a**3 * dm1
                    + k * a * a * dm2) / denom
    return c, d


def normal_form_series(lam, a: float, n_terms: int, potential: bool = False):
    """Taylor coefficients of ``f`` and ``g`` in ``s y'' + f(s) y' + g(s) y = 0``.

    Dividing the local equation by ``2a - s`` gives
    ``f = 2(a - s)/(2a - s)`` and ``g = a**2 (lam - k (s - a)**2)/(2a - s)``.
    """
    k = 1.0 if potential else 0.0
    geo = (1.0 / (2 * a)) ** (np.arange(n_terms) + 1)          # 1/(2a - s)
    f = np.convolve([2 * a, -2.0], geo)[:n_terms]
    poly = a * a * np.array([lam - k * a * a, 2 * k * a, -k])
    g = np.convolve(poly, geo)[:n_terms]
    return f, g


def terms_for_radius(lam, a: float, radius: float, potential: bool = True,
                     start: int = DEFAULT_TERMS) -> int:
    """Smallest truncation (>= start) whose tail is negligible out to ``radius``."""
    n = start
    while n <= MAX_TERMS:
        c, d = frobenius_coefficients(lam, a, n, potential)
        powers = radius ** np.arange(n)
        tc, td = np.abs(c) * powers, np.abs(d) * powers
        head = max(tc.max(), td.max())
        if max(tc[-4:].max(), td[-4:].max()) <= 1e-18 * head:
            return n
        n *= 2
    raise NoConvergence(f"Frobenius series did not settle within {MAX_TERMS} terms")


def _coefficients_batch(lams: np.ndarray, a: float, n_terms: int, potential: bool):
    """The recurrence of ``frobenius_coefficients`` run for many real lambdas at once."""
    k = 1.0 if potential else 0.0
    m = lams.size
    c = np.zeros((n_terms, m))
    d = np.zeros((n_terms, m))
    c[0] = 1.0
    shift = a * a * (lams - k * a * a)
    zero = np.zeros(m)
    for n in range(n_terms - 1):
        denom = 2 * a * (n + 1) ** 2
        cm1 = c[n - 1] if n >= 1 else zero
        cm2 = c[n - 2] if n >= 2 else zero
        c[n + 1] = ((n * (n + 1) - shift) * c[n] - 2 * k * a**3 * cm1 + k * a * a * cm2) / denom
        dm1 = d[n - 1] if n >= 1 else zero
        dm2 = d[n - 2] if n >= 2 else zero
        source = (2 * n + 1) * c[n] - 4 * a * (n + 1) * c[n + 1]
        d[n + 1] = (source + (n * (n + 1) - shift) * d[n] - 2 * k * a**3 * dm1
                    + k * a * a * dm2) / denom
    return c, d


def local_pair_batch(lams, a: float, s: float, potential: bool = True):
    """``(y1, y1', y2, y2')`` at local distance ``s`` for an array of real lambdas.

    Derivatives are with respect to ``s``.  The truncation is doubled until
    the tail is negligible for every lambda, as in ``terms_for_radius``.
    """
    lams = np.asarray(lams, dtype=float).ravel()
    if not 0 < s <= a:
        raise OutOfRadius("batch evaluation needs 0 < s <= a")
    n = DEFAULT_TERMS
    while True:
        c, d = _coefficients_batch(lams, a, n, potential)
        powers = s ** np.arange(n)
        tc = np.abs(c) * powers[:, None]
        td = np.abs(d) * powers[:, None]
        head = np.maximum(tc.max(axis=0), td.max(axis=0))
        tail = np.maximum(tc[-4:].max(axis=0), td[-4:].max(axis=0))
        if np.all(tail <= 1e-18 * head):
            break
        n *= 2
        if n > MAX_TERMS:
            raise NoConvergence(f"Frobenius series did not settle within {MAX_TERMS} terms")
    idx = np.arange(n)
    dpow = np.zeros(n)
    dpow[1:] = idx[1:] * s ** (idx[1:] - 1)
    y1, dy1 = powers @ c, dpow @ c
    w, dw = powers @ d, dpow @ d
    lg = np.log(s)
    return y1, dy1, y1 * lg + w, dy1 * lg + y1 / s + dw


def frobenius_pair(lam, endpoint: str, a: float, n_terms: int = DEFAULT_TERMS,
                   potential_on: bool = True, radius: float | None = None):
    """Regular and logarithmic Frobenius solutions at ``endpoint``.

    With ``radius`` set, ``n_terms`` is extended until the series tail is
    negligible on ``|s| <= radius``.
    """
    _check_endpoint(endpoint)
    if a <= 0:
        raise ValidationError("half width must be positive")
    if n_terms < 4:
        raise TruncationTooShort("Frobenius truncation needs at least 4 terms")
    if radius is not None:
        n_terms = terms_for_radius(lam, a, radius, potential_on, start=n_terms)
    c, d = frobenius_coefficients(lam, a, n_terms, potential_on)
    c.setflags(write=False)
    d.setflags(write=False)
    empty = np.zeros(0, dtype=c.dtype)
    regular = FrobeniusSolution(endpoint, lam, a, c, empty, "regular", potential_on)
    logarithmic = FrobeniusSolution(endpoint, lam, a, c, d, "logarithmic", potential_on)
    return regular, logarithmic


def _local_series(sol: FrobeniusSolution, s):
    """y, y', y'' in the local variable s (> 0 for the logarithmic kind)."""
    c = sol.analytic_coeffs
    dc = nppoly.polyder(c)
    d2c = nppoly.polyder(c, 2)
    y = nppoly.polyval(s, c)
    dy = nppoly.polyval(s, dc)
    d2y = nppoly.polyval(s, d2c)
    if sol.kind == "regular":
        return y, dy, d2y
    w = sol.log_coeffs
    lg = np.log(s)
    val = y * lg + nppoly.polyval(s, w)
    der = dy * lg + y / s + nppoly.polyval(s, nppoly.polyder(w))
    der2 = d2y * lg + 2 * dy / s - y / s**2 + nppoly.polyval(s, nppoly.polyder(w, 2))
    return val, der, der2


def local_distance(endpoint: str, t, a: float):
    t = np.asarray(t, dtype=float)
    return t + a if endpoint == MINUS_A else a - t


def eval_local(sol: FrobeniusSolution, s, second: bool = False):
    """Evaluate at distance ``s`` from the endpoint; derivatives are w.r.t. t."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0) or np.any(s > sol.a * (1 + 1e-12)):
        raise OutOfRadius("evaluation point outside the guarded disc |t - endpoint| <= a")
    y, dy, d2y = _local_series(sol, s)
    sign = 1.0 if sol.endpoint == MINUS_A else -1.0
    if second:
        return y, sign * dy, d2y
    return y, sign * dy


def eval_solution(sol: FrobeniusSolution, t, second: bool = False):
    """Value and t-derivative (and optionally the second derivative) at t."""
    return eval_local(sol, local_distance(sol.endpoint, t, sol.a), second=second)


def w_part(sol: FrobeniusSolution, t):
    """The holomorphic ``w`` part of a logarithmic solution."""
    s = local_distance(sol.endpoint, t, sol.a)
    return nppoly.polyval(s, sol.log_coeffs) if sol.log_coeffs.size else np.zeros_like(s)


def ode_residual(sol: FrobeniusSolution, t):
    """Pointwise ``-(p x')' + k t**2 x - lam x`` and a magnitude scale for it."""
    t = np.asarray(t, dtype=float)
    x, dx, d2x = eval_solution(sol, t, second=True)
    a = sol.a
    p = 1 - t**2 / a**2
    pot = t**2 if sol.potential else 0.0
    terms = (-p * d2x, 2 * t / a**2 * dx, (pot - sol.lam) * x)
    res = terms[0] + terms[1] + terms[2]
    scale = np.abs(terms[0]) + np.abs(terms[1]) + np.abs(terms[2])
    return res, scale


def boundary_values_series(c1, c2, endpoint: str = MINUS_A):
    """``(b, c)`` at ``endpoint`` of ``c1 x1 + c2 x2`` built from that endpoint's pair.

    The result does not depend on lambda or a: the logarithmic solution
    carries the whole ``b`` and the regular one sets ``c`` through its unit
    value at the endpoint.
    """
    _check_endpoint(endpoint)
    return complex(c2), complex(-c1)


@dataclass(frozen=True)
class EndpointLimit:
    b: complex
    c: complex
    error: float


def _richardson(seq: np.ndarray, depth: int):
    """Diagonal of the Richardson tableau for a ratio-2 sequence (coarse to fine)."""
    table = [np.asarray(seq, dtype=complex)]
    for m in range(1, depth + 1):
        prev = table[-1]
        fac = 2.0 ** m
        table.append((fac * prev[1:] - prev[:-1]) / (fac - 1))
    return np.array([col[-1] for col in table])


def boundary_values_numeric(x, endpoint: str, a: float, j_min: int = 10, j_max: int = 40,
                            depth: int = 4, rtol: float = 1e-5) -> EndpointLimit:
    """Extract ``(b, c)`` at ``endpoint`` from pointwise values of ``x``.

    ``x(t)`` must return ``(value, derivative)``.  Samples are taken at
    distances ``a * 2**-j`` for ``j = j_min..j_max``; the limits are
    Richardson-extrapolated from the ``depth + 1`` closest samples.
    """
    _check_endpoint(endpoint)
    js = np.arange(j_min, j_max + 1)
    nominal = a * 2.0 ** (-js.astype(float))
    if endpoint == MINUS_A:
        t = -a + nominal
        offset = t + a          # exact by Sterbenz; this is t - e
        dist = offset
    else:
        t = a - nominal
        dist = a - t
        offset = -dist
    value, deriv = x(t)
    value = np.asarray(value, dtype=complex)
    deriv = np.asarray(deriv, dtype=complex)
    b_seq = offset * deriv
    c_seq = offset * np.log(dist) * deriv - value
    tail = slice(len(js) - depth - 1, None)
    b_diag = _richardson(b_seq[tail], depth)
    c_diag = _richardson(c_seq[tail], depth)
    b, c = b_diag[-1], c_diag[-1]
    err = max(abs(b_diag[-1] - b_diag[-2]), abs(c_diag[-1] - c_diag[-2]))
    scale = max(1.0, abs(b), abs(c))
    if not np.isfinite(err) or err > rtol * scale:
        raise NoConvergence(f"boundary-value extrapolation at {endpoint} did not settle (err {err:.2e})")
    return EndpointLimit(complex(b), complex(c), float(err))


@dataclass(frozen=True)
class BoundaryValues:
    b_minus: complex
    c_minus: complex
    b_plus: complex
    c_plus: complex

    @property
    def quadruple(self) -> np.ndarray:
        return np.array([self.b_minus, self.c_minus, self.b_plus, self.c_plus], dtype=complex)


def boundary_values(x, a: float, **kwargs) -> BoundaryValues:
    lo = boundary_values_numeric(x, MINUS_A, a, **kwargs)
    hi = boundary_values_numeric(x, PLUS_A, a, **kwargs)
    return BoundaryValues(lo.b, lo.c, hi.b, hi.c)


def concomitant(x_pair, y_pair, t, a: float):
    """``[x, y](t) = -p(t) (x'(t) conj(y(t)) - x(t) conj(y'(t)))``."""
    x, dx = x_pair
    y, dy = y_pair
    t = np.asarray(t, dtype=float)
    return -(1 - t**2 / a**2) * (dx * np.conj(y) - x * np.conj(dy))


def endpoint_forms(bx: BoundaryValues, by: BoundaryValues, a: float) -> tuple[complex, complex]:
    """The limits ``([x,y]_{-a}, [x,y]^{a})`` from generalized boundary values."""
    lo = -(2 / a) * (bx.c_minus * np.conj(by.b_minus) - bx.b_minus * np.conj(by.c_minus))
    hi = (2 / a) * (bx.c_plus * np.conj(by.b_plus) - bx.b_plus * np.conj(by.c_plus))
    return complex(lo), complex(hi)


def boundary_form(bx: BoundaryValues, by: BoundaryValues, a: float) -> complex:
    """``Omega(x, y) = ([x,y]^a - [x,y]_{-a}) / i``."""
    lo, hi = endpoint_forms(bx, by, a)
    return (hi - lo) / 1j


def green_defect(x, y, rule) -> complex:
    """``<Mx, y> - <x, My>`` by quadrature on ``rule`` (nodes inside (-a, a))."""
    t = rule.nodes
    mx, my = x.apply_m(t), y.apply_m(t)
    vx, vy = x.value(t), y.value(t)
    return complex(np.sum(rule.weights * (mx * np.conj(vy) - vx * np.conj(my))))
