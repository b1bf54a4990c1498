import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import polynomial as P

from prolate_sa import boundary_algebra as ba
from prolate_sa import endpoint_forms as ef
from prolate_sa.errors import GridMismatch, NoConvergence, OutOfRadius, TruncationTooShort, ValidationError
from prolate_sa.functions import boundary_basis, bump, smooth_function
from prolate_sa.legendre_backend import QuadratureRule, gauss_legendre, graded_rule

A = 1.0


def _combo(pair, c1, c2):
    reg, log = pair

    def x(t):
        v1, d1 = ef.eval_solution(reg, t)
        v2, d2 = ef.eval_solution(log, t)
        return c1 * v1 + c2 * v2, c1 * d1 + c2 * d2
    return x


# ---------------------------------------------------------------- Frobenius series

def test_truncation_guard():
    with pytest.raises(TruncationTooShort):
        ef.frobenius_pair(1.0, ef.MINUS_A, A, n_terms=3)
    with pytest.raises(ValidationError):
        ef.frobenius_pair(1.0, "middle", A)
    with pytest.raises(ValidationError):
        ef.frobenius_pair(1.0, ef.MINUS_A, -1.0)


def test_normal_form_coefficients():
    for lam, a in [(3.0, 1.0), (-2.0, 0.7), (10.0, 2.0)]:
        f, g = ef.normal_form_series(lam, a, 4)
        assert f[0] == pytest.approx(1.0)
        assert f[1] == pytest.approx(-1 / (2 * a))
        assert g[0] == pytest.approx(lam * a / 2)
        assert g[1] == pytest.approx(lam / 4)


@pytest.mark.parametrize("potential", [False, True])
def test_recurrence_solves_normal_form(potential):
    lam, a, n = 2.5, 1.3, 30
    c, d = ef.frobenius_coefficients(lam, a, n, potential)
    f, g = ef.normal_form_series(lam, a, n, potential)
    # s y'' + f y' + g y for the regular solution, as a truncated series
    s_y2 = np.concatenate([[0.0], P.polyder(c, 2)])[: n - 2]
    total = s_y2 + np.convolve(f, P.polyder(c))[: n - 2] + np.convolve(g, c)[: n - 2]
    assert np.max(np.abs(total)) < 1e-12 * np.max(np.abs(c))


def test_legendre_lambda_zero_regular_is_one():
    reg, log = ef.frobenius_pair(0.0, ef.MINUS_A, A, potential_on=False)
    assert reg.analytic_coeffs[0] == 1 and np.all(reg.analytic_coeffs[1:] == 0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_legendre_lambda_zero_log_closed_form(a):
    _, log = ef.frobenius_pair(0.0, ef.MINUS_A, a, potential_on=False, radius=a / 4)
    t = -a + a / 4
    val, der = ef.eval_solution(log, t)
    # ln((a+t)/(a-t)) with the constant fixed by w(-a) = 0
    assert val == pytest.approx(np.log((a + t) / (a - t)) + np.log(2 * a), abs=1e-10)
    assert der == pytest.approx(2 * a / ((a + t) * (a - t)), rel=1e-10)


@pytest.mark.parametrize("endpoint", ef.ENDPOINTS)
def test_ode_residual_lambda_three(endpoint):
    reg, log = ef.frobenius_pair(3.0, endpoint, 1.0, n_terms=40)
    s = np.linspace(1e-3, 0.5, 60)
    t = -1 + s if endpoint == ef.MINUS_A else 1 - s
    for sol in (reg, log):
        res, scale = ef.ode_residual(sol, t)
        assert np.max(np.abs(res) / scale) < 1e-8


def test_series_invariants_and_json():
    reg, log = ef.frobenius_pair(1.5, ef.PLUS_A, 1.0)
    assert reg.analytic_coeffs[0] == 1 and reg.log_coeffs.size == 0
    assert log.log_coeffs[0] == 0 and log.kind == "logarithmic"
    assert reg.order == 40
    blob = json.loads(json.dumps(log.to_json_dict()))
    assert blob["endpoint"] == "plus_a" and len(blob["log_coeffs"]) == 40


def test_radius_extends_truncation():
    reg, _ = ef.frobenius_pair(50.0, ef.MINUS_A, 1.0, n_terms=8, radius=1.0)
    assert reg.order > 8


def test_eval_regular_at_endpoint_and_w_part():
    reg, log = ef.frobenius_pair(2.0, ef.MINUS_A, 1.0)
    assert ef.eval_solution(reg, -1.0)[0] == pytest.approx(1.0, abs=0)
    assert ef.w_part(log, -1.0) == 0
    reg, log = ef.frobenius_pair(2.0, ef.PLUS_A, 1.0)
    assert ef.eval_solution(reg, 1.0)[0] == pytest.approx(1.0, abs=0)
    assert ef.w_part(log, 1.0) == 0


def test_log_solution_near_endpoint():
    _, log = ef.frobenius_pair(0.0, ef.MINUS_A, 1.0)
    val, _ = ef.eval_solution(log, -1 + 1e-6)
    assert val == pytest.approx(np.log(1e-6), rel=1e-4)


def test_out_of_radius():
    reg, _ = ef.frobenius_pair(1.0, ef.MINUS_A, 1.0)
    with pytest.raises(OutOfRadius):
        ef.eval_solution(reg, 0.5)
    with pytest.raises(OutOfRadius):
        ef.eval_solution(reg, -1.5)


def test_mirror_symmetry_of_endpoints():
    lo = ef.frobenius_pair(4.0, ef.MINUS_A, 1.2, radius=0.6)
    hi = ef.frobenius_pair(4.0, ef.PLUS_A, 1.2, radius=0.6)
    t = np.linspace(-1.19, -0.7, 9)
    for a_sol, b_sol in zip(lo, hi):
        va, da = ef.eval_solution(a_sol, t)
        vb, db = ef.eval_solution(b_sol, -t)
        assert np.allclose(va, vb, rtol=1e-13) and np.allclose(da, -db, rtol=1e-13)


def _endpoint_rule(a, order):
    """Geometric panels in the distance s on (0, a/2), graded toward s = 0."""
    base = gauss_legendre(order)
    br = np.concatenate([[0.0], (a / 2) * 2.0 ** -np.arange(60, -1, -1)])
    nodes, weights = [], []
    for lo, hi in zip(br[:-1], br[1:]):
        r = base.scaled(lo, hi)
        nodes.append(r.nodes)
        weights.append(r.weights)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), order)


@pytest.mark.parametrize("lam", [0.0, 1.0, 10.0, 1j])
def test_square_integrable_near_endpoint(lam):
    for sol in ef.frobenius_pair(lam, ef.MINUS_A, A, radius=A / 2):
        norms = []
        for order in (12, 24):
            r = _endpoint_rule(A, order)
            v, _ = ef.eval_local(sol, r.nodes)
            norms.append(np.sqrt(np.sum(r.weights * np.abs(v) ** 2)))
        assert np.isfinite(norms[1])
        assert abs(norms[1] - norms[0]) / norms[1] < 1e-6


# ---------------------------------------------------------------- boundary values

@pytest.mark.parametrize("endpoint", ef.ENDPOINTS)
def test_series_boundary_values(endpoint):
    assert ef.boundary_values_series(1, 0, endpoint) == (0, -1)
    assert ef.boundary_values_series(0, 1, endpoint) == (1, 0)
    assert ef.boundary_values_series(2, 3j, endpoint) == (3j, -2)


@pytest.mark.parametrize("endpoint", ef.ENDPOINTS)
def test_series_and_numeric_agree_example(endpoint):
    pair = ef.frobenius_pair(1.0, endpoint, 1.0, radius=1.0)
    lim = ef.boundary_values_numeric(_combo(pair, 2, 3j), endpoint, 1.0)
    assert abs(lim.b - 3j) < 1e-6 and abs(lim.c + 2) < 1e-6


@given(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       st.floats(-20, 40), st.sampled_from(ef.ENDPOINTS))
@settings(max_examples=40, deadline=None)
def test_series_and_numeric_agree_property(c1, c2, lam, endpoint):
    pair = ef.frobenius_pair(lam, endpoint, 1.0, radius=1.0)
    lim = ef.boundary_values_numeric(_combo(pair, c1, c2), endpoint, 1.0)
    b, c = ef.boundary_values_series(c1, c2, endpoint)
    assert abs(lim.b - b) < 1e-6 and abs(lim.c - c) < 1e-6


def test_numeric_log_and_smooth_examples():
    a = 1.0
    lim = ef.boundary_values_numeric(lambda t: (np.log(a + t), 1 / (a + t)), ef.MINUS_A, a)
    assert abs(lim.b - 1) < 1e-8 and abs(lim.c) < 1e-8
    lim = ef.boundary_values_numeric(lambda t: (np.ones_like(t), np.zeros_like(t)), ef.MINUS_A, a)
    assert lim.b == 0 and lim.c == -1
    lim = ef.boundary_values_numeric(lambda t: (np.cos(t), -np.sin(t)), ef.PLUS_A, a)
    assert abs(lim.b) < 1e-8 and abs(lim.c + np.cos(a)) < 1e-8


def test_numeric_no_convergence():
    # oscillates without a limit as t -> -a
    x = lambda t: (np.sin(1 / (t + 1)), -np.cos(1 / (t + 1)) / (t + 1) ** 2)
    with pytest.raises(NoConvergence):
        ef.boundary_values_numeric(x, ef.MINUS_A, 1.0)


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_basis_boundary_value_matrix(a):
    got = np.array([ef.boundary_values(f, a).quadruple for f in boundary_basis(a)])
    expected = [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]]
    assert np.max(np.abs(got - expected)) <= 1e-8


# ---------------------------------------------------------------- forms

def test_concomitant_examples():
    assert ef.concomitant((1.0, 0.0), (0.0, 1.0), 0.0, 1.0) == 1.0
    t = 0.3
    x = (np.cos(t), -np.sin(t))
    assert ef.concomitant(x, x, t, 1.0) == 0.0


@given(st.tuples(*[st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)] * 4),
       st.floats(-0.99, 0.99))
@settings(max_examples=100, deadline=None)
def test_concomitant_skew_hermitian(v, t):
    x, y = (v[0], v[1]), (v[2], v[3])
    lhs = ef.concomitant(x, y, t, 1.0)
    rhs = -np.conj(ef.concomitant(y, x, t, 1.0))
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))
    assert abs(ef.concomitant(x, x, t, 1.0).real) <= 1e-12 * max(1.0, abs(ef.concomitant(x, x, t, 1.0)))


def test_green_identity_compact_support():
    a = 1.0
    x = bump(-0.2, 0.3, a)
    f = lambda t: np.sin(2 * t)
    y = smooth_function(f, lambda t: 2 * np.cos(2 * t), lambda t: -4 * np.sin(2 * t), a)
    alpha, beta = -0.6, 0.4
    r = gauss_legendre(1600).scaled(alpha, beta)
    lhs = np.sum(r.weights * (x.apply_m(r.nodes) * np.conj(y.value(r.nodes))
                              - x.value(r.nodes) * np.conj(y.apply_m(r.nodes))))
    rhs = (ef.concomitant(x(beta), y(beta), beta, a) - ef.concomitant(x(alpha), y(alpha), alpha, a))
    assert abs(lhs - rhs) < 1e-8


@pytest.mark.parametrize("a", [0.5, 1.0, 2.0])
def test_gram_matrix_and_green_identity(a):
    basis = boundary_basis(a)
    bvs = [ef.boundary_values(f, a) for f in basis]
    omega = np.array([[ef.boundary_form(x, y, a) for y in bvs] for x in bvs])
    assert np.max(np.abs(a / 2 * omega - ba.j_matrix())) <= 1e-6
    assert omega[0, 1] == pytest.approx(2j / a)
    rule = graded_rule(a)
    green = np.array([[ef.green_defect(x, y, rule) for y in basis] for x in basis])
    forms = np.array([[np.subtract(*ef.endpoint_forms(x, y, a)[::-1]) for y in bvs] for x in bvs])
    assert np.max(np.abs(green - forms)) <= 1e-6


def test_boundary_value_from_omega():
    # b_{-a}(x) = (i a / 2) Omega(x, phi_-) for x = psi_-
    a = 1.7
    bv = [ef.boundary_values(f, a) for f in boundary_basis(a)]
    assert (1j * a / 2) * ef.boundary_form(bv[1], bv[0], a) == pytest.approx(1.0)


def test_legendre_flux_limits():
    # p x' -> (2/a) b_{-a} at -a for x = psi_-
    a = 1.3
    psi = boundary_basis(a)[1]
    t = -a + 1e-9
    # a + t carries the rounding of t, about 1e-7 relative at this distance
    assert (1 - t**2 / a**2) * psi.derivative(t) == pytest.approx(2 / a, rel=1e-6)


# ---------------------------------------------------------------- grid functions

def test_grid_function_validation_and_inner():
    r = gauss_legendre(10).scaled(-1, 1)
    g = ef.GridFunction(1.0, r.nodes, np.ones(10), "gauss", r.weights)
    assert g.norm() == pytest.approx(np.sqrt(2))
    assert g.inner(g) == pytest.approx(2)
    with pytest.raises(ValidationError):
        ef.GridFunction(1.0, [0.1, 0.0], [1, 2])
    with pytest.raises(ValidationError):
        ef.GridFunction(1.0, [-1.0, 0.0], [1, 2])
    with pytest.raises(ValidationError):
        ef.GridFunction(1.0, [0.0, 0.1], [1])
    bare = ef.GridFunction(1.0, [0.0, 0.1], [1, 2])
    with pytest.raises(GridMismatch):
        bare.norm()
