import numpy as np
import pytest
from hypothesis import given, settings

from prolate_sa import boundary_algebra as ba
from prolate_sa.errors import (NotSelfOrthogonal, NotUnitary, ProjectionSingular,
                               RankDeficient, ValidationError)

from .conftest import unitaries

I = ba.make_unitary([[1, 0], [0, 1]])
NEG = ba.make_unitary([[-1, 0], [0, -1]])
SWAP = ba.make_unitary([[0, 1], [1, 0]])


def test_make_unitary_accepts_identity_and_swap():
    assert I.is_identity()
    assert np.array_equal(SWAP.matrix, [[0, 1], [1, 0]])


def test_make_unitary_rejects_shear():
    with pytest.raises(NotUnitary):
        ba.make_unitary([[1, 1], [0, 1]])


def test_make_unitary_rejects_nonfinite_and_wrong_size():
    with pytest.raises(NotUnitary):
        ba.make_unitary([np.nan, 0, 0, 1])
    with pytest.raises(ValidationError):
        ba.make_unitary([1, 0, 0])


def test_unitary_is_immutable():
    with pytest.raises(ValueError):
        I.matrix[0, 0] = 2


def test_parse_presets_and_numbers():
    assert ba.parse_unitary("swap") == SWAP
    assert ba.parse_unitary("neg-identity") == NEG
    u = ba.parse_unitary("0,1, 0,0, 0,0, 0,-1")
    assert np.allclose(u.matrix, [[1j, 0], [0, -1j]])
    with pytest.raises(NotUnitary):
        ba.parse_unitary("1,0,0,0,1,1,0,0")
    with pytest.raises(ValidationError):
        ba.parse_unitary("1,2,3")
    with pytest.raises(ValidationError):
        ba.parse_unitary("sideways")


def test_pairs_round_trip():
    u = ba.random_unitary(np.random.default_rng(0))
    assert ba.UnitaryMatrix2.from_pairs(u.to_pairs()) == u


def test_j_matrix_entries():
    j = ba.j_matrix()
    expected = np.zeros((4, 4), complex)
    expected[0, 1], expected[1, 0], expected[2, 3], expected[3, 2] = 1j, -1j, 1j, -1j
    assert np.array_equal(j, expected)


def test_j_algebra_exact():
    j = ba.j_matrix()
    assert np.array_equal(j, j.conj().T)
    assert np.array_equal(j @ j, np.eye(4))
    assert np.linalg.matrix_rank(j) == 4


def test_projectors():
    pp, pm = ba.projectors()
    assert np.allclose(pp[:2, :2], 0.5 * np.array([[1, 1j], [-1j, 1]]), atol=0)
    assert np.array_equal(pp @ pm, np.zeros((4, 4)))
    assert np.array_equal(pp + pm, np.eye(4))
    assert np.array_equal(pp @ pp, pp) and np.array_equal(pm @ pm, pm)
    assert np.array_equal(pp, pp.conj().T)
    e1 = np.array([1, 1j, 0, 0])
    assert np.allclose(e1 @ pp, e1, atol=0)


@pytest.mark.parametrize("u, v1, v2", [
    (I, [2, 0, 0, 0], [0, 0, 2, 0]),
    (SWAP, [1, 1j, 1, -1j], [1, -1j, 1, 1j]),
    (NEG, [0, 2j, 0, 0], [0, 0, 0, 2j]),
])
def test_subspace_from_unitary_examples(u, v1, v2):
    s = ba.subspace_from_unitary(u)
    assert np.allclose(s.v1, v1) and np.allclose(s.v2, v2)


def test_self_orthogonality_examples():
    assert ba.is_j_self_orthogonal(ba.SubspacePair([2, 0, 0, 0], [0, 0, 2, 0]))
    e = ba.SubspacePair([1, 1j, 0, 0], [0, 0, 1, 1j])
    assert ba.j_form(e.v1, e.v1) == 2
    assert not ba.is_j_self_orthogonal(e)


def test_rank_deficient_pair():
    with pytest.raises(RankDeficient):
        ba.SubspacePair([1, 0, 0, 0], [2, 0, 0, 0])


def test_unitary_from_subspace_examples():
    assert ba.unitary_from_subspace(ba.SubspacePair([2, 0, 0, 0], [0, 0, 2, 0])).is_identity()
    with pytest.raises(NotSelfOrthogonal):
        ba.unitary_from_subspace(ba.SubspacePair([1, 1j, 0, 0], [0, 0, 2, 0]))


def test_projection_singular_signalled(monkeypatch):
    # a J-self-orthogonal subspace always projects onto V+ with rank 2; force the guard
    monkeypatch.setattr(ba, "is_j_self_orthogonal", lambda s: True)
    with pytest.raises(ProjectionSingular):
        ba.unitary_from_subspace(ba.SubspacePair([1, -1j, 0, 0], [0, 0, 1, -1j]))


def test_hundred_random_round_trips():
    rng = np.random.default_rng(42)
    for _ in range(100):
        u = ba.random_unitary(rng)
        s = ba.subspace_from_unitary(u)
        assert ba.is_j_self_orthogonal(s)
        assert np.max(np.abs(ba.unitary_from_subspace(s).matrix - u.matrix)) <= 1e-10


@given(unitaries())
@settings(max_examples=200, deadline=None)
def test_round_trip_property(u):
    s = ba.subspace_from_unitary(u)
    assert ba.is_j_self_orthogonal(s)
    assert np.linalg.matrix_rank(s.basis, tol=1e-10) == 2
    assert np.allclose(ba.unitary_from_subspace(s).matrix, u.matrix, atol=1e-10)


@pytest.mark.parametrize("u, rows", [
    (I, [[2, 0, 0, 0], [0, 0, 2, 0]]),
    (NEG, [[0, -2j, 0, 0], [0, 0, 0, -2j]]),
    (SWAP, [[1, -1j, 1, 1j], [1, 1j, 1, -1j]]),
])
def test_boundary_condition_matrix_examples(u, rows):
    assert np.allclose(ba.boundary_condition_matrix(u), rows)


@given(unitaries())
@settings(max_examples=200, deadline=None)
def test_kernel_is_two_dimensional_and_matches_domain(u):
    k = ba.boundary_kernel(u)
    assert k.shape == (4, 2)
    assert np.allclose(ba.boundary_condition_matrix(u) @ k, 0, atol=1e-12)
    quads = np.array([ba.quadruple_from_coordinates(v) for v in ba.domain_subspace(u).basis])
    for q in quads:
        assert ba.satisfies_boundary_conditions(u, q)


@pytest.mark.parametrize("u", [I, NEG, SWAP])
def test_kernel_equals_image_of_s_u_for_hermitian(u):
    quads = [ba.quadruple_from_coordinates(v) for v in ba.subspace_from_unitary(u).basis]
    for q in quads:
        assert ba.satisfies_boundary_conditions(u, q, tol=1e-14)


def test_kernel_is_image_of_adjoint_subspace_for_random_u():
    rng = np.random.default_rng(3)
    for _ in range(20):
        u = ba.random_unitary(rng)
        for v in ba.subspace_from_unitary(u.adjoint()).basis:
            assert ba.satisfies_boundary_conditions(u, ba.quadruple_from_coordinates(v), tol=1e-12)


def test_coordinate_maps_are_inverse():
    v = np.array([1 + 2j, -3, 0.5j, 4])
    assert np.allclose(ba.coordinates_from_quadruple(ba.quadruple_from_coordinates(v)), v)
