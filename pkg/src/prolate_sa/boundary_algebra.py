"""Indefinite linear algebra of the four-dimensional boundary space.

Vectors of the boundary space are stored as length-4 complex rows holding the
coordinates ``(alpha_-, beta_-, alpha_+, beta_+)`` with respect to the basis
``(phi_-, psi_-, phi_+, psi_+)``.  Rows act on matrices from the left, so the
hermitian form of two rows ``v, w`` reads ``v @ J @ w.conj()``.

Two coordinate systems appear side by side:

* boundary coordinates ``v = (alpha_-, beta_-, alpha_+, beta_+)``;
* boundary-value quadruples ``q = (b_-a, c_-a, b_a, c_a)``.

They are related by ``q = (beta_-, -alpha_-, beta_+, -alpha_+)``.

A note on conventions.  ``boundary_condition_matrix(U)`` uses the
relabelled coefficients in which ``conj(u_pq)`` has been replaced by
``u_qp``.  Its kernel is therefore the quadruple image of ``S_{U*}``, not of
``S_U``; the two coincide exactly when ``U`` is hermitian (``I``, ``-I``,
``swap``).  ``domain_subspace`` returns the subspace whose quadruples form
that kernel.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (NotSelfOrthogonal, NotUnitary, ProjectionSingular,
                     RankDeficient, ValidationError)

UNITARY_TOL = 1e-10
ORTHOGONALITY_TOL = 1e-10
RANK_TOL = 1e-12

# Orthogonal bases of the +1 and -1 eigenspaces of J.
E_PLUS = np.array([[1, 1j, 0, 0], [0, 0, 1, 1j]], dtype=complex)
E_MINUS = np.array([[1, -1j, 0, 0], [0, 0, 1, -1j]], dtype=complex)

PRESETS = {
    "identity": ((1, 0), (0, 1)),
    "neg-identity": ((-1, 0), (0, -1)),
    "swap": ((0, 1), (1, 0)),
}


@dataclass(frozen=True)
class UnitaryMatrix2:
    """A validated 2x2 unitary matrix; the parameter of a self-adjoint extension."""

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex).reshape(2, 2)
        if not np.all(np.isfinite(m)):
            raise NotUnitary("unitary matrix entries must be finite")
        defect = np.max(np.abs(m @ m.conj().T - np.eye(2)))
        if defect > UNITARY_TOL:
            raise NotUnitary(f"matrix is not unitary: max|UU* - I| = {defect:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def u11(self):
        return self.matrix[0, 0]

    @property
    def u12(self):
        return self.matrix[0, 1]

    @property
    def u21(self):
        return self.matrix[1, 0]

    @property
    def u22(self):
        return self.matrix[1, 1]

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def adjoint(self) -> "UnitaryMatrix2":
        return UnitaryMatrix2(self.matrix.conj().T)

    def is_identity(self, tol: float = UNITARY_TOL) -> bool:
        return bool(np.max(np.abs(self.matrix - np.eye(2))) <= tol)

    def to_pairs(self) -> list[list[float]]:
        """Row-major list of ``[re, im]`` pairs (the JSON wire format)."""
        return [[float(z.real), float(z.imag)] for z in self.matrix.ravel()]

    @classmethod
    def from_pairs(cls, pairs) -> "UnitaryMatrix2":
        pairs = np.asarray(pairs, dtype=float).reshape(4, 2)
        return cls((pairs[:, 0] + 1j * pairs[:, 1]).reshape(2, 2))

    def __repr__(self):
        rows = ", ".join("[" + ", ".join(f"{z:.6g}" for z in row) + "]" for row in self.matrix)
        return f"UnitaryMatrix2([{rows}])"

    def __eq__(self, other):
        if not isinstance(other, UnitaryMatrix2):
            return NotImplemented
        return bool(np.array_equal(self.matrix, other.matrix))

    def __hash__(self):
        return hash(self.matrix.tobytes())


def make_unitary(entries) -> UnitaryMatrix2:
    """Validate four complex entries (row-major, or a 2x2 nested sequence)."""
    m = np.asarray(entries, dtype=complex)
    if m.size != 4:
        raise ValidationError(f"expected 4 entries, got {m.size}")
    return UnitaryMatrix2(m.reshape(2, 2))


def parse_unitary(text: str) -> UnitaryMatrix2:
    """Parse a preset name or eight comma-separated reals (re/im pairs, row-major)."""
    text = text.strip()
    if text in PRESETS:
        return make_unitary(PRESETS[text])
    try:
        numbers = [float(tok) for tok in text.replace(";", ",").split(",") if tok.strip()]
    except ValueError as exc:
        raise ValidationError(f"cannot parse unitary matrix {text!r}") from exc
    if len(numbers) != 8:
        raise ValidationError(
            f"unitary matrix needs a preset ({', '.join(PRESETS)}) or 8 numbers, got {len(numbers)}")
    return UnitaryMatrix2.from_pairs(np.reshape(numbers, (4, 2)))


def random_unitary(rng: np.random.Generator) -> UnitaryMatrix2:
    """Haar-distributed 2x2 unitary from a complex Ginibre sample."""
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    # fixing the phases of diag(r) makes the law exactly Haar
    return UnitaryMatrix2(q * (d / np.abs(d)))


def j_matrix() -> np.ndarray:
    j = np.zeros((4, 4), dtype=complex)
    j[0, 1] = 1j
    j[1, 0] = -1j
    j[2, 3] = 1j
    j[3, 2] = -1j
    return j


def projectors() -> tuple[np.ndarray, np.ndarray]:
    """Orthogonal projectors ``(I + J)/2`` and ``(I - J)/2``."""
    eye = np.eye(4, dtype=complex)
    j = j_matrix()
    return (eye + j) / 2, (eye - j) / 2


@dataclass(frozen=True)
class SubspacePair:
    """Two rows of boundary coordinates spanning a 2-dimensional subspace."""

    v1: np.ndarray
    v2: np.ndarray

    def __post_init__(self):
        v1 = np.array(self.v1, dtype=complex).reshape(4)
        v2 = np.array(self.v2, dtype=complex).reshape(4)
        s = np.linalg.svd(np.vstack([v1, v2]), compute_uv=False)
        if s[0] == 0 or s[1] / s[0] <= RANK_TOL:
            raise RankDeficient("subspace basis vectors are linearly dependent")
        v1.setflags(write=False)
        v2.setflags(write=False)
        object.__setattr__(self, "v1", v1)
        object.__setattr__(self, "v2", v2)

    @property
    def basis(self) -> np.ndarray:
        return np.vstack([self.v1, self.v2])

    def contains(self, v, tol: float = 1e-10) -> bool:
        """True if ``v`` lies in the span (relative residual of a least-squares fit)."""
        v = np.asarray(v, dtype=complex)
        coef, *_ = np.linalg.lstsq(self.basis.T, v, rcond=None)
        return bool(np.linalg.norm(self.basis.T @ coef - v) <= tol * max(np.linalg.norm(v), 1.0))


def subspace_from_unitary(u: UnitaryMatrix2) -> SubspacePair:
    u11, u12, u21, u22 = u.u11, u.u12, u.u21, u.u22
    v1 = [1 + u11, 1j * (1 - u11), u21, -1j * u21]
    v2 = [u12, -1j * u12, 1 + u22, 1j * (1 - u22)]
    return SubspacePair(v1, v2)


def j_form(v, w) -> complex:
    """The indefinite hermitian form ``v J w*`` of two coordinate rows."""
    return complex(np.asarray(v, dtype=complex) @ j_matrix() @ np.asarray(w, dtype=complex).conj())


def is_j_self_orthogonal(s: SubspacePair, tol: float = ORTHOGONALITY_TOL) -> bool:
    basis = s.basis
    gram = basis @ j_matrix() @ basis.conj().T
    norms = np.linalg.norm(basis, axis=1)
    return bool(np.all(np.abs(gram) <= tol * np.outer(norms, norms)))


def unitary_from_subspace(s: SubspacePair) -> UnitaryMatrix2:
    """Recover the unitary ``U`` with ``s == S_U``.

    Each basis row splits as ``v + vU`` with ``v`` in the +1 eigenspace; in the
    bases ``e_+`` and ``e_-`` the map ``v -> vU`` is multiplication by ``U``.
    """
    if not is_j_self_orthogonal(s):
        raise NotSelfOrthogonal("subspace is not J-self-orthogonal")
    p_plus, p_minus = projectors()
    basis = s.basis
    # coordinates in e_+ / e_-; both bases have squared norm 2
    plus = (basis @ p_plus) @ E_PLUS.conj().T / 2
    minus = (basis @ p_minus) @ E_MINUS.conj().T / 2
    sv = np.linalg.svd(plus, compute_uv=False)
    if sv[0] == 0 or sv[1] / sv[0] <= RANK_TOL:
        raise ProjectionSingular("projection of the subspace onto V+ is rank deficient")
    # rows: plus[k] -> minus[k];  minus.T = U @ plus.T
    u = np.linalg.solve(plus, minus).T
    return UnitaryMatrix2(u)


def boundary_condition_matrix(u: UnitaryMatrix2) -> np.ndarray:
    """Coefficients of the two boundary conditions acting on ``(b_-a, c_-a, b_a, c_a)``."""
    u11, u12, u21, u22 = u.u11, u.u12, u.u21, u.u22
    return np.array([
        [1 + u11, -1j * (1 - u11), u12, 1j * u12],
        [u21, 1j * u21, 1 + u22, -1j * (1 - u22)],
    ], dtype=complex)


def quadruple_from_coordinates(v) -> np.ndarray:
    alpha_m, beta_m, alpha_p, beta_p = np.asarray(v, dtype=complex)
    return np.array([beta_m, -alpha_m, beta_p, -alpha_p])


def coordinates_from_quadruple(q) -> np.ndarray:
    b_m, c_m, b_p, c_p = np.asarray(q, dtype=complex)
    return np.array([-c_m, b_m, -c_p, b_p])


def boundary_kernel(u: UnitaryMatrix2) -> np.ndarray:
    """Orthonormal basis (as the two columns of a 4x2 array) of ker B(U)."""
    _, s, vh = np.linalg.svd(boundary_condition_matrix(u))
    if s[-1] <= RANK_TOL * s[0]:
        raise RankDeficient("boundary condition matrix has rank < 2")
    return vh[2:].conj().T


def domain_subspace(u: UnitaryMatrix2) -> SubspacePair:
    """Boundary coordinates of the extension domain selected by ``B(U) q = 0``."""
    return subspace_from_unitary(u.adjoint())


def satisfies_boundary_conditions(u: UnitaryMatrix2, quadruple, tol: float = 1e-8) -> bool:
    q = np.asarray(quadruple, dtype=complex)
    return bool(np.linalg.norm(boundary_condition_matrix(u) @ q) <= tol * max(1.0, np.linalg.norm(q)))
