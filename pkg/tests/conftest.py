import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from prolate_sa.boundary_algebra import make_unitary

DATA = Path(__file__).parent / "data"


@st.composite
def unitaries(draw):
    """Every 2x2 unitary is exp(i phi) [[alpha, beta], [-conj(beta), conj(alpha)]]."""
    phi = draw(st.floats(0, 2 * np.pi))
    theta = draw(st.floats(0, np.pi / 2))
    p1 = draw(st.floats(0, 2 * np.pi))
    p2 = draw(st.floats(0, 2 * np.pi))
    alpha = np.cos(theta) * np.exp(1j * p1)
    beta = np.sin(theta) * np.exp(1j * p2)
    m = np.exp(1j * phi) * np.array([[alpha, beta], [-np.conj(beta), np.conj(alpha)]])
    return make_unitary(m)


@pytest.fixture(scope="session")
def reference_eigenvalues():
    return json.loads((DATA / "reference_eigenvalues.json").read_text())["values"]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
