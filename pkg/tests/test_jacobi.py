import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powermeans.jacobi import jacobi_eigh


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**31 - 1), n=st.integers(1, 12), complex_=st.booleans())
def test_matches_lapack(seed, n, complex_):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, n))
    if complex_:
        g = g + 1j * rng.standard_normal((n, n))
    a = (g + g.conj().T) / 2
    w, u = jacobi_eigh(a)
    assert np.allclose(w, np.linalg.eigvalsh(a), atol=1e-11 * max(1, np.abs(w).max()))
    assert np.linalg.norm((u * w) @ u.conj().T - a) <= 1e-10 * max(1, np.linalg.norm(a))
    assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-12)


def test_real_input_gives_real_vectors():
    _, u = jacobi_eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
    assert not np.iscomplexobj(u)


def test_ascending_and_degenerate():
    w, u = jacobi_eigh(np.eye(4))
    assert np.allclose(w, 1) and np.allclose(u, np.eye(4))


@pytest.mark.parametrize("n", [16])
def test_largest_supported_size(n):
    rng = np.random.default_rng(n)
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    a = g + g.conj().T
    w, u = jacobi_eigh(a)
    assert np.linalg.norm((u * w) @ u.conj().T - a) <= 1e-10 * np.linalg.norm(a)
