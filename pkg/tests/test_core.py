import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powermeans.core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_hermitian,
    as_pd,
    as_psd,
    congruence,
    func_calculus,
    is_pd,
    is_projection,
    loewner_leq,
    power,
    pseudo_inverse_sqrt,
    range_projection,
    rank,
    relative_residual,
    spectral,
    strict_less,
)
from powermeans.errors import (
    DimensionMismatch,
    DomainError,
    NonHermitianInput,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    SingularPower,
    SingularT,
)
from powermeans.geometry import rank_one_projection
from powermeans.sampling import (
    random_invertible,
    random_pd,
    random_singular_psd,
    random_unitary,
    trial_rng,
)

seeds = st.integers(0, 2**31 - 1)
dims = st.integers(1, 6)


def hermitian(rng, n):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


class TestValidation:
    def test_tolerances_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            ToleranceConfig(eq=-1.0)

    def test_non_hermitian_rejected(self):
        with pytest.raises(NonHermitianInput):
            as_hermitian([[1.0, 2.0], [0.0, 1.0]])

    def test_small_asymmetry_repaired(self):
        a = as_hermitian([[1.0, 1e-13], [0.0, 1.0]])
        assert np.array_equal(a, a.conj().T)

    def test_non_square(self):
        with pytest.raises(DimensionMismatch):
            as_psd(np.ones((2, 3)))

    def test_indefinite_rejected(self):
        with pytest.raises(NotPositiveSemidefinite):
            as_psd(np.diag([1.0, -1e-3]))

    def test_roundoff_negative_clamped(self):
        a = as_psd(np.diag([1.0, -1e-12]))
        assert np.linalg.eigvalsh(a)[0] == 0.0

    def test_pd(self):
        assert is_pd(np.eye(2))
        assert not is_pd(np.diag([1.0, 0.0]))
        with pytest.raises(NotPositiveDefinite):
            as_pd(np.diag([1.0, 0.0]))


class TestSpectral:
    def test_diagonal(self):
        dec = spectral(np.diag([3.0, 1.0]))
        assert np.allclose(dec.eigenvalues, [1, 3])
        assert np.allclose(np.abs(dec.eigenvectors), [[0, 1], [1, 0]])

    def test_characteristic_polynomial(self):
        # lambda^2 - 4 lambda + 3
        assert np.allclose(spectral([[2.0, 1.0], [1.0, 2.0]]).eigenvalues, [1, 3])

    @settings(max_examples=40, deadline=None)
    @given(seed=seeds, n=st.integers(1, 8))
    def test_reconstruction(self, seed, n):
        a = hermitian(np.random.default_rng(seed), n)
        for method in ("lapack", "jacobi"):
            dec = spectral(a, method=method)
            u = dec.eigenvectors
            assert np.linalg.norm(dec.reconstruct() - a) <= DEFAULT_TOL.recon * max(1, np.linalg.norm(a))
            assert np.linalg.norm(u.conj().T @ u - np.eye(n)) <= DEFAULT_TOL.recon


class TestFunctionalCalculus:
    def test_sqrt_diagonal(self):
        assert np.allclose(func_calculus(np.diag([1.0, 4.0]), np.sqrt), np.diag([1.0, 2.0]))

    def test_identity_function(self, pd3):
        assert np.allclose(func_calculus(pd3, lambda t: t), pd3)

    def test_square_against_matrix_product(self):
        a = np.array([[2.0, 1.0], [1.0, 2.0]])
        assert np.allclose(func_calculus(a, np.square), a @ a)
        assert np.allclose(a @ a, [[5, 4], [4, 5]])

    def test_composition(self, pd3):
        lhs = func_calculus(pd3, lambda t: np.exp(np.log(t) / 3))
        rhs = func_calculus(func_calculus(pd3, np.log), lambda t: np.exp(t / 3))
        assert relative_residual(lhs, rhs) <= DEFAULT_TOL.eq

    def test_domain_error(self):
        with pytest.raises(DomainError):
            func_calculus(np.diag([1.0, 0.0]), np.log)


class TestPower:
    def test_diagonal_root(self):
        assert np.allclose(power(np.diag([4.0, 9.0]), 0.5), np.diag([2.0, 3.0]))

    def test_identity(self):
        for r in (-2.0, -0.3, 0.0, 0.7, 3.0):
            assert np.allclose(power(np.eye(3), r), np.eye(3))

    def test_root_by_squaring(self):
        root = power(np.array([[5.0, 4.0], [4.0, 5.0]]), 0.5)
        assert np.allclose(root, [[2, 1], [1, 2]])
        assert np.allclose(root @ root, [[5, 4], [4, 5]])

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, n=dims, k=st.integers(-3, 4))
    def test_integer_powers_match_products(self, seed, n, k):
        a = random_pd(np.random.default_rng(seed), n, shift=0.5)
        assert relative_residual(power(a, k), np.linalg.matrix_power(a, k)) <= 1e-9

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, n=dims, r=st.floats(-2, 2), s=st.floats(-2, 2))
    def test_exponent_law(self, seed, n, r, s):
        a = random_pd(np.random.default_rng(seed), n, shift=0.5)
        assert relative_residual(power(a, r) @ power(a, s), power(a, r + s)) <= 1e-8

    def test_zero_to_positive_power(self):
        assert np.allclose(power(np.diag([4.0, 0.0]), 0.3), np.diag([4.0**0.3, 0.0]))

    def test_negative_power_of_singular(self):
        with pytest.raises(SingularPower):
            power(np.diag([1.0, 0.0]), -0.5)


class TestOrder:
    def test_examples(self):
        assert loewner_leq(np.eye(2), 2 * np.eye(2))
        assert not loewner_leq(np.diag([1.0, 3.0]), np.diag([2.0, 2.0]))
        assert strict_less(np.eye(2), 3 * np.eye(2))
        assert not strict_less(np.eye(2), np.eye(2))
        assert strict_less(np.diag([1.0, 2.0]), np.diag([3.0, 3.0]))

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, n=dims)
    def test_partial_order(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_pd(rng, n)
        b = a + random_pd(rng, n)
        c = b + random_singular_psd(rng, n) if n > 1 else b
        assert loewner_leq(a, a)
        assert loewner_leq(a, b) and loewner_leq(b, c) and loewner_leq(a, c)
        assert not loewner_leq(b, a)

    @settings(max_examples=30, deadline=None)
    @given(seed=seeds, n=dims)
    def test_strict_order_is_congruence_invariant(self, seed, n):
        rng = np.random.default_rng(seed)
        a = random_pd(rng, n)
        b = a + random_pd(rng, n) if rng.random() < 0.5 else random_pd(rng, n)
        t = random_invertible(rng, n)
        assert strict_less(a, b) == strict_less(congruence(t, a), congruence(t, b))
        if strict_less(a, b):
            assert loewner_leq(a, b)


class TestCongruence:
    def test_examples(self, pd3):
        assert np.allclose(congruence(np.eye(3), pd3), pd3)
        assert np.allclose(congruence(np.diag([2.0, 1.0]), np.eye(2)), np.diag([4.0, 1.0]))

    def test_unitary_keeps_spectrum(self, rng, pd3):
        u = random_unitary(rng, 3)
        assert np.allclose(np.linalg.eigvalsh(congruence(u, pd3)), np.linalg.eigvalsh(pd3))

    def test_conjugate_linear(self, rng, pd3):
        t = random_invertible(rng, 3)
        assert np.allclose(congruence(t, pd3, conjugate_linear=True), t @ pd3.conj() @ t.conj().T)

    def test_singular_t(self, pd3):
        with pytest.raises(SingularT):
            congruence(np.diag([1.0, 1.0, 0.0]), pd3)


class TestRanges:
    def test_examples(self, pd3):
        assert np.allclose(range_projection(np.diag([3.0, 0.0])), np.diag([1.0, 0.0]))
        assert np.allclose(range_projection(np.zeros((2, 2))), 0)
        assert np.allclose(range_projection(pd3), np.eye(3))

    @pytest.mark.parametrize("index", range(20))
    def test_rank_and_projection(self, index):
        rng = trial_rng(3, index)
        k = int(rng.integers(1, 5))
        a = random_singular_psd(rng, 5, rank=k)
        r = range_projection(a)
        assert rank(a) == k
        assert is_projection(r)
        assert np.allclose(r @ a, a, atol=1e-9)
        s = pseudo_inverse_sqrt(a)
        assert np.allclose(s @ a @ s, r, atol=1e-8)

    def test_is_projection(self, rng):
        assert is_projection(np.diag([1.0, 0.0]))
        assert not is_projection(np.eye(2) / 2)
        assert is_projection(rank_one_projection(rng.standard_normal(3)).matrix)
