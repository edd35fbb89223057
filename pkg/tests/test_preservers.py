import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powermeans.core import DEFAULT_TOL, loewner_leq, power, relative_residual, strict_less
from powermeans.errors import IncompatibleForm, InvalidExponent, SingularT
from powermeans.means import MeanSpec, conventional_mean, ka_power_mean
from powermeans.preservers import (
    PreserverForm,
    PreserverKind,
    VerificationReport,
    apply_preserver,
    digest,
    solve_conventional_equation,
    solve_ka_equation,
    verify_preserver,
)
from powermeans.sampling import random_invertible, random_pd, random_pd_conditioned, random_unitary, trial_rng

P_VALUES = [1.0, -1.0, 0.5, -0.5, 0.25, -0.25, 1 / 3]
seeds = st.integers(0, 2**31 - 1)


class TestForms:
    def test_identity_examples(self, pd3):
        assert np.allclose(apply_preserver(PreserverForm("congruence", np.eye(3)), pd3), pd3)
        assert np.allclose(apply_preserver(PreserverForm("power-congruence", np.eye(3), p=0.5), pd3), pd3)

    def test_jordan_transpose_example(self):
        a = np.array([[1, 1j], [-1j, 1]])
        out = apply_preserver(PreserverForm("jordan-transpose", np.eye(2)), a)
        assert np.allclose(out, [[1, -1j], [1j, 1]])

    def test_power_congruence_formula(self, rng, pd3):
        t = random_invertible(rng, 3)
        out = PreserverForm("power-congruence", t, p=-0.5)(pd3)
        expected = power(t @ power(pd3, 0.5) @ t.conj().T, 2.0)
        assert relative_residual(out, expected) <= 1e-10

    def test_jordan_power_form(self, rng, pd3):
        u, d = random_unitary(rng, 3), random_pd_conditioned(rng, 3)
        out = PreserverForm("jordan-unitary", u, p=0.5, D=d)(pd3)
        j = u @ pd3 @ u.conj().T
        assert relative_residual(out, power(d @ power(j, 0.5) @ d, 2.0)) <= 1e-10

    def test_preserves_rank(self, rng):
        a = np.diag([2.0, 1.0, 0.0])
        out = PreserverForm("congruence", random_invertible(rng, 3))(a)
        assert np.linalg.matrix_rank(out, tol=1e-9) == 2

    def test_validation(self, rng):
        with pytest.raises(SingularT):
            PreserverForm("congruence", np.diag([1.0, 0.0]))
        with pytest.raises(InvalidExponent):
            PreserverForm("power-congruence", np.eye(2))
        with pytest.raises(InvalidExponent):
            PreserverForm("power-congruence", np.eye(2), p=0.0)
        with pytest.raises(ValueError):
            PreserverForm("jordan-unitary", np.diag([2.0, 1.0]))
        with pytest.raises(ValueError):
            PreserverForm("unknown", np.eye(2))
        assert PreserverForm("jordan-unitary", random_unitary(rng, 2)).kind is PreserverKind.JORDAN_UNITARY


class TestVerify:
    @pytest.mark.parametrize("p", P_VALUES)
    @pytest.mark.parametrize("conj", [False, True])
    def test_congruence_preserves_ka(self, p, conj):
        t = random_invertible(trial_rng(41, 0), 3)
        rep = verify_preserver(PreserverForm("congruence", t, conjugate_linear=conj), MeanSpec(p, "ka"), 30, 1)
        assert rep.passed and rep.expectation == "pass"

    @pytest.mark.parametrize("p", P_VALUES + [2.0, -2.0])
    def test_power_congruence_preserves_conventional(self, p):
        t = random_invertible(trial_rng(43, 0), 3)
        rep = verify_preserver(PreserverForm("power-congruence", t, p=p), MeanSpec(p, "conv"), 30, 2)
        assert rep.passed, rep.max_residual

    @pytest.mark.parametrize("kind", ["jordan-unitary", "jordan-transpose"])
    def test_jordan_forms(self, kind):
        rng = trial_rng(47, 0)
        u, d = random_unitary(rng, 3), random_pd_conditioned(rng, 3)
        assert verify_preserver(PreserverForm(kind, u, D=d), MeanSpec(0.5, "ka"), 20).passed
        assert verify_preserver(PreserverForm(kind, u, p=0.5, D=d), MeanSpec(0.5, "conv"), 20).passed

    def test_adversarial_congruence_fails_with_witness(self):
        t = random_invertible(trial_rng(53, 0), 3)
        rep = verify_preserver(PreserverForm("congruence", t), MeanSpec(0.5, "conv"), 20)
        assert not rep.passed and rep.expectation == "fail"
        assert rep.max_residual > 1e-3
        assert rep.witnesses and rep.failures
        a, b = rep.witnesses[0]["inputs"]
        spec = MeanSpec(0.5, "conv")
        form = PreserverForm("congruence", t)
        assert relative_residual(form(spec(a, b)), spec(form(a), form(b))) == pytest.approx(
            rep.witnesses[0]["residual"]
        )

    def test_incompatible(self):
        with pytest.raises(IncompatibleForm):
            verify_preserver(PreserverForm("power-congruence", np.eye(2), p=0.5), MeanSpec(0.25, "conv"), 2)
        with pytest.raises(IncompatibleForm):
            verify_preserver(PreserverForm("jordan-unitary", np.eye(2), p=0.5), MeanSpec(0.5, "ka"), 2)

    def test_reproducible(self):
        form = PreserverForm("congruence", random_invertible(trial_rng(59, 0), 3))
        r1 = verify_preserver(form, MeanSpec(0.5, "conv"), 10, seed=4)
        r2 = verify_preserver(form, MeanSpec(0.5, "conv"), 10, seed=4)
        assert r1.failures == r2.failures and r1.max_residual == r2.max_residual

    def test_report_invariant(self):
        rep = VerificationReport.from_residuals([1e-12, 3e-9], DEFAULT_TOL.eq)
        assert rep.passed and rep.max_residual == 3e-9
        rep = VerificationReport.from_residuals([1e-12, 1.0, float("inf")], DEFAULT_TOL.eq)
        assert not rep.passed and len(rep.failures) == 2
        assert rep.failures[0][1] == float("inf")

    def test_digest_is_stable(self):
        assert digest(np.eye(2)) == digest(np.eye(2).astype(complex))
        assert digest(np.eye(2)) != digest(2 * np.eye(2))


class TestKaEquation:
    def test_arithmetic_case(self):
        assert np.allclose(solve_ka_equation(np.eye(2), 3 * np.eye(2), 1), 2 * np.eye(2))

    def test_no_solution_without_strict_order(self):
        assert solve_ka_equation(np.eye(2), np.eye(2), 0.5) is None

    def test_diagonal_example(self):
        a, b = np.diag([1.0, 2.0]), np.diag([4.0, 4.0])
        x = solve_ka_equation(a, b, 0.5)
        assert relative_residual(ka_power_mean(a, x, 0.5), b / 4) <= DEFAULT_TOL.eq

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, n=st.integers(1, 4), p=st.floats(0.05, 1))
    def test_solution_iff_strict_order(self, seed, n, p):
        rng = np.random.default_rng(seed)
        a = random_pd(rng, n)
        b = a + random_pd(rng, n) if rng.random() < 0.6 else random_pd(rng, n)
        x = solve_ka_equation(a, b, p)
        assert (x is not None) == strict_less(a, b)
        # below p = 1/2 the round trip is ill-conditioned near the order boundary
        if x is not None and p >= 0.5:
            assert relative_residual(ka_power_mean(a, x, p), b / 2 ** (1 / p)) <= DEFAULT_TOL.eq

    def test_exponent_range(self):
        with pytest.raises(InvalidExponent):
            solve_ka_equation(np.eye(2), 2 * np.eye(2), -0.5)


class TestConventionalEquation:
    def test_scalar_bookkeeping(self):
        x = solve_conventional_equation(np.eye(2), 2 * np.eye(2), 1)
        assert np.allclose(x, np.eye(2))
        assert np.allclose(conventional_mean(np.eye(2), x, 1), np.eye(2))

    def test_no_solution(self):
        assert solve_conventional_equation(2 * np.eye(2), np.eye(2), 1) is None

    def test_diagonal_example(self):
        a, b = np.diag([1.0, 2.0]), np.diag([3.0, 4.0])
        x = solve_conventional_equation(a, b, 0.5)
        assert relative_residual(conventional_mean(a, x, 0.5), b / 4) <= DEFAULT_TOL.eq

    def test_strict_flag(self):
        a, b = np.diag([1.0, 1.0]), np.diag([1.0, 2.0])
        assert solve_conventional_equation(a, b, 1) is not None
        assert solve_conventional_equation(a, b, 1, strict=True) is None

    @settings(max_examples=60, deadline=None)
    @given(seed=seeds, n=st.integers(1, 4), p=st.floats(0.1, 3))
    def test_solution_iff_power_order(self, seed, n, p):
        rng = np.random.default_rng(seed)
        a = random_pd(rng, n)
        b = a + random_pd(rng, n) if rng.random() < 0.6 else random_pd(rng, n)
        x = solve_conventional_equation(a, b, p)
        ap, bp = power(a, p), power(b, p)
        assert (x is not None) == loewner_leq(ap, bp)
        if x is not None and p >= 0.5:
            assert relative_residual(conventional_mean(a, x, p), b / 2 ** (1 / p)) <= DEFAULT_TOL.eq
