"""Mean-preserving maps and the mean equations used to characterize order.

The maps here are the canonical forms that preserve a power mean:

* congruence ``A -> T A T*`` (``T`` linear or conjugate-linear) preserves every
  Kubo-Ando mean;
* power-congruence ``A -> (T A^q T*)^{1/q}``, ``q = |p|``, preserves the
  conventional mean ``m_p``;
* a Jordan *-automorphism of the full matrix algebra (``A -> U A U*`` or
  ``A -> U A^T U*``) followed by the congruence ``D . D``; with an exponent
  attached it becomes ``(D J(A)^p D)^{1/p}``.
"""

from __future__ import annotations

import enum
import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_matrix,
    as_pd,
    as_psd,
    check_same_dim,
    congruence,
    hermitize,
    opnorm,
    power,
    relative_residual,
    scale_of,
    sqrt_pair,
)
from .errors import IncompatibleForm, InvalidExponent, SingularT
from .means import Family, MeanSpec
from .sampling import random_pd, random_singular_psd, trial_rng


class PreserverKind(str, enum.Enum):
    CONGRUENCE = "congruence"
    POWER_CONGRUENCE = "power-congruence"
    JORDAN_UNITARY = "jordan-unitary"
    JORDAN_TRANSPOSE = "jordan-transpose"


JORDAN_KINDS = (PreserverKind.JORDAN_UNITARY, PreserverKind.JORDAN_TRANSPOSE)


@dataclass(frozen=True, eq=False)
class PreserverForm:
    """
    One of the canonical mean-preserving maps.

    ``T`` is the congruence factor (the unitary ``U`` for the Jordan kinds),
    ``p`` the exponent of a power-congruence or of the conventional Jordan
    form, and ``D`` the positive definite factor of the Jordan forms.
    """

    kind: PreserverKind
    T: np.ndarray
    conjugate_linear: bool = False
    p: Optional[float] = None
    D: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", PreserverKind(self.kind))
        t = as_matrix(self.T)
        object.__setattr__(self, "T", t)
        sv = np.linalg.svd(t, compute_uv=False)
        if not np.all(np.isfinite(sv)) or sv[-1] <= DEFAULT_TOL.rank_rel * sv[0]:
            raise SingularT("preserver factor T is not invertible")
        if self.p is not None:
            object.__setattr__(self, "p", float(self.p))
            if self.p == 0:
                raise InvalidExponent("preserver exponent must be nonzero")
        if self.kind is PreserverKind.POWER_CONGRUENCE and self.p is None:
            raise InvalidExponent("power-congruence needs an exponent")
        if self.kind in JORDAN_KINDS:
            if opnorm(t.conj().T @ t - np.eye(t.shape[0])) > 1e-8:
                raise ValueError("Jordan forms need a unitary T")
            if self.conjugate_linear:
                raise ValueError("Jordan forms are linear; use jordan-transpose instead")
        if self.D is not None:
            d = as_pd(self.D)
            check_same_dim(t, d)
            object.__setattr__(self, "D", d)

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    def __call__(self, a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        return apply_preserver(self, a, tol)


def apply_preserver(form: PreserverForm, a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    a = as_psd(a, tol)
    check_same_dim(form.T, a)
    if form.kind is PreserverKind.CONGRUENCE:
        return congruence(form.T, a, form.conjugate_linear, tol)
    if form.kind is PreserverKind.POWER_CONGRUENCE:
        q = abs(form.p)
        return power(congruence(form.T, power(a, q, tol), form.conjugate_linear, tol), 1.0 / q, tol)

    u = form.T
    inner = a.T if form.kind is PreserverKind.JORDAN_TRANSPOSE else a
    j = hermitize(u @ inner @ u.conj().T)
    d = form.D if form.D is not None else np.eye(form.dim)
    if form.p is None:
        return hermitize(d @ j @ d)
    return power(hermitize(d @ power(j, form.p, tol) @ d), 1.0 / form.p, tol)


# ------------
# Verification
# ------------
def digest(*mats) -> str:
    h = hashlib.sha256()
    for m in mats:
        h.update(np.ascontiguousarray(np.asarray(m, dtype=complex)).tobytes())
    return h.hexdigest()[:16]


@dataclass
class VerificationReport:
    """Outcome of a randomized check: worst residual and the failing inputs."""

    trials: int
    max_residual: float
    failures: list = field(default_factory=list)
    passed: bool = True
    threshold: float = DEFAULT_TOL.eq
    witnesses: list = field(default_factory=list)
    expectation: str = "pass"

    @classmethod
    def from_residuals(cls, residuals, threshold, inputs=None, max_witnesses=5, expectation="pass"):
        """Build a report; ``inputs[i]`` is the tuple of matrices behind ``residuals[i]``."""
        residuals = [float(r) for r in residuals]
        failures, witnesses = [], []
        for i, r in enumerate(residuals):
            if not r <= threshold:
                mats = inputs[i] if inputs is not None else ()
                failures.append((digest(*mats) if mats else f"trial-{i}", r))
                if len(witnesses) < max_witnesses and mats:
                    witnesses.append({"trial": i, "residual": r, "inputs": list(mats)})
        failures.sort(key=lambda item: (-item[1], item[0]))
        worst = max(residuals) if residuals else 0.0
        return cls(
            trials=len(residuals),
            max_residual=worst,
            failures=failures,
            passed=not failures,
            threshold=threshold,
            witnesses=witnesses,
            expectation=expectation,
        )


def _pairing(form: PreserverForm, spec: MeanSpec) -> str:
    kind, family = form.kind, spec.family
    if kind is PreserverKind.CONGRUENCE:
        return "sanctioned" if family is Family.KUBO_ANDO else "adversarial"
    if kind is PreserverKind.POWER_CONGRUENCE:
        if family is Family.KUBO_ANDO:
            return "adversarial"
        if abs(form.p) == spec.q:
            return "sanctioned"
    if kind in JORDAN_KINDS:
        if form.p is None and family is Family.KUBO_ANDO:
            return "sanctioned"
        if form.p is not None and family is Family.CONVENTIONAL and form.p == spec.p:
            return "sanctioned"
    raise IncompatibleForm(f"{kind.value} with p={form.p} does not pair with {family.value} p={spec.p}")


def verify_preserver(
    form: PreserverForm,
    spec: MeanSpec,
    trials: int = 100,
    seed: int = 0,
    tol: ToleranceConfig = DEFAULT_TOL,
    threshold: Optional[float] = None,
) -> VerificationReport:
    """
    Check ``phi(A # B) = phi(A) # phi(B)`` on random pairs.

    Sanctioned pairings (congruence with Kubo-Ando means, power-congruence
    with the matching conventional mean, Jordan forms) are expected to pass.
    The adversarial pairings (congruence with a conventional mean,
    power-congruence with a Kubo-Ando mean) are accepted too and generally
    fail; the report then carries the witnesses.  Singular operands are mixed
    in for the semidefinite-cone maps.
    """
    expectation = "pass" if _pairing(form, spec) == "sanctioned" else "fail"
    threshold = tol.eq if threshold is None else threshold
    dim = form.dim
    pd_only = form.kind in JORDAN_KINDS and form.p is not None
    pd_only = pd_only or (spec.family is Family.CONVENTIONAL and spec.p < -1)
    pd_only = pd_only or (form.kind is PreserverKind.POWER_CONGRUENCE and abs(form.p) > 1)

    residuals, inputs = [], []
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = random_pd(rng, dim)
        b = random_pd(rng, dim)
        if not pd_only and dim > 1 and i % 3 == 2:
            if rng.random() < 0.5:
                a = random_singular_psd(rng, dim)
            else:
                b = random_singular_psd(rng, dim)
        lhs = form(spec(a, b, tol), tol)
        rhs = spec(form(a, tol), form(b, tol), tol)
        residuals.append(relative_residual(lhs, rhs))
        inputs.append((a, b))
    return VerificationReport.from_residuals(residuals, threshold, inputs, expectation=expectation)


# ---------------
# Mean equations
# ---------------
def solve_ka_equation(a, b, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> Optional[np.ndarray]:
    """
    Solve ``A m_p X = B / 2^{1/p}`` for positive definite ``X``.

    A solution exists exactly when ``A < B`` in the strict order; it is
    ``A^{1/2} ((A^{-1/2} B A^{-1/2})^p - I)^{1/p} A^{1/2}``.  Returns ``None``
    when there is none.
    """
    p = float(p)
    if not 0 < p <= 1:
        raise InvalidExponent("solve_ka_equation needs p in ]0, 1]")
    a = as_pd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    a_sqrt, a_isqrt = sqrt_pair(a, tol)
    w, v = np.linalg.eigh(hermitize(a_isqrt @ b @ a_isqrt))
    # A < B  <=>  spectrum of A^{-1/2} B A^{-1/2} inside ]1, inf[ (with the order margin)
    if not (w[0] > 1.0 / (1.0 - tol.order) and w[-1] < 1.0 / tol.order):
        return None
    y = (w ** p - 1.0) ** (1.0 / p)
    return hermitize(a_sqrt @ ((v * y) @ v.conj().T) @ a_sqrt)


def solve_conventional_equation(
    a, b, p: float, strict: bool = False, tol: ToleranceConfig = DEFAULT_TOL
) -> Optional[np.ndarray]:
    """
    Solve ``((A^p + X^p)/2)^{1/p} = B / 2^{1/p}``, i.e. ``X^p = B^p - A^p``.

    Solvable on the semidefinite cone iff ``A^p <= B^p``; with ``strict=True``
    the difference must be positive definite so that ``X`` is invertible.
    """
    p = float(p)
    if not p > 0:
        raise InvalidExponent("solve_conventional_equation needs p > 0")
    a = as_pd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    ap, bp = power(a, p, tol), power(b, p, tol)
    diff = hermitize(bp - ap)
    w, v = np.linalg.eigh(diff)
    margin = tol.order * scale_of(ap, bp)
    if strict and not w[0] > margin:
        return None
    if not w[0] >= -margin:
        return None
    w = np.maximum(w, 0.0)
    return power(hermitize((v * w) @ v.conj().T), 1.0 / p, tol)
