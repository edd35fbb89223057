"""Hermitian spectral engine.

Everything downstream (means, cone geometry, preserver checks) works on plain
``numpy`` arrays validated by the ``as_*`` helpers below.  A matrix is
Hermitian, positive semidefinite (PSD) or positive definite (PD) only up to
the tolerances carried by :class:`ToleranceConfig`; predicates compare against
``tol.<field> * max(1, ||operands||)`` so that they stay meaningful for large
congruence images.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    DimensionMismatch,
    DomainError,
    NonHermitianInput,
    NotPositiveDefinite,
    NotPositiveSemidefinite,
    SingularPower,
    SingularT,
)
from .jacobi import jacobi_eigh


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances for symmetry, order, rank and equality decisions."""

    sym: float = 1e-10
    eig: float = 1e-10
    pd: float = 1e-10
    recon: float = 1e-9
    order: float = 1e-9
    eq: float = 1e-8
    rank_rel: float = 1e-10

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not (value >= 0):
                raise ValueError(f"tolerance {field.name} must be nonnegative, got {value!r}")

    def replace(self, **changes) -> "ToleranceConfig":
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


DEFAULT_TOL = ToleranceConfig()


class SpectralDecomposition(NamedTuple):
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.eigenvectors
        return (u * self.eigenvalues) @ u.conj().T


# ---------------
# Basic utilities
# ---------------
def as_matrix(a) -> np.ndarray:
    """Convert to a square float or complex 2D array."""
    a = np.asarray(a)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionMismatch("matrix dimension must be at least 1")
    if not np.iscomplexobj(a):
        a = a.astype(float)
    return a


def opnorm(a) -> float:
    """Spectral (operator) norm."""
    a = np.asarray(a)
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def scale_of(*mats) -> float:
    return max([1.0] + [opnorm(m) for m in mats])


def check_same_dim(*mats):
    dims = {np.shape(m)[0] for m in mats}
    if len(dims) > 1:
        raise DimensionMismatch(f"operands have different dimensions {sorted(dims)}")


def hermitize(a) -> np.ndarray:
    return 0.5 * (a + a.conj().T)


def close(x, y, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """``||x - y|| <= tol.eq * max(1, ||x||, ||y||)``."""
    return opnorm(np.asarray(x) - np.asarray(y)) <= tol.eq * scale_of(x, y)


def relative_residual(x, y) -> float:
    """``||x - y|| / max(1, ||x||, ||y||)``."""
    return opnorm(np.asarray(x) - np.asarray(y)) / scale_of(x, y)


# ----------
# Validation
# ----------
def as_hermitian(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    a = as_matrix(a)
    if not np.isfinite(a).all():
        raise NonHermitianInput("matrix has non-finite entries")
    asym = np.abs(a - a.conj().T).max()
    if asym > tol.sym * max(1.0, np.abs(a).max()):
        raise NonHermitianInput(f"matrix is not Hermitian (max asymmetry {asym:.3e})")
    return hermitize(a)


def _eigh(a, method="lapack"):
    if method == "lapack":
        return np.linalg.eigh(a)
    if method == "jacobi":
        return jacobi_eigh(a)
    raise ValueError(f"unknown eigensolver {method!r}")


def as_psd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    Validate a positive semidefinite matrix.

    Eigenvalues in ``[-tol.eig * scale, 0)`` are clamped to zero (the matrix is
    rebuilt only when clamping actually happens); anything more negative is
    rejected with :class:`NotPositiveSemidefinite`.
    """
    return psd_with_spectrum(a, tol)[0]


def _validate_psd(a, tol):
    a = as_hermitian(a, tol)
    w, u = np.linalg.eigh(a)
    if w[0] >= 0:
        return a, w, u
    if w[0] < -tol.eig * max(1.0, abs(w[-1])):
        raise NotPositiveSemidefinite(f"matrix has negative eigenvalue {w[0]:.3e}")
    w = np.maximum(w, 0.0)
    return hermitize((u * w) @ u.conj().T), w, u


def psd_with_spectrum(a, tol: ToleranceConfig = DEFAULT_TOL):
    """:func:`as_psd` that also returns the (clamped) ascending eigenvalues."""
    a, w, _ = _validate_psd(a, tol)
    return a, w


def is_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    w = np.linalg.eigvalsh(as_hermitian(a, tol))
    return bool(w[0] > tol.pd * max(1.0, abs(w[-1])))


def is_psd(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    w = np.linalg.eigvalsh(as_hermitian(a, tol))
    return bool(w[0] >= -tol.eig * max(1.0, abs(w[-1])))


def as_pd(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    a = as_psd(a, tol)
    if not is_pd(a, tol):
        raise NotPositiveDefinite("matrix is not positive definite")
    return a


# ------------------
# Spectral calculus
# ------------------
def spectral(a, tol: ToleranceConfig = DEFAULT_TOL, method: str = "lapack") -> SpectralDecomposition:
    """
    Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.

    ``method`` selects LAPACK (``numpy.linalg.eigh``) or the cyclic Jacobi
    solver in :mod:`powermeans.jacobi`.
    """
    a = as_hermitian(a, tol)
    w, u = _eigh(a, method)
    return SpectralDecomposition(np.asarray(w, dtype=float), u)


def _apply(w, u, values):
    out = (u * values) @ u.conj().T
    return hermitize(out)


def func_calculus(a, f: Callable, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    Continuous functional calculus ``U diag(f(w)) U*``.

    Parameters
    ----------
    a : array_like of shape (n, n)
        Hermitian matrix.
    f : callable
        Real scalar function, applied elementwise to the eigenvalue array.

    Raises
    ------
    DomainError
        If ``f`` is undefined or non-finite somewhere on the spectrum.
    """
    w, u = spectral(a, tol)
    with np.errstate(all="ignore"):
        try:
            values = np.asarray(f(w), dtype=float)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise DomainError(str(exc)) from exc
    if values.shape != w.shape:
        values = np.broadcast_to(values, w.shape)
    if not np.all(np.isfinite(values)):
        raise DomainError("function is not finite on the spectrum")
    return _apply(w, u, values)


def _psd_eig(a, tol):
    _, w, u = _validate_psd(a, tol)
    return w, u


def power(a, r: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    Real power of a PSD matrix.

    ``0**r := 0`` for ``r > 0``; for non-integer ``r > 0`` eigenvalues below
    ``tol.rank_rel * lambda_max`` are treated as exact zeros.  Negative powers
    require a positive definite matrix.
    """
    r = float(r)
    w, u = _psd_eig(a, tol)
    n = w.shape[0]
    if r == 0:
        return np.eye(n, dtype=u.dtype)
    top = w[-1]
    if r < 0:
        if not w[0] > tol.pd * max(1.0, top):
            raise SingularPower(f"negative power {r} of a singular matrix")
        return _apply(w, u, w ** r)
    if not float(r).is_integer():
        w = np.where(w > tol.rank_rel * top, w, 0.0)
    return _apply(w, u, w ** r)


def sqrt_pair(a, tol: ToleranceConfig = DEFAULT_TOL):
    """Return ``(A^{1/2}, A^{-1/2})`` from one decomposition of a PD matrix."""
    w, u = _psd_eig(a, tol)
    if not w[0] > tol.pd * max(1.0, w[-1]):
        raise SingularPower("inverse square root of a singular matrix")
    s = np.sqrt(w)
    return _apply(w, u, s), _apply(w, u, 1.0 / s)


# -----
# Order
# -----
def loewner_leq(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """``A <= B`` in the Löwner order: ``lambda_min(B - A) >= -tol.order * scale``."""
    a = as_hermitian(a, tol)
    b = as_hermitian(b, tol)
    check_same_dim(a, b)
    lo = np.linalg.eigvalsh(b - a)[0]
    return bool(lo >= -tol.order * scale_of(a, b))


def strict_less(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Strict order: spectrum of ``B^{-1/2} A B^{-1/2}`` inside ``]tol.order, 1 - tol.order[``."""
    a = as_pd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    _, b_isqrt = sqrt_pair(b, tol)
    w = np.linalg.eigvalsh(hermitize(b_isqrt @ a @ b_isqrt))
    return bool(w[0] > tol.order and w[-1] < 1.0 - tol.order)


# ----------
# Congruence
# ----------
def congruence(t, a, conjugate_linear: bool = False, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    ``T A T*`` for invertible ``T``.

    A conjugate-linear operator is modelled as ``T`` composed with entrywise
    conjugation, so the image is ``T conj(A) T*``.
    """
    t = as_matrix(t)
    a = as_psd(a, tol)
    check_same_dim(t, a)
    sv = np.linalg.svd(t, compute_uv=False)
    if not np.all(np.isfinite(sv)) or sv[-1] <= tol.rank_rel * sv[0]:
        raise SingularT("congruence factor is singular or too ill-conditioned")
    if conjugate_linear:
        a = a.conj()
    return hermitize(t @ a @ t.conj().T)


# ------------------
# Ranges/projections
# ------------------
def range_basis(a, tol: ToleranceConfig = DEFAULT_TOL):
    """Eigenvalues and orthonormal eigenvectors spanning the range of a PSD matrix."""
    w, u = _psd_eig(a, tol)
    if w[-1] <= 0:
        return w[:0], u[:, :0]
    keep = w > tol.rank_rel * w[-1]
    return w[keep], u[:, keep]


def range_projection(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projection onto ``rng A = rng A^{1/2}``."""
    _, v = range_basis(a, tol)
    n = np.shape(a)[0]
    if v.shape[1] == 0:
        return np.zeros((n, n), dtype=v.dtype)
    return hermitize(v @ v.conj().T)


def rank(a, tol: ToleranceConfig = DEFAULT_TOL) -> int:
    return range_basis(a, tol)[0].shape[0]


def pseudo_inverse_sqrt(a, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Inverse of ``A^{1/2}`` on its range, zero on the kernel."""
    w, v = range_basis(a, tol)
    n = np.shape(a)[0]
    if v.shape[1] == 0:
        return np.zeros((n, n), dtype=v.dtype)
    return hermitize((v / np.sqrt(w)) @ v.conj().T)


def is_projection(a, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Hermitian and idempotent within ``tol.eq``."""
    try:
        a = as_hermitian(a, tol)
    except NonHermitianInput:
        return False
    return opnorm(a @ a - a) <= tol.eq
