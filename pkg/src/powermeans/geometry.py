"""Thompson metric, sup-ratio functional and strength along a ray."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.linalg

from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_pd,
    as_psd,
    check_same_dim,
    func_calculus,
    hermitize,
    opnorm,
    range_basis,
    sqrt_pair,
)
from .errors import DimensionMismatch, EmptyProbeSet, ZeroVector


@dataclass(frozen=True)
class RankOneProjection:
    vector: np.ndarray
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.vector.shape[0]


class StrengthValue(NamedTuple):
    value: float
    in_range: bool


def rank_one_projection(phi) -> RankOneProjection:
    """Projection ``phi phi*`` onto the line spanned by a nonzero vector (normalized here)."""
    phi = np.asarray(phi)
    if not np.iscomplexobj(phi):
        phi = phi.astype(float)
    phi = phi.reshape(-1)
    norm = np.linalg.norm(phi)
    if not norm > 0 or not math.isfinite(norm):
        raise ZeroVector("cannot project onto the zero vector")
    phi = phi / norm
    return RankOneProjection(vector=phi, matrix=np.outer(phi, phi.conj()))


def sup_ratio(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """
    ``M(A/B) = inf{t > 0 : A <= t B}``, the largest eigenvalue of ``B^{-1/2} A B^{-1/2}``.

    Computed from the generalized eigenproblem ``A x = t B x`` (Cholesky of ``B``).
    """
    a = as_psd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    top = scipy.linalg.eigvalsh(a, b, subset_by_index=[a.shape[0] - 1, a.shape[0] - 1])[0]
    return max(float(top), 0.0)


def thompson_distance(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``d_T(A, B) = log max{M(A/B), M(B/A)}``."""
    a = as_pd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    return max(math.log(max(sup_ratio(a, b, tol), sup_ratio(b, a, tol))), 0.0)


def thompson_distance_log(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """Equivalent form ``||log(A^{-1/2} B A^{-1/2})||`` (operator norm)."""
    a = as_pd(a, tol)
    b = as_pd(b, tol)
    check_same_dim(a, b)
    _, a_isqrt = sqrt_pair(a, tol)
    return opnorm(func_calculus(hermitize(a_isqrt @ b @ a_isqrt), np.log, tol))


def _strengths(a, vectors, tol):
    """Strengths of PSD ``a`` along the rows of ``vectors`` (unit vectors) plus range flags."""
    w, v = range_basis(a, tol)
    if w.shape[0] == 0:
        n = vectors.shape[0]
        return np.zeros(n), np.zeros(n, dtype=bool)
    coeffs = vectors @ v.conj()
    outside = np.linalg.norm(vectors - coeffs @ v.T, axis=1)
    inside = outside <= math.sqrt(tol.rank_rel)
    terms = np.abs(coeffs) ** 2 / w
    # 1 / sum(terms) factored around the dominant term, so that a vector along
    # a single eigenvector returns that eigenvalue without a 1/(1/w) round trip
    j = np.argmax(terms, axis=1)
    rows = np.arange(terms.shape[0])
    top = terms[rows, j]
    with np.errstate(divide="ignore", invalid="ignore"):
        rest = (np.sum(terms, axis=1) - top) / top
        lead = w[j] / np.abs(coeffs[rows, j]) ** 2
        vals = np.where(inside & (top > 0), lead / (1.0 + rest), 0.0)
    return vals, inside


def strength(a, projection: RankOneProjection, tol: ToleranceConfig = DEFAULT_TOL) -> StrengthValue:
    """
    Strength of ``A`` along the ray of ``projection``: ``sup{λ >= 0 : λ P <= A}``.

    Evaluated as ``||A^{-1/2} phi||^{-2}`` with the inverse taken on the range,
    and zero when ``phi`` is not in ``rng A^{1/2}``.  Range membership is
    decided by ``||(I - R) phi|| <= sqrt(tol.rank_rel)`` with ``R`` the range
    projection of ``A``.
    """
    a = as_psd(a, tol)
    if a.shape[0] != projection.dim:
        raise DimensionMismatch("projection and matrix dimensions differ")
    vals, inside = _strengths(a, projection.vector[None, :], tol)
    return StrengthValue(float(vals[0]), bool(inside[0]))


def leq_via_strengths(a, b, probes: Sequence[RankOneProjection], tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """
    Test ``A <= B`` by comparing strengths along the given rays.

    Exact only when every ray is probed; with finitely many probes a ``True``
    answer can be a false positive.  Use :func:`range_probes` when ``A`` may
    be singular.
    """
    probes = list(probes)
    if not probes:
        raise EmptyProbeSet("need at least one probe")
    a = as_psd(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    if any(pr.dim != a.shape[0] for pr in probes):
        raise DimensionMismatch("probe and matrix dimensions differ")
    vecs = np.array([pr.vector for pr in probes], dtype=complex)
    sa, _ = _strengths(a, vecs, tol)
    sb, _ = _strengths(b, vecs, tol)
    return bool(np.all(sa <= sb + tol.order))


def random_probes(dim: int, count: int = 200, seed=None) -> list:
    """``count`` rank-one projections onto complex Gaussian directions."""
    rng = np.random.default_rng(seed)
    vecs = rng.standard_normal((count, dim)) + 1j * rng.standard_normal((count, dim))
    return [rank_one_projection(v) for v in vecs]


def range_probes(a, count: int = 200, seed=None, tol: ToleranceConfig = DEFAULT_TOL) -> list:
    """
    Rank-one projections onto random directions ``A^{1/2} g`` inside ``rng A``.

    Strength of ``A`` vanishes off its range, so a violation of ``A <= B``
    can only be seen along directions in ``rng A``.  Generic probes miss
    that subspace when ``A`` is singular; these do not.
    """
    a = as_psd(a, tol)
    w, v = range_basis(a, tol)
    if w.shape[0] == 0:
        return random_probes(a.shape[0], count, seed)
    rng = np.random.default_rng(seed)
    k = w.shape[0]
    g = rng.standard_normal((count, k)) + 1j * rng.standard_normal((count, k))
    return [rank_one_projection(v @ (np.sqrt(w) * row)) for row in g]
