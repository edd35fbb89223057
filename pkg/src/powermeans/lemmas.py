"""Numerical probes of the structural facts behind mean-preserver characterizations.

Positive exponents: zero is the only element that is a mean of nothing but
itself, and the iterated-mean sets single out invertible elements.  Negative
exponents: ``A m_p 0 = 0``, projections are the fixed points of ``I m_p .``,
``A m_p B = 0`` exactly for trivially intersecting ranges, and means with a
rank-one projection are governed by the strength functional.  Finally the
gap search exhibits non-commuting pairs where the conventional and Kubo-Ando
means differ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_pd,
    as_psd,
    check_same_dim,
    hermitize,
    is_pd,
    loewner_leq,
    opnorm,
    power,
    range_projection,
    relative_residual,
    scale_of,
    sqrt_pair,
)
from .errors import InvalidExponent
from .geometry import rank_one_projection, strength
from .means import _check_ka_exponent, conventional_mean, ka_power_mean
from .preservers import VerificationReport
from .sampling import (
    random_pd,
    random_psd,
    random_singular_psd,
    random_unit_vector,
    trial_rng,
)


def _negative(p):
    p = _check_ka_exponent(p)
    if p > 0:
        raise InvalidExponent(f"this check needs p in [-1, 0[, got {p}")
    return p


def _default_sampler(rng, dim):
    u = rng.random()
    if u < 0.2:
        return np.zeros((dim, dim))
    if u < 0.6:
        return random_pd(rng, dim)
    return random_singular_psd(rng, dim) if dim > 1 else random_pd(rng, dim)


# ---------------------
# Iterated-mean probes
# ---------------------
def iterated_mean_probe(
    a,
    p: float,
    depth: int,
    samples: int,
    seed: int = 0,
    sampler: Optional[Callable] = None,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> list:
    """
    Random elements of ``{(...((A m_p X1) m_p X2)...) m_p Xn}``.

    Each sample draws ``n`` uniformly from ``1..depth`` and the ``Xi`` from
    ``sampler(rng, dim)`` (default: a mix of zero, PD and singular PSD).
    """
    if depth < 1 or samples < 1:
        raise ValueError("depth and samples must be at least 1")
    p = _check_ka_exponent(p)
    a = as_psd(a, tol)
    dim = a.shape[0]
    sampler = sampler or _default_sampler
    out = []
    for i in range(samples):
        rng = trial_rng(seed, i)
        n = int(rng.integers(1, depth + 1))
        x = a
        for _ in range(n):
            x = ka_power_mean(x, sampler(rng, dim), p, tol)
        out.append(x)
    return out


def reach_from_invertible(b, c, p: float, tol: ToleranceConfig = DEFAULT_TOL):
    """
    Exhibit ``C / 2^{1/p}`` as an element of the iterated-mean set of ``B``.

    For invertible ``B`` and ``C`` and ``0 < p <= 1``: halve ``B`` with the
    zero operand ``k`` times until ``B' <= C``, then solve
    ``B' m_p X = C / 2^{1/p}`` through the congruence by ``C^{-1/2}``.
    Returns ``(k, X, residual)``.
    """
    p = float(p)
    if not 0 < p <= 1:
        raise InvalidExponent("reach_from_invertible needs p in ]0, 1]")
    b = as_pd(b, tol)
    c = as_pd(c, tol)
    check_same_dim(b, c)
    zero = np.zeros_like(b)
    k, bk = 0, b
    while not loewner_leq(bk, c, tol):
        bk = ka_power_mean(bk, zero, p, tol)
        k += 1
    c_sqrt, c_isqrt = sqrt_pair(c, tol)
    inner = hermitize(c_isqrt @ bk @ c_isqrt)
    eye = np.eye(b.shape[0])
    y = power(hermitize(eye - power(inner, p, tol)), 1.0 / p, tol)
    x = hermitize(c_sqrt @ y @ c_sqrt)
    target = c / 2.0 ** (1.0 / p)
    return k, x, relative_residual(ka_power_mean(bk, x, p, tol), target)


# -----------------------
# Zero characterizations
# -----------------------
def zero_characterization_check(
    p: float, trials: int = 100, seed: int = 0, dim: int = 3, tol: ToleranceConfig = DEFAULT_TOL
) -> VerificationReport:
    """
    Randomized check of the characterization of the zero element.

    ``p > 0``: even trials build, for a random nonzero ``A``, the decomposition
    ``A = X m_p Y`` with ``X = tP`` (``P`` the top spectral projection, ``t``
    half the top eigenvalue) and ``Y = (2A^p - X^p)^{1/p}``, and require
    ``X != A``; odd trials check ``X m_p Y >= X / 2^{1/p}`` for random
    ``X != 0``, so zero is never a mean of a nonzero operand.
    ``p < 0``: ``A m_p 0 = 0 m_p A = 0`` for random ``A``.
    """
    p = _check_ka_exponent(p)
    residuals, inputs = [], []
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = random_psd(rng, dim)
        zero = np.zeros_like(a)
        if p < 0:
            r = max(opnorm(ka_power_mean(a, zero, p, tol)), opnorm(ka_power_mean(zero, a, p, tol)))
            residuals.append(r / scale_of(a))
            inputs.append((a,))
            continue
        if i % 2 == 0:
            w, u = np.linalg.eigh(a)
            top = w[-1]
            keep = w >= top * (1.0 - 1e-9)
            proj = u[:, keep] @ u[:, keep].conj().T
            x = 0.5 * top * proj
            y = power(hermitize(2.0 * power(a, p, tol) - power(x, p, tol)), 1.0 / p, tol)
            r = relative_residual(ka_power_mean(x, y, p, tol), a)
            if opnorm(x - a) <= tol.eq * scale_of(a):
                r = math.inf
            residuals.append(r)
            inputs.append((a, x, y))
        else:
            y = random_psd(rng, dim)
            m = ka_power_mean(a, y, p, tol)
            lower = a / 2.0 ** (1.0 / p)
            violation = max(0.0, -np.linalg.eigvalsh(m - lower)[0]) / scale_of(m, lower)
            if opnorm(m) <= tol.eq:
                violation = math.inf
            residuals.append(violation)
            inputs.append((a, y))
    return VerificationReport.from_residuals(residuals, tol.eq, inputs)


def projection_characterization_check(a, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether ``I m_p A = A`` (for ``-1 <= p < 0`` this holds iff ``A`` is a projection)."""
    p = _negative(p)
    a = as_psd(a, tol)
    eye = np.eye(a.shape[0])
    return opnorm(ka_power_mean(eye, a, p, tol) - a) <= tol.eq * scale_of(a)


def ranges_trivially_intersect(a, b, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """``rng A ∩ rng B = {0}``, decided by the rank of ``[R_A | R_B]``."""
    ra = range_projection(a, tol)
    rb = range_projection(b, tol)
    cutoff = math.sqrt(tol.rank_rel)

    def _rank(m):
        sv = np.linalg.svd(m, compute_uv=False)
        return int(np.sum(sv > cutoff))

    return _rank(np.hstack([ra, rb])) == _rank(ra) + _rank(rb)


def range_disjointness_check(a, b, p: float, tol: ToleranceConfig = DEFAULT_TOL):
    """
    Return ``(mean_is_zero, ranges_disjoint)``, computed independently.

    For ``-1 <= p < 0`` the two must agree.
    """
    p = _negative(p)
    a = as_psd(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    m = ka_power_mean(a, b, p, tol)
    mean_is_zero = opnorm(m) <= tol.eq * scale_of(a, b)
    return bool(mean_is_zero), ranges_trivially_intersect(a, b, tol)


def rank_one_coefficient(lam: float, q: float) -> float:
    """``(2 lam^q / (1 + lam^q))^{1/q}``, zero at ``lam = 0``."""
    if lam <= 0:
        return 0.0
    return (2.0 / (1.0 + lam ** -q)) ** (1.0 / q)


DEFAULT_SCALAR_PAIRS = ((3.0, 1.0), (0.5, 2.0), (1.0, 1.0), (7.0, 0.25), (1e-3, 5.0))


def rank_one_mean_check(
    a, phi, p: float, tol: ToleranceConfig = DEFAULT_TOL, scalar_pairs=DEFAULT_SCALAR_PAIRS
) -> VerificationReport:
    """
    Compare ``A m_p P`` with the strength formula for a rank-one projection ``P``.

    The first residual is ``A m_p P`` against
    ``(2 l^q / (1 + l^q))^{1/q} P`` with ``l`` the strength of ``A`` along
    ``phi``; the rest check ``(tP) m_p (sP)`` against the scalar-multiple
    formula for each ``(t, s)`` in ``scalar_pairs``.
    """
    p = _negative(p)
    q = -p
    a = as_psd(a, tol)
    proj = rank_one_projection(phi)
    pm = proj.matrix
    lam = strength(a, proj, tol).value
    expected = rank_one_coefficient(lam, q) * pm
    residuals = [relative_residual(ka_power_mean(a, pm, p, tol), expected)]
    inputs = [(a, pm)]
    for t, s in scalar_pairs:
        r = (t / s) ** q
        closed = s * (2.0 * r / (1.0 + r)) ** (1.0 / q) * pm
        residuals.append(relative_residual(ka_power_mean(t * pm, s * pm, p, tol), closed))
        inputs.append((t * pm, s * pm))
    return VerificationReport.from_residuals(residuals, tol.eq, inputs)


# ----------
# Gap search
# ----------
@dataclass
class GapRecord:
    A: np.ndarray
    B: np.ndarray
    p: float
    gap: float
    commutator_norm: float
    trial: int = 0


def mean_gap(a, b, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``||A m_p B - A 𝔪_p B||`` (conventional minus Kubo-Ando)."""
    return opnorm(conventional_mean(a, b, p, tol) - ka_power_mean(a, b, p, tol))


def gap_search(
    dim: int, p: float, trials: int = 1000, seed: int = 0, tol: ToleranceConfig = DEFAULT_TOL
) -> GapRecord:
    """
    Largest conventional-vs-Kubo-Ando gap over random positive definite pairs.

    Plain random search.  For ``p = ±1`` the two means agree and the gap
    stays at roundoff level; for other ``p`` and ``dim >= 2`` a positive gap
    witnesses that the two operations differ.
    """
    if dim < 1 or trials < 1:
        raise ValueError("dim and trials must be at least 1")
    p = _check_ka_exponent(p)
    best = None
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = random_pd(rng, dim)
        b = random_pd(rng, dim)
        gap = mean_gap(a, b, p, tol)
        if best is None or gap > best.gap:
            best = GapRecord(a, b, p, gap, opnorm(a @ b - b @ a), i)
    return best


def monotonicity_witness(p: float = 2.0, dim: int = 2, trials: int = 2000, seed: int = 0,
                         tol: ToleranceConfig = DEFAULT_TOL):
    """
    Search for ``A <= C`` with ``A m_p B`` not below ``C m_p B`` (conventional mean).

    Returns ``(A, C, B, violation)`` for the worst pair found, ``violation``
    being ``-lambda_min(C m_p B - A m_p B)``, or ``None`` if every sample was
    monotone.
    """
    worst = None
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = random_pd(rng, dim)
        c = a + random_singular_psd(rng, dim, rank=1) if dim > 1 else a + random_pd(rng, dim)
        b = random_pd(rng, dim)
        diff = conventional_mean(c, b, p, tol) - conventional_mean(a, b, p, tol)
        violation = -np.linalg.eigvalsh(hermitize(diff))[0] / scale_of(a, b, c)
        if violation > tol.order and (worst is None or violation > worst[3]):
            worst = (a, c, b, float(violation))
    return worst


def invertible_iterates_check(a, p: float, depth: int = 4, samples: int = 50, seed: int = 0,
                              tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """For invertible ``A`` and ``p > 0`` every iterated mean stays invertible."""
    return all(is_pd(x, tol) for x in iterated_mean_probe(a, p, depth, samples, seed, tol=tol))


def random_rank_one_case(rng, dim):
    """A (possibly singular) PSD matrix and a unit vector, for rank-one checks."""
    return random_psd(rng, dim), random_unit_vector(rng, dim)
