"""Conventional and Kubo-Ando power means of PSD matrices.

A Kubo-Ando mean is determined by its representing function ``f`` through
``A σ B = A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` when ``A`` is invertible.
For singular ``A`` the mean is the downward limit of ``(A + εI) σ (B + εI)``;
here it is evaluated exactly instead, by compressing to ``rng(A + B)`` and
using the congruence ``(A + B)^{-1/2}``, which turns the pair into two
commuting matrices summing to the identity.  The ε-limit itself is kept as
:func:`boundary_limit` and serves as an independent check.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_psd,
    check_same_dim,
    hermitize,
    is_pd,
    opnorm,
    power,
    psd_with_spectrum,
    range_basis,
    scale_of,
    sqrt_pair,
)
from .errors import BoundaryDivergence, DomainError, InvalidExponent, SingularPower

EPSILONS = tuple(10.0 ** -k for k in range(4, 10))


# ------------
# Scalar means
# ------------
def scalar_power_mean(t: float, s: float, p: float) -> float:
    """``((t**p + s**p) / 2) ** (1/p)`` for positive ``t, s`` and nonzero ``p``."""
    if not (t > 0 and s > 0):
        raise DomainError("scalar power mean needs positive arguments")
    if p == 0 or not math.isfinite(p):
        raise InvalidExponent("exponent must be a nonzero finite real")
    return ((t ** p + s ** p) / 2.0) ** (1.0 / p)


# -----------------------
# Representing functions
# -----------------------
@dataclass(frozen=True)
class RepresentingFunction:
    """
    Normalized scalar function ``f: ]0, inf[ -> ]0, inf[`` with ``f(1) = 1``.

    ``limit_at_zero`` is ``f(0+)`` and ``slope_at_infinity`` is
    ``lim f(t)/t``; the two are exchanged by :func:`transpose_mean`.  Either may
    be ``None`` when unknown, in which case boundary evaluations fall back to the
    ε-limit.  Operator monotonicity is not verified, only ``f(1) = 1`` and
    monotonicity on a grid.
    """

    eval: Callable[[np.ndarray], np.ndarray]
    name: str
    limit_at_zero: Optional[float] = None
    slope_at_infinity: Optional[float] = None
    tags: tuple = field(default=())

    def __post_init__(self):
        one = float(self.eval(np.array([1.0]))[0])
        if abs(one - 1.0) > DEFAULT_TOL.eq:
            raise DomainError(f"{self.name}: f(1) = {one!r}, expected 1")
        grid = np.logspace(-6, 6, 121)
        values = np.asarray(self.eval(grid), dtype=float)
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DomainError(f"{self.name}: f must be finite and positive on ]0, inf[")
        if np.any(np.diff(values) < -1e-12 * values[1:]):
            raise DomainError(f"{self.name}: f is not nondecreasing")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        pos = t > 0
        with np.errstate(all="ignore"):
            out[pos] = self.eval(t[pos])
        if not np.all(pos):
            if self.limit_at_zero is None:
                raise DomainError(f"{self.name}: value at 0 is unknown")
            out[~pos] = self.limit_at_zero
        return out

    def scalar_mean(self, a, b):
        """Scalar mean ``a f(b/a)`` of nonnegative arrays, continuously extended."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        out = np.zeros(np.broadcast(a, b).shape)
        a, b = np.broadcast_to(a, out.shape), np.broadcast_to(b, out.shape)
        pos = a > 0
        with np.errstate(divide="ignore"):
            out[pos] = a[pos] * self(b[pos] / a[pos])
        only_b = ~pos & (b > 0)
        if np.any(only_b):
            if self.slope_at_infinity is None:
                raise DomainError(f"{self.name}: slope at infinity is unknown")
            out[only_b] = self.slope_at_infinity * b[only_b]
        return out


def _power_eval(p):
    if p > 0:
        return lambda t: ((1.0 + t ** p) / 2.0) ** (1.0 / p)
    q = -p
    # the q-form stays accurate as t -> 0
    return lambda t: (2.0 * t ** q / (1.0 + t ** q)) ** (1.0 / q)


def _check_ka_exponent(p):
    p = float(p)
    if p == 0 or not (-1.0 <= p <= 1.0):
        raise InvalidExponent(f"Kubo-Ando power mean needs p in [-1, 1] \\ {{0}}, got {p}")
    return p


@functools.lru_cache(maxsize=64)
def representing_function_power(p: float) -> RepresentingFunction:
    """Representing function ``t -> ((1 + t**p)/2)**(1/p)`` of the Kubo-Ando power mean."""
    p = _check_ka_exponent(p)
    limit = 2.0 ** (-1.0 / p) if p > 0 else 0.0
    return RepresentingFunction(
        eval=_power_eval(p),
        name=f"power:{p!r}",
        limit_at_zero=limit,
        slope_at_infinity=limit,
        tags=("symmetric",),
    )


ARITHMETIC = RepresentingFunction(
    eval=lambda t: (1.0 + t) / 2.0,
    name="arithmetic",
    limit_at_zero=0.5,
    slope_at_infinity=0.5,
    tags=("symmetric",),
)
HARMONIC = RepresentingFunction(
    eval=lambda t: 2.0 * t / (1.0 + t),
    name="harmonic",
    limit_at_zero=0.0,
    slope_at_infinity=0.0,
    tags=("symmetric",),
)
GEOMETRIC = RepresentingFunction(
    eval=np.sqrt,
    name="geometric",
    limit_at_zero=0.0,
    slope_at_infinity=0.0,
    tags=("symmetric",),
)


def named_function(name: str) -> RepresentingFunction:
    """Look up a preset: ``arithmetic``, ``harmonic``, ``geometric`` or ``power:<p>``."""
    key = name.strip().lower()
    presets = {"arithmetic": ARITHMETIC, "harmonic": HARMONIC, "geometric": GEOMETRIC}
    if key in presets:
        return presets[key]
    if key.startswith("power:"):
        try:
            p = float(key.split(":", 1)[1])
        except ValueError as exc:
            raise InvalidExponent(f"cannot parse exponent in {name!r}") from exc
        return representing_function_power(p)
    raise ValueError(f"unknown representing function {name!r}")


def transpose_mean(f: RepresentingFunction) -> RepresentingFunction:
    """Representing function ``t -> t f(1/t)`` of the transposed mean."""
    return RepresentingFunction(
        eval=lambda t: t * f.eval(1.0 / t),
        name=f"transpose({f.name})",
        limit_at_zero=f.slope_at_infinity,
        slope_at_infinity=f.limit_at_zero,
        tags=tuple(x for x in f.tags if x == "symmetric") + ("transpose",),
    )


def adjoint_mean(f: RepresentingFunction) -> RepresentingFunction:
    """Representing function ``t -> 1 / f(1/t)`` of the adjoint mean."""
    # h(0+) = 1 / f(inf): zero when f grows linearly, otherwise unknown here.
    # h(t)/t -> 1 / (t f(1/t)) -> 0 when f(0+) > 0, otherwise unknown here.
    limit = 0.0 if (f.slope_at_infinity or 0.0) > 0 else None
    slope = 0.0 if (f.limit_at_zero or 0.0) > 0 else None
    if f.name.startswith("power:") or f.name in ("arithmetic", "harmonic"):
        # power-mean family is closed under the adjoint: p -> -p
        p = {"arithmetic": 1.0, "harmonic": -1.0}.get(f.name)
        if p is None:
            p = float(f.name.split(":", 1)[1])
        mirror = representing_function_power(-p)
        limit, slope = mirror.limit_at_zero, mirror.slope_at_infinity
    elif f.name == "geometric":
        limit, slope = 0.0, 0.0
    return RepresentingFunction(
        eval=lambda t: 1.0 / f.eval(1.0 / t),
        name=f"adjoint({f.name})",
        limit_at_zero=limit,
        slope_at_infinity=slope,
        tags=tuple(x for x in f.tags if x == "symmetric") + ("adjoint",),
    )


# -------------------
# Kubo-Ando machinery
# -------------------
def _snap(x, cutoff):
    # roundoff-level eigenvalues would be amplified by t -> t**p near 0
    return np.where(x > cutoff, x, 0.0)


def _closed_form(a, b, f, rank_rel=DEFAULT_TOL.rank_rel):
    """``A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`` for strictly positive ``A`` (no tolerance gate)."""
    w, u = np.linalg.eigh(a)
    if w[0] <= 0:
        raise SingularPower("closed-form mean needs an invertible first argument")
    s = np.sqrt(w)
    a_sqrt = (u * s) @ u.conj().T
    a_isqrt = (u / s) @ u.conj().T
    inner = hermitize(a_isqrt @ b @ a_isqrt)
    x, v = np.linalg.eigh(inner)
    x = _snap(x, rank_rel * max(x[-1], 0.0))
    fx = f(x)
    return hermitize(a_sqrt @ ((v * fx) @ v.conj().T) @ a_sqrt)


def _reduced_mean(a, b, f, tol):
    """Exact evaluation through the range of ``A + B``; see module docstring."""
    n = a.shape[0]
    w, v = range_basis(a + b, tol)
    if w.shape[0] == 0:
        return np.zeros((n, n), dtype=np.result_type(a, b))
    c = v * np.sqrt(w)
    c_inv = v / np.sqrt(w)
    a_red = hermitize(c_inv.conj().T @ a @ c_inv)
    b_red = hermitize(c_inv.conj().T @ b @ c_inv)
    # a_red + b_red = I, so both are diagonal in any eigenbasis of a_red
    _, y = np.linalg.eigh(a_red)
    x = np.einsum("ij,ik,kj->j", y.conj(), a_red, y).real
    z = np.einsum("ij,ik,kj->j", y.conj(), b_red, y).real
    x = _snap(np.clip(x, 0.0, 1.0), tol.rank_rel)
    z = _snap(np.clip(z, 0.0, 1.0), tol.rank_rel)
    m = f.scalar_mean(x, z)
    return hermitize(c @ ((y * m) @ y.conj().T) @ c.conj().T)


def downward_sequence(a, b, f: RepresentingFunction, epsilons=EPSILONS):
    """Closed-form means of ``(A + εI, B + εI)`` for each ε in ``epsilons``."""
    a = as_psd(a)
    b = as_psd(b)
    check_same_dim(a, b)
    eye = np.eye(a.shape[0])
    return [_closed_form(a + eps * eye, b + eps * eye, f, 0.0) for eps in epsilons]


def boundary_limit(a, b, f: RepresentingFunction, tol: ToleranceConfig = DEFAULT_TOL, epsilons=EPSILONS):
    """
    Downward ε-limit of ``(A + εI) σ (B + εI)``.

    The last two iterates must agree to ``10 * tol.eq * scale``; otherwise
    :class:`BoundaryDivergence` is raised.  Convergence is only ``O(ε^p)`` for
    power means with ``p > 0`` and the closed form loses digits once ε is near
    ``1e-8``, so this settles only on mildly singular inputs.  It is the
    fallback for representing functions without boundary data.
    """
    seq = downward_sequence(a, b, f, epsilons)
    gap = opnorm(seq[-1] - seq[-2])
    if gap >= 10.0 * tol.eq * scale_of(a, b):
        raise BoundaryDivergence(f"ε-limit not settled: last step {gap:.3e}")
    return seq[-1]


CAUCHY_EPSILONS = tuple(10.0 ** -k for k in range(1, 13))


class DownwardContinuity(NamedTuple):
    monotone: bool
    ratio: float
    tail_bound: float
    limit_error: float
    passed: bool


def downward_continuity_check(
    a, b, f: RepresentingFunction, tol: ToleranceConfig = DEFAULT_TOL, epsilons=CAUCHY_EPSILONS
) -> DownwardContinuity:
    """
    Cauchy test for ``(A + εI) σ (B + εI)`` as ε decreases.

    The iterates must be nonincreasing in the Löwner order and their steps
    must shrink geometrically over the last six ε (ratio ``< 1``), which
    bounds the distance to the limit by ``step * ratio / (1 - ratio)``.  The
    last iterate must lie within twice that bound (plus ``10 * tol.eq``) of
    the mean at ``(A, B)``.  Iterates are evaluated through the reduction
    to ``rng(A + B)`` without snapping, which stays accurate for tiny ε where
    the closed form loses all digits.
    """
    a = as_psd(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    eps = sorted(epsilons, reverse=True)
    if len(eps) < 3:
        raise ValueError("need at least three epsilons")
    eye = np.eye(a.shape[0])
    exact = tol.replace(rank_rel=0.0)
    if f.slope_at_infinity is None:
        seq = [_closed_form(a + e * eye, b + e * eye, f, 0.0) for e in eps]
    else:
        seq = [_reduced_mean(a + e * eye, b + e * eye, f, exact) for e in eps]
    scale = scale_of(a, b)
    floor = 10.0 * tol.eq * scale
    steps = [opnorm(x - y) for x, y in zip(seq, seq[1:])]
    monotone = all(
        np.linalg.eigvalsh(hermitize(x - y))[0] >= -tol.order * scale for x, y in zip(seq, seq[1:])
    )
    tail = steps[-7:]
    ratios = [y / x for x, y in zip(tail, tail[1:]) if x > floor]
    ratio = max(ratios) if ratios else 0.0
    bound = steps[-1] * ratio / (1.0 - ratio) if ratio < 1 else math.inf
    err = opnorm(seq[-1] - ka_mean_from_function(a, b, f, tol))
    passed = monotone and ratio < 1 and err <= 2.0 * bound + floor
    return DownwardContinuity(monotone, float(ratio), float(bound), float(err), bool(passed))


def ka_mean_from_function(a, b, f: RepresentingFunction, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    Kubo-Ando mean of two PSD matrices from its representing function.

    Parameters
    ----------
    a, b : array_like of shape (n, n)
        PSD matrices, possibly singular.
    f : RepresentingFunction
        Representing function of the mean.

    Returns
    -------
    ndarray of shape (n, n)
        ``A σ B``.
    """
    a, wa = psd_with_spectrum(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    if wa[0] > tol.pd * max(1.0, abs(wa[-1])):
        return _closed_form(a, b, f, tol.rank_rel)
    try:
        return _reduced_mean(a, b, f, tol)
    except DomainError:
        return boundary_limit(a, b, f, tol)


def ka_power_mean(a, b, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Kubo-Ando power mean ``A m_p B`` for ``p`` in ``[-1, 1] \\ {0}``."""
    return ka_mean_from_function(a, b, representing_function_power(_check_ka_exponent(p)), tol)


def conventional_mean(a, b, p: float, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """
    Conventional power mean ``((A^p + B^p)/2)^{1/p}``.

    For ``-1 <= p < 0`` the semidefinite extension
    ``(A^q m_{-1} B^q)^{1/q}`` with ``q = -p`` is used.  For ``p < -1`` both
    arguments must be positive definite.
    """
    p = float(p)
    if p == 0 or not math.isfinite(p):
        raise InvalidExponent("conventional power mean needs a nonzero finite exponent")
    a = as_psd(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    if p > 0:
        return power(hermitize(power(a, p, tol) + power(b, p, tol)) / 2.0, 1.0 / p, tol)
    if p >= -1:
        q = -p
        inner = ka_power_mean(power(a, q, tol), power(b, q, tol), -1.0, tol)
        return power(inner, 1.0 / q, tol)
    if not (is_pd(a, tol) and is_pd(b, tol)):
        raise SingularPower(f"conventional mean with p = {p} < -1 needs positive definite arguments")
    return power(hermitize(power(a, p, tol) + power(b, p, tol)) / 2.0, 1.0 / p, tol)


class NamedMean(str, enum.Enum):
    ARITHMETIC = "arithmetic"
    HARMONIC = "harmonic"
    GEOMETRIC = "geometric"


def named_mean(a, b, which, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Arithmetic, harmonic or geometric mean via their textbook closed forms."""
    which = NamedMean(which)
    a = as_psd(a, tol)
    b = as_psd(b, tol)
    check_same_dim(a, b)
    if which is NamedMean.ARITHMETIC:
        return hermitize(a + b) / 2.0
    if which is NamedMean.HARMONIC:
        if is_pd(a, tol) and is_pd(b, tol):
            return hermitize(2.0 * np.linalg.inv(np.linalg.inv(a) + np.linalg.inv(b)))
        return ka_mean_from_function(a, b, HARMONIC, tol)
    if is_pd(a, tol):
        a_sqrt, a_isqrt = sqrt_pair(a, tol)
        return hermitize(a_sqrt @ power(a_isqrt @ b @ a_isqrt, 0.5, tol) @ a_sqrt)
    return ka_mean_from_function(a, b, GEOMETRIC, tol)


# --------
# MeanSpec
# --------
class Family(str, enum.Enum):
    CONVENTIONAL = "conv"
    KUBO_ANDO = "ka"


@dataclass(frozen=True)
class MeanSpec:
    """Exponent plus family; callable as ``spec(A, B)``."""

    p: float
    family: Family = Family.KUBO_ANDO

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "p", float(self.p))
        if self.p == 0 or not math.isfinite(self.p):
            raise InvalidExponent("p must be a nonzero finite real")
        if self.family is Family.KUBO_ANDO:
            _check_ka_exponent(self.p)

    @property
    def q(self) -> float:
        return abs(self.p)

    def __call__(self, a, b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
        if self.family is Family.KUBO_ANDO:
            return ka_power_mean(a, b, self.p, tol)
        return conventional_mean(a, b, self.p, tol)


def mean(a, b, p: float, family="ka", tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    return MeanSpec(p, family)(a, b, tol)


__all__ = [
    "ARITHMETIC",
    "GEOMETRIC",
    "HARMONIC",
    "Family",
    "MeanSpec",
    "NamedMean",
    "RepresentingFunction",
    "adjoint_mean",
    "boundary_limit",
    "conventional_mean",
    "downward_continuity_check",
    "downward_sequence",
    "ka_mean_from_function",
    "ka_power_mean",
    "mean",
    "named_function",
    "named_mean",
    "representing_function_power",
    "scalar_power_mean",
    "transpose_mean",
]
