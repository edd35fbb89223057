"""Named randomized suites and their JSON reports.

Every suite takes ``(p, dim, trials, seed, tol)`` and returns a plain dict
that serializes deterministically: trial ``i`` draws from
``trial_rng(seed, i)`` and report assembly is sequential.
"""

from __future__ import annotations

import json
import math
from typing import Callable, Dict

import numpy as np

from ._version import __version__
from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    congruence,
    hermitize,
    is_projection,
    opnorm,
    power,
    relative_residual,
    scale_of,
)
from .errors import InvalidExponent
from .geometry import rank_one_projection, strength
from .lemmas import (
    gap_search,
    iterated_mean_probe,
    mean_gap,
    monotonicity_witness,
    projection_characterization_check,
    range_disjointness_check,
    rank_one_mean_check,
    reach_from_invertible,
    zero_characterization_check,
)
from .matrix_io import matrix_to_obj
from .means import (
    Family,
    MeanSpec,
    _check_ka_exponent,
    EPSILONS,
    conventional_mean,
    downward_continuity_check,
    downward_sequence,
    ka_power_mean,
    representing_function_power,
)
from .preservers import PreserverForm, PreserverKind
from .sampling import (
    random_commuting_pair,
    random_invertible,
    random_pd,
    random_pd_conditioned,
    random_projection,
    random_psd,
    random_singular_psd,
    random_unit_vector,
    random_unitary,
    trial_rng,
)

MAX_WITNESSES = 5
ADVERSARIAL_MARGIN = 1e-3


def finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


class Check:
    """Accumulates residuals of one property; ``expect="fail"`` marks a control."""

    def __init__(self, name, threshold, expect="pass", margin=ADVERSARIAL_MARGIN):
        self.name = name
        self.threshold = float(threshold)
        self.expect = expect
        self.margin = float(margin)
        self.trials = 0
        self.max_residual = 0.0
        self.failures = 0
        self.witnesses = []

    def add(self, trial, residual, inputs=()):
        residual = float(residual)
        self.trials += 1
        if not residual <= self.max_residual:
            self.max_residual = residual
        bad = not residual <= self.threshold
        if self.expect == "fail":
            bad = not bad
        if bad:
            self.failures += 1
        # a control records its strongest witnesses; a property its violations
        keep = (not residual <= self.threshold) if self.expect == "fail" else bad
        if keep and inputs:
            self.witnesses.append((residual, trial, inputs))
            self.witnesses.sort(key=lambda w: (-w[0] if math.isfinite(w[0]) else -math.inf, w[1]))
            del self.witnesses[MAX_WITNESSES:]

    @property
    def passed(self) -> bool:
        if self.expect == "fail":
            # the control must be violated, with a clear margin
            return self.trials > 0 and self.max_residual > self.margin
        return self.failures == 0

    def absorb(self, report):
        """Take over the counts of a :class:`VerificationReport`."""
        self.trials += report.trials
        self.max_residual = max(self.max_residual, report.max_residual)
        self.failures += len(report.failures)
        for w in report.witnesses[:MAX_WITNESSES]:
            self.witnesses.append((w["residual"], w["trial"], tuple(w["inputs"])))
        del self.witnesses[MAX_WITNESSES:]

    def summary(self) -> dict:
        return {
            "trials": self.trials,
            "max_residual": finite_or_none(self.max_residual),
            "threshold": self.threshold,
            "failures": self.failures,
            "expect": self.expect,
            "passed": self.passed,
        }

    def witness_objs(self) -> list:
        return [
            {
                "check": self.name,
                "trial": t,
                "residual": finite_or_none(r),
                "inputs": [matrix_to_obj(m) for m in mats],
            }
            for r, t, mats in self.witnesses
        ]


def _lower_violation(small, big, scale):
    """How far ``small <= big`` fails, relative to ``scale`` (0 when it holds)."""
    return max(0.0, -float(np.linalg.eigvalsh(hermitize(big - small))[0])) / scale


def _psd_with_range_of_rank(rng, dim, rank):
    if rank == dim:
        return random_pd(rng, dim)
    if rank == 0:
        return np.zeros((dim, dim))
    return random_singular_psd(rng, dim, rank)


# ------
# Suites
# ------
def suite_axioms(p, dim, trials, seed, tol):
    """Kubo-Ando axioms for ``m_p``: monotonicity, transformer inequality, downward continuity."""
    p = _check_ka_exponent(p)
    f = representing_function_power(p)
    mono = Check("monotonicity", tol.order)
    transformer = Check("transformer_inequality", tol.order)
    transfer_eq = Check("transformer_equality_invertible", tol.eq)
    symmetry = Check("symmetry", tol.eq)
    adjoint = Check("adjoint_identity", tol.eq)
    downward = Check("downward_continuity", 0.0)
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = random_psd(rng, dim)
        b = random_psd(rng, dim)
        c = a + random_psd(rng, dim)
        d = b + random_psd(rng, dim)
        lo = ka_power_mean(a, b, p, tol)
        hi = ka_power_mean(c, d, p, tol)
        mono.add(i, _lower_violation(lo, hi, scale_of(c, d)), (a, b, c, d))
        symmetry.add(i, relative_residual(lo, ka_power_mean(b, a, p, tol)), (a, b))

        # C = (X* X)^{1/2}, singular on odd trials
        x = random_singular_psd(rng, dim) if (i % 2 and dim > 1) else random_invertible(rng, dim)
        cc = power(hermitize(x.conj().T @ x), 0.5, tol)
        left = hermitize(cc @ lo @ cc)
        right = ka_power_mean(hermitize(cc @ a @ cc), hermitize(cc @ b @ cc), p, tol)
        scale = scale_of(left, right)
        transformer.add(i, _lower_violation(left, right, scale), (a, b, cc))
        if not i % 2 or dim == 1:
            transfer_eq.add(i, relative_residual(left, right), (a, b, cc))

        pa, pb = random_pd_conditioned(rng, dim, 100.0), random_pd_conditioned(rng, dim, 100.0)
        lhs = ka_power_mean(pa, pb, -p, tol)
        rhs = np.linalg.inv(ka_power_mean(np.linalg.inv(pa), np.linalg.inv(pb), p, tol))
        adjoint.add(i, relative_residual(lhs, hermitize(rhs)), (pa, pb))

        sa = random_singular_psd(rng, dim) if dim > 1 else np.zeros((1, 1))
        sb = random_psd(rng, dim)
        if rng.random() < 0.5:
            sa, sb = sb, sa
        res = downward_continuity_check(sa, sb, f, tol)
        downward.add(i, 0.0 if res.passed else 1.0, (sa, sb))

    # conventional means with p > 1 are not monotone; recorded, not asserted
    info = {}
    if dim > 1:
        w = monotonicity_witness(2.0, dim, trials=min(trials, 500), seed=seed, tol=tol)
        info["conventional_p2_monotonicity_violation"] = None if w is None else finite_or_none(w[3])
    return [mono, transformer, transfer_eq, symmetry, adjoint, downward], info


def suite_l1(p, dim, trials, seed, tol):
    """Positive exponents: zero characterization, commuting case, iterated means of invertibles."""
    p = _check_ka_exponent(p)
    if p < 0:
        raise InvalidExponent("suite L1 needs p in ]0, 1]")
    commuting = Check("commuting_coincidence", tol.eq)
    zero = Check("zero_characterization", tol.eq)
    invertible = Check("iterates_invertible", 0.0)
    reach = Check("invertible_membership", tol.eq)
    zero.absorb(zero_characterization_check(p, trials, seed, dim, tol))
    for i in range(trials):
        rng = trial_rng(seed, i)
        a, b = random_commuting_pair(rng, dim, singular=bool(i % 2))
        commuting.add(i, relative_residual(ka_power_mean(a, b, p, tol), conventional_mean(a, b, p, tol)), (a, b))
        if i < max(1, trials // 10):
            pa = random_pd(rng, dim)
            elems = iterated_mean_probe(pa, p, depth=4, samples=5, seed=seed * 7919 + i, tol=tol)
            worst = min(float(np.linalg.eigvalsh(e)[0]) / scale_of(e) for e in elems)
            invertible.add(i, 0.0 if worst > tol.pd else 1.0, (pa,))
        bb, cc = random_pd_conditioned(rng, dim), random_pd_conditioned(rng, dim)
        _, _, r = reach_from_invertible(bb, cc, p, tol)
        reach.add(i, r, (bb, cc))
    return [commuting, zero, invertible, reach], {}


def _mixed_projection_candidate(rng, dim):
    kind = int(rng.integers(5))
    if kind == 0:
        return random_projection(rng, dim, int(rng.integers(0, dim + 1)))
    if kind == 1:
        proj = random_projection(rng, dim, int(rng.integers(1, dim + 1)))
        return rng.choice([0.5, 2.0, 0.9]) * proj
    if kind == 2:
        return np.eye(dim)
    if kind == 3:
        return random_psd(rng, dim)
    w = rng.choice([0.0, 1.0, 0.5], size=dim)
    u = random_unitary(rng, dim)
    return hermitize((u * w) @ u.conj().T)


def _mixed_pair(rng, dim):
    kind = int(rng.integers(4))
    if kind == 0 and dim > 1:
        # complementary supports
        u = random_unitary(rng, dim)
        k = int(rng.integers(1, dim))
        pa = u[:, :k] @ u[:, :k].conj().T
        pb = u[:, k:] @ u[:, k:].conj().T
        x, y = random_pd(rng, dim), random_pd(rng, dim)
        return hermitize(pa @ x @ pa), hermitize(pb @ y @ pb)
    ra = int(rng.integers(0, dim + 1))
    rb = int(rng.integers(0, dim + 1))
    return _psd_with_range_of_rank(rng, dim, ra), _psd_with_range_of_rank(rng, dim, rb)


def _rank_one_case(rng, dim):
    a = random_psd(rng, dim, singular_fraction=0.6)
    kind = int(rng.integers(3))
    w, v = np.linalg.eigh(a)
    kernel = v[:, w <= 1e-10 * max(w[-1], 1.0)]
    if kind == 0 and kernel.shape[1]:
        phi = kernel @ random_unit_vector(rng, kernel.shape[1])
    elif kind == 1:
        phi = a @ random_unit_vector(rng, dim)
    else:
        phi = random_unit_vector(rng, dim)
    return a, phi / np.linalg.norm(phi)


def suite_l2(p, dim, trials, seed, tol):
    """Negative exponents: zero absorption, projections, disjoint ranges, rank-one means."""
    p = _check_ka_exponent(p)
    if p > 0:
        raise InvalidExponent("suite L2 needs p in [-1, 0[")
    zero = Check("zero_absorption", tol.eq)
    proj = Check("projection_characterization", 0.0)
    disjoint = Check("range_disjointness", 0.0)
    limit = Check("disjoint_limit_consistency", 1e-2)
    rank_one = Check("rank_one_formula", tol.eq)
    exact = Check("strength_diagonal_exact", 0.0)
    zero.absorb(zero_characterization_check(p, trials, seed, dim, tol))
    f = representing_function_power(p)
    for i in range(trials):
        rng = trial_rng(seed, i)
        a = _mixed_projection_candidate(rng, dim)
        agree = projection_characterization_check(a, p, tol) == is_projection(a, tol)
        proj.add(i, 0.0 if agree else 1.0, (a,))

        x, y = _mixed_pair(rng, dim)
        mean_zero, ranges_disjoint = range_disjointness_check(x, y, p, tol)
        disjoint.add(i, 0.0 if mean_zero == ranges_disjoint else 1.0, (x, y))
        if ranges_disjoint and i < 100:
            # the ε-scheme at its smallest ε must already be close to 0
            tail = downward_sequence(x, y, f, EPSILONS[-1:])[0]
            limit.add(i, opnorm(tail) / scale_of(x, y), (x, y))

        ra, phi = _rank_one_case(rng, dim)
        rep1 = rank_one_mean_check(ra, phi, p, tol)
        rank_one.add(i, rep1.max_residual, (ra, np.outer(phi, phi.conj())))

        diag = rng.choice([0.0, 0.5, 1.0, 2.0, 3.0], size=dim)
        k = int(rng.integers(dim))
        e = np.zeros(dim)
        e[k] = 1.0
        val = strength(np.diag(diag), rank_one_projection(e), tol).value
        exact.add(i, abs(val - diag[k]), (np.diag(diag),))
    return [zero, proj, disjoint, limit, rank_one, exact], {}


def suite_transfer(p, dim, trials, seed, tol):
    """``T (A m_p B) T* = (T A T*) m_p (T B T*)`` for invertible ``T``, both linearities."""
    p = _check_ka_exponent(p)
    linear = Check("transfer_linear", tol.eq)
    conj = Check("transfer_conjugate_linear", tol.eq)
    for i in range(trials):
        rng = trial_rng(seed, i)
        a, b = random_psd(rng, dim), random_psd(rng, dim)
        t = random_invertible(rng, dim)
        for check, cl in ((linear, False), (conj, True)):
            lhs = congruence(t, ka_power_mean(a, b, p, tol), cl, tol)
            rhs = ka_power_mean(congruence(t, a, cl, tol), congruence(t, b, cl, tol), p, tol)
            check.add(i, relative_residual(lhs, rhs), (a, b, t))
    return [linear, conj], {}


def _preserver_trial(check, i, form, spec, a, b, tol):
    lhs = form(spec(a, b, tol), tol)
    rhs = spec(form(a, tol), form(b, tol), tol)
    check.add(i, relative_residual(lhs, rhs), (a, b, form.T))


def _operands(rng, dim, i, pd_only):
    a, b = random_pd(rng, dim), random_pd(rng, dim)
    if not pd_only and dim > 1 and i % 3 == 2:
        if rng.random() < 0.5:
            a = random_singular_psd(rng, dim)
        else:
            b = random_singular_psd(rng, dim)
    return a, b


def suite_preserver_t4(p, dim, trials, seed, tol):
    """Congruences and Jordan-congruence forms preserve ``m_p``; congruences do not preserve the conventional mean."""
    p = _check_ka_exponent(p)
    spec = MeanSpec(p, Family.KUBO_ANDO)
    cong = Check("congruence_linear", tol.eq)
    cong_cl = Check("congruence_conjugate_linear", tol.eq)
    jordan = Check("jordan_congruence", tol.eq)
    checks = [cong, cong_cl, jordan]
    control = None
    if abs(p) != 1 and dim > 1:
        control = Check("control_congruence_conventional", tol.eq, expect="fail")
        checks.append(control)
    for i in range(trials):
        rng = trial_rng(seed, i)
        t = random_invertible(rng, dim)
        a, b = _operands(rng, dim, i, False)
        _preserver_trial(cong, i, PreserverForm("congruence", t), spec, a, b, tol)
        _preserver_trial(cong_cl, i, PreserverForm("congruence", t, conjugate_linear=True), spec, a, b, tol)
        kind = PreserverKind.JORDAN_TRANSPOSE if i % 2 else PreserverKind.JORDAN_UNITARY
        form = PreserverForm(kind, random_unitary(rng, dim), D=random_pd_conditioned(rng, dim))
        _preserver_trial(jordan, i, form, spec, a, b, tol)
        if control is not None:
            conv = MeanSpec(p, Family.CONVENTIONAL)
            _preserver_trial(control, i, PreserverForm("congruence", t), conv, a, b, tol)
    return checks, {}


def suite_preserver_t5(p, dim, trials, seed, tol):
    """Power-congruences and Jordan power forms preserve the conventional mean ``m_p``."""
    p = float(p)
    spec = MeanSpec(p, Family.CONVENTIONAL)
    pd_only = p < -1
    pc = Check("power_congruence_linear", tol.eq)
    pc_cl = Check("power_congruence_conjugate_linear", tol.eq)
    jordan = Check("jordan_power_form", tol.eq)
    checks = [pc, pc_cl, jordan]
    control = None
    if abs(p) < 1 and dim > 1:
        control = Check("control_power_congruence_kubo_ando", tol.eq, expect="fail")
        checks.append(control)
    for i in range(trials):
        rng = trial_rng(seed, i)
        t = random_invertible(rng, dim)
        a, b = _operands(rng, dim, i, pd_only or abs(p) > 1)
        _preserver_trial(pc, i, PreserverForm("power-congruence", t, p=p), spec, a, b, tol)
        _preserver_trial(pc_cl, i, PreserverForm("power-congruence", t, conjugate_linear=True, p=p), spec, a, b, tol)
        kind = PreserverKind.JORDAN_TRANSPOSE if i % 2 else PreserverKind.JORDAN_UNITARY
        form = PreserverForm(kind, random_unitary(rng, dim), p=p, D=random_pd_conditioned(rng, dim))
        pa, pb = random_pd(rng, dim), random_pd(rng, dim)
        _preserver_trial(jordan, i, form, spec, pa, pb, tol)
        if control is not None:
            ka = MeanSpec(p, Family.KUBO_ANDO)
            _preserver_trial(control, i, PreserverForm("power-congruence", t, p=p), ka, a, b, tol)
    return checks, {}


def suite_gap(p, dim, trials, seed, tol):
    """Largest conventional-vs-Kubo-Ando gap; positive unless ``p = ±1`` or ``dim = 1``."""
    p = _check_ka_exponent(p)
    rec = gap_search(dim, p, trials, seed, tol)
    agree = abs(p) == 1 or dim == 1
    if agree:
        gap = Check("gap_vanishes", tol.eq)
    else:
        gap = Check("gap_exceeds_100_tol_eq", tol.eq, expect="fail", margin=100 * tol.eq)
    gap.add(rec.trial, rec.gap, (rec.A, rec.B))
    reverify = Check("witness_reverified", tol.eq)
    reverify.add(rec.trial, abs(mean_gap(rec.A, rec.B, p, tol) - rec.gap), (rec.A, rec.B))
    invariance = Check("unitary_invariance", tol.eq)
    rng = trial_rng(seed, trials)
    u = random_unitary(rng, dim)
    ua, ub = hermitize(u @ rec.A @ u.conj().T), hermitize(u @ rec.B @ u.conj().T)
    invariance.add(0, abs(mean_gap(ua, ub, p, tol) - rec.gap) / scale_of(rec.A, rec.B), (rec.A, rec.B, u))
    info = {"gap": finite_or_none(rec.gap), "commutator_norm": finite_or_none(rec.commutator_norm)}
    return [gap, reverify, invariance], info


SUITES: Dict[str, Callable] = {
    "axioms": suite_axioms,
    "L1": suite_l1,
    "L2": suite_l2,
    "transfer": suite_transfer,
    "preserver-t4": suite_preserver_t4,
    "preserver-t5": suite_preserver_t5,
    "gap": suite_gap,
}


def run_suite(name, p, dim=3, trials=100, seed=0, tol: ToleranceConfig = DEFAULT_TOL, config=None) -> dict:
    """Run a named suite and assemble its report."""
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    if dim < 1 or trials < 1:
        raise ValueError("dim and trials must be at least 1")
    checks, info = SUITES[name](p, dim, trials, seed, tol)
    # checks with looser bars (e.g. the ε-limit consistency) are reported only per check
    gating = [c for c in checks if c.expect == "pass" and c.threshold <= tol.eq]
    worst = max((c.max_residual for c in gating), default=0.0)
    witnesses = [w for c in checks for w in c.witness_objs()]
    report = {
        "suite": name,
        "p": float(p),
        "dim": int(dim),
        "trials": int(trials),
        "seed": int(seed),
        "max_residual": finite_or_none(worst),
        "passed": all(c.passed for c in checks),
        "witnesses": witnesses,
        "checks": {c.name: c.summary() for c in checks},
        "version": __version__,
        "config": config if config is not None else {"tol": tol.as_dict()},
    }
    if info:
        report["info"] = info
    return report


def dumps_report(report: dict) -> str:
    """Deterministic JSON text; refuses NaN and infinities."""
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
