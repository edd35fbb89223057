"""Command-line interface.

Every command writes one JSON report (stdout, or ``--out``).  Exit status is
0 on success, 1 when a suite or verification fails, 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

from ._version import __version__
from .core import DEFAULT_TOL, ToleranceConfig, relative_residual
from .errors import BoundaryDivergence, InvalidExponent, PowerMeansError
from .geometry import rank_one_projection, strength, thompson_distance, thompson_distance_log
from .matrix_io import load_matrix, load_vector, matrix_to_obj
from .means import Family, MeanSpec, ka_mean_from_function, ka_power_mean, named_function
from .preservers import PreserverForm, PreserverKind, solve_conventional_equation, solve_ka_equation, verify_preserver
from .sampling import random_invertible, random_pd_conditioned, random_unitary, trial_rng
from .suites import SUITES, dumps_report, finite_or_none, run_suite

COMMANDS = ("mean", "distance", "strength", "solve", "verify", "suite", "gap-search")
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class UsageError(PowerMeansError, ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: Optional[float] = None
    family: str = "ka"
    dim: int = 3
    trials: int = 100
    seed: int = 0
    tol: ToleranceConfig = DEFAULT_TOL
    inputs: list = field(default_factory=list)
    name: Optional[str] = None
    function: Optional[str] = None
    form: Optional[str] = None
    conjugate_linear: bool = False
    strict: bool = False

    def validate(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        Family(self.family)
        if self.p is not None:
            if not math.isfinite(self.p) or self.p == 0:
                raise InvalidExponent("--p must be a nonzero finite number")
            if self.family == Family.KUBO_ANDO.value and abs(self.p) > 1:
                raise InvalidExponent("the Kubo-Ando family needs --p in [-1, 1]")
        if self.trials < 1:
            raise UsageError("--trials must be at least 1")
        if self.dim < 1:
            raise UsageError("--dim must be at least 1")

    def as_dict(self) -> dict:
        """Resolved configuration as embedded in reports (output path excluded)."""
        return {
            "command": self.command,
            "p": self.p,
            "family": self.family,
            "dim": self.dim,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol.as_dict(),
            "inputs": list(self.inputs),
            "name": self.name,
            "function": self.function,
            "form": self.form,
            "conjugate_linear": self.conjugate_linear,
            "strict": self.strict,
        }


def _need_p(cfg):
    if cfg.p is None:
        raise UsageError(f"{cfg.command} needs --p")
    return cfg.p


def _need_inputs(cfg, n):
    if len(cfg.inputs) != n:
        raise UsageError(f"{cfg.command} needs {n} input file(s), got {len(cfg.inputs)}")
    return cfg.inputs


def _base(cfg):
    return {"command": cfg.command, "version": __version__, "config": cfg.as_dict()}


def _cmd_mean(cfg):
    pa, pb = _need_inputs(cfg, 2)
    a, b = load_matrix(pa), load_matrix(pb)
    if cfg.function is not None:
        if cfg.family != Family.KUBO_ANDO.value:
            raise UsageError("--function applies to the Kubo-Ando family only")
        result = ka_mean_from_function(a, b, named_function(cfg.function), cfg.tol)
    else:
        result = MeanSpec(_need_p(cfg), cfg.family)(a, b, cfg.tol)
    return EXIT_OK, {**_base(cfg), "result": matrix_to_obj(result)}


def _cmd_distance(cfg):
    pa, pb = _need_inputs(cfg, 2)
    a, b = load_matrix(pa), load_matrix(pb)
    d = thompson_distance(a, b, cfg.tol)
    d_log = thompson_distance_log(a, b, cfg.tol)
    return EXIT_OK, {**_base(cfg), "thompson_distance": d, "thompson_distance_log": d_log}


def _cmd_strength(cfg):
    pa, pv = _need_inputs(cfg, 2)
    a, phi = load_matrix(pa), load_vector(pv)
    val = strength(a, rank_one_projection(phi), cfg.tol)
    return EXIT_OK, {**_base(cfg), "strength": val.value, "in_range": val.in_range}


def _cmd_solve(cfg):
    pa, pb = _need_inputs(cfg, 2)
    a, b = load_matrix(pa), load_matrix(pb)
    p = _need_p(cfg)
    if cfg.family == Family.KUBO_ANDO.value:
        x = solve_ka_equation(a, b, p, cfg.tol)
        back = (lambda sol: ka_power_mean(a, sol, p, cfg.tol))
    else:
        x = solve_conventional_equation(a, b, p, strict=cfg.strict, tol=cfg.tol)
        back = (lambda sol: MeanSpec(p, "conv")(a, sol, cfg.tol))
    report = {**_base(cfg), "solution": None, "residual": None}
    if x is not None:
        report["solution"] = matrix_to_obj(x)
        report["residual"] = finite_or_none(relative_residual(back(x), b / 2.0 ** (1.0 / p)))
    return EXIT_OK, report


def _cmd_verify(cfg):
    if cfg.form is None:
        raise UsageError("verify needs --form")
    kind = PreserverKind(cfg.form)
    p = _need_p(cfg)
    # index past the last trial so T is independent of the operand draws
    rng = trial_rng(cfg.seed, cfg.trials)
    extra = {}
    if cfg.inputs:
        t = load_matrix(cfg.inputs[0])
        if len(cfg.inputs) > 1:
            extra["D"] = load_matrix(cfg.inputs[1])
    elif kind in (PreserverKind.JORDAN_UNITARY, PreserverKind.JORDAN_TRANSPOSE):
        t = random_unitary(rng, cfg.dim)
        extra["D"] = random_pd_conditioned(rng, cfg.dim)
    else:
        t = random_invertible(rng, cfg.dim)
    if kind is PreserverKind.POWER_CONGRUENCE or (
        kind is not PreserverKind.CONGRUENCE and cfg.family == Family.CONVENTIONAL.value
    ):
        extra["p"] = p
    form = PreserverForm(kind, t, conjugate_linear=cfg.conjugate_linear, **extra)
    rep = verify_preserver(form, MeanSpec(p, cfg.family), cfg.trials, cfg.seed, cfg.tol)
    report = {
        **_base(cfg),
        "trials": rep.trials,
        "max_residual": finite_or_none(rep.max_residual),
        "passed": rep.passed,
        "expectation": rep.expectation,
        "failures": [[d, finite_or_none(r)] for d, r in rep.failures],
        "witnesses": [
            {"trial": w["trial"], "residual": finite_or_none(w["residual"]),
             "inputs": [matrix_to_obj(m) for m in w["inputs"]]}
            for w in rep.witnesses
        ],
        "form": {"kind": kind.value, "T": matrix_to_obj(form.T)},
    }
    return (EXIT_OK if rep.passed else EXIT_FAIL), report


def _cmd_suite(cfg, name=None):
    name = name or cfg.name
    if name is None:
        raise UsageError("suite needs --name")
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    report = run_suite(name, _need_p(cfg), cfg.dim, cfg.trials, cfg.seed, cfg.tol, config=cfg.as_dict())
    report["command"] = cfg.command
    return (EXIT_OK if report["passed"] else EXIT_FAIL), report


def run(cfg: RunConfig):
    """Execute a configuration; returns ``(exit_code, report)``."""
    cfg.validate()
    handlers = {
        "mean": _cmd_mean,
        "distance": _cmd_distance,
        "strength": _cmd_strength,
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "suite": _cmd_suite,
        "gap-search": lambda c: _cmd_suite(c, "gap"),
    }
    return handlers[cfg.command](cfg)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powermeans", description="Power means of positive semidefinite matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, inputs=None):
        sp.add_argument("--p", type=float, help="mean exponent")
        sp.add_argument("--family", choices=[f.value for f in Family], default="ka")
        sp.add_argument("--dim", type=int, default=3)
        sp.add_argument("--trials", type=int, default=100)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol-eq", type=float, default=DEFAULT_TOL.eq)
        sp.add_argument("--tol-order", type=float, default=DEFAULT_TOL.order)
        sp.add_argument("--out", help="write the report here instead of stdout")
        if inputs:
            sp.add_argument("inputs", nargs="*", metavar="FILE", help=inputs)

    sp = sub.add_parser("mean", help="evaluate a power mean of two matrix files")
    common(sp, "A.json B.json")
    sp.add_argument("--function", help="Kubo-Ando preset: arithmetic, harmonic, geometric, power:<p>")
    common(sub.add_parser("distance", help="Thompson distance of two PD matrices"), "A.json B.json")
    common(sub.add_parser("strength", help="strength of A along a vector"), "A.json phi.json")
    sp = sub.add_parser("solve", help="solve A # X = B / 2^(1/p)")
    common(sp, "A.json B.json")
    sp.add_argument("--strict", action="store_true", help="conventional family: require B^p - A^p definite")
    sp = sub.add_parser("verify", help="check that a preserver form preserves a mean")
    common(sp, "optional T.json [D.json]; random T from --seed otherwise")
    sp.add_argument("--form", choices=[k.value for k in PreserverKind], required=True)
    sp.add_argument("--conjugate-linear", action="store_true")
    sp = sub.add_parser("suite", help="run a named randomized suite")
    common(sp)
    sp.add_argument("--name", choices=list(SUITES), required=True)
    common(sub.add_parser("gap-search", help="search for pairs where the two mean families differ"))
    return parser


def config_from_args(args) -> RunConfig:
    tol = DEFAULT_TOL.replace(eq=args.tol_eq, order=args.tol_order)
    return RunConfig(
        command=args.command,
        p=args.p,
        family=args.family,
        dim=args.dim,
        trials=args.trials,
        seed=args.seed,
        tol=tol,
        inputs=list(getattr(args, "inputs", []) or []),
        name=getattr(args, "name", None),
        function=getattr(args, "function", None),
        form=getattr(args, "form", None),
        conjugate_linear=getattr(args, "conjugate_linear", False),
        strict=getattr(args, "strict", False),
    )


def _emit(text, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        code, report = run(cfg)
        text = dumps_report(report)
    except (PowerMeansError, ValueError, OSError) as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "version": __version__}
        code = EXIT_FAIL if isinstance(exc, BoundaryDivergence) else EXIT_INPUT
        text = json.dumps(err, sort_keys=True, indent=2) + "\n"
        sys.stderr.write(text)
        return code
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
