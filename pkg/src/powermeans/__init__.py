"""Conventional and Kubo-Ando power means of positive semidefinite matrices."""

from ._version import __version__
from .core import (
    DEFAULT_TOL,
    ToleranceConfig,
    as_pd,
    as_psd,
    congruence,
    func_calculus,
    is_pd,
    is_projection,
    is_psd,
    loewner_leq,
    power,
    range_projection,
    spectral,
    strict_less,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    RankOneProjection,
    leq_via_strengths,
    rank_one_projection,
    strength,
    sup_ratio,
    thompson_distance,
    thompson_distance_log,
)
from .lemmas import (
    GapRecord,
    gap_search,
    iterated_mean_probe,
    projection_characterization_check,
    range_disjointness_check,
    rank_one_mean_check,
    zero_characterization_check,
)
from .means import (
    ARITHMETIC,
    GEOMETRIC,
    HARMONIC,
    Family,
    MeanSpec,
    RepresentingFunction,
    adjoint_mean,
    conventional_mean,
    ka_mean_from_function,
    ka_power_mean,
    mean,
    named_mean,
    representing_function_power,
    scalar_power_mean,
    transpose_mean,
)
from .preservers import (
    PreserverForm,
    PreserverKind,
    VerificationReport,
    apply_preserver,
    solve_conventional_equation,
    solve_ka_equation,
    verify_preserver,
)
from .suites import run_suite
