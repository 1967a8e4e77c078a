"""Windowed lattice-point counts on the hyperboloid x1^2 + x2^2 - x3^2 = n^2.

Exact enumeration of the smoothed solution counts, the nine-index divisor
rearrangement with its Poisson/Kloosterman dual, the singular series of the
main-term prediction, and a CLI harness tying the verifications together.
"""

from .arith import (
    ExactRational,
    Factorization,
    NotInvertible,
    divisors,
    factorize,
    mod_inverse,
    mult_funcs,
)
from .expsum import KloostermanValue, WeilViolation, kloosterman, ramanujan, weil_margin
from .lattice import (
    Overflow,
    S1Split,
    SolutionSet,
    Triple,
    s1_sharp_pm_direct,
    s1_split_direct,
    smoothed_sum_S,
    smoothed_sum_S1,
    two_square_reps,
)
from .singular import (
    BadCoprimality,
    EvenInput,
    NotSquarefree,
    PerronCheck,
    SingularSeries,
    main_term_predict,
    phi_partial_sum_check,
    singular_series,
    singular_series_squarefree,
)
from .transform import (
    ChainIndex,
    TParams,
    enumerate_chain,
    fourier_integral_I,
    i00_identity_check,
    s1_sharp_minus_chain,
    t_direct,
    t_poisson,
)
from .weights import (
    BadWindow,
    QuadratureFailure,
    WeightSystem,
    build_weight_system,
    canonical_bump,
    derivative_bound_report,
    fourier_zero,
)

__version__ = "0.1.0"

__all__ = [
    "BadCoprimality",
    "BadWindow",
    "ChainIndex",
    "EvenInput",
    "ExactRational",
    "Factorization",
    "KloostermanValue",
    "NotInvertible",
    "NotSquarefree",
    "Overflow",
    "PerronCheck",
    "QuadratureFailure",
    "S1Split",
    "SingularSeries",
    "SolutionSet",
    "TParams",
    "Triple",
    "WeightSystem",
    "WeilViolation",
    "build_weight_system",
    "canonical_bump",
    "derivative_bound_report",
    "divisors",
    "enumerate_chain",
    "factorize",
    "fourier_integral_I",
    "fourier_zero",
    "i00_identity_check",
    "kloosterman",
    "main_term_predict",
    "mod_inverse",
    "mult_funcs",
    "phi_partial_sum_check",
    "ramanujan",
    "s1_sharp_minus_chain",
    "s1_sharp_pm_direct",
    "s1_split_direct",
    "singular_series",
    "singular_series_squarefree",
    "smoothed_sum_S",
    "smoothed_sum_S1",
    "t_direct",
    "t_poisson",
    "two_square_reps",
    "weil_margin",
]
