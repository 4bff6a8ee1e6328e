"""Numerical toolkit for harmonically convex functions: convexity sampling,
the harmonic Hermite-Hadamard inequality, derivative-based bounds and the
related two-argument means."""

__version__ = "0.1.0"

from .convexity import (
    ConvexityVerdict,
    FunctionTraits,
    Verdict,
    Witness,
    check_harmonic_convexity,
    check_via_reciprocal_transform,
    classify_by_proposition,
    function_traits,
)
from .expr import DomainError, ExprSyntaxError, FunctionSpec, eval, eval_derivative, parse
from .hh import (
    BoundReport,
    HHReport,
    LambdaConstants,
    LemmaReport,
    MuConstants,
    hh_triple,
    hoelder_bound_check,
    lambda_constants,
    lemma_identity_check,
    mu_constants,
    powermean_bound_check,
)
from .means import MeanValues, compute_means, lp_monotonicity_check, proposition_check
from .quad import Interval, QuadratureError, QuadResult, integrate, integrate_kink_split

__all__ = [
    "BoundReport",
    "ConvexityVerdict",
    "DomainError",
    "ExprSyntaxError",
    "FunctionSpec",
    "FunctionTraits",
    "HHReport",
    "Interval",
    "LambdaConstants",
    "LemmaReport",
    "MeanValues",
    "MuConstants",
    "QuadResult",
    "QuadratureError",
    "Verdict",
    "Witness",
    "check_harmonic_convexity",
    "check_via_reciprocal_transform",
    "classify_by_proposition",
    "compute_means",
    "eval",
    "eval_derivative",
    "function_traits",
    "hh_triple",
    "hoelder_bound_check",
    "integrate",
    "integrate_kink_split",
    "lambda_constants",
    "lemma_identity_check",
    "lp_monotonicity_check",
    "mu_constants",
    "parse",
    "powermean_bound_check",
    "proposition_check",
]
