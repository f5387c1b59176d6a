"""Numerical toolkit for (n,m)-A-normal and (n,m)-A-quasinormal operators
on finite-dimensional semi-Hilbertian spaces, with an exact calculus for
weighted unilateral shifts."""

from .classes import (
    ClassIndex,
    ClassVerdict,
    a_isometry,
    a_normal,
    a_selfadjoint,
    a_unitary,
    basic_class_predicates,
    nm_normal_residual,
    nm_quasinormal_residual,
)
from .errors import NmNormalError
from .numerics import DEFAULT_TOLERANCE, Tolerance, Verdict
from .semihilbert import BoundOperator, MetricContext, a_adjoint, make_context, membership

__version__ = "0.1.0"

__all__ = [
    "BoundOperator",
    "ClassIndex",
    "ClassVerdict",
    "DEFAULT_TOLERANCE",
    "MetricContext",
    "NmNormalError",
    "Tolerance",
    "Verdict",
    "a_adjoint",
    "a_isometry",
    "a_normal",
    "a_selfadjoint",
    "a_unitary",
    "basic_class_predicates",
    "make_context",
    "membership",
    "nm_normal_residual",
    "nm_quasinormal_residual",
    "__version__",
]
