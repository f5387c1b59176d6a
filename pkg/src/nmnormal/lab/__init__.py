"""Instance generators, the statement registry and witness search."""

from .generators import FAMILIES, GeneratorSpec, Instance, generate
from .registry import REGISTRY, CheckReport, PremiseStatus, run_check
from .search import SearchOutcome, search
from .suite import SuiteConfig, SuiteReport, run_suite

__all__ = [
    "FAMILIES",
    "REGISTRY",
    "CheckReport",
    "GeneratorSpec",
    "Instance",
    "PremiseStatus",
    "SearchOutcome",
    "SuiteConfig",
    "SuiteReport",
    "generate",
    "run_check",
    "run_suite",
    "search",
]
