"""Operator class predicates and derived constructions.

Every predicate returns a :class:`ClassVerdict` carrying the scaled
residual it was decided on.  Powers of the A-adjoint are always powers of
the cached ``T^#``; they are never recomputed as the adjoint of a power,
because ``(T^#)^m`` and ``(T^m)^#`` differ once ``P != I``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IndexRangeError, SpectrumNegativeError
from .numerics import (
    Tolerance,
    Verdict,
    all_of,
    commutator,
    nonzero_zone,
    psd_sqrt,
    scaled_residual,
    singular_values,
    spectral_norm,
    zero_zone,
)
from .semihilbert import BoundOperator, a_adjoint

DEFAULT_MAX_INDEX = 8


@dataclass(frozen=True)
class ClassIndex:
    n: int
    m: int
    limit: int = DEFAULT_MAX_INDEX

    def __post_init__(self):
        for name in ("n", "m"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise IndexRangeError(f"index {name} must be an integer, got {v!r}")
            if not 1 <= v <= self.limit:
                raise IndexRangeError(f"index {name}={v} outside [1, {self.limit}]")

    def __str__(self):
        return f"({self.n},{self.m})"


@dataclass(frozen=True)
class ClassVerdict:
    predicate_name: str
    index: ClassIndex | None
    residual: float
    verdict: Verdict
    tolerances: Tolerance

    @property
    def passed(self) -> bool:
        return self.verdict is Verdict.PASS

    @property
    def label(self) -> str:
        return self.predicate_name if self.index is None else f"{self.predicate_name}{self.index}"

    def to_dict(self) -> dict:
        return {
            "predicate": self.predicate_name,
            "index": None if self.index is None else [int(self.index.n), int(self.index.m)],
            "residual": float(self.residual),
            "verdict": self.verdict.value,
            "tolerances": self.tolerances.to_dict(),
        }


def vanishes(name: str, X: np.ndarray, scale: float, tol: Tolerance,
             index: ClassIndex | None = None) -> ClassVerdict:
    """Verdict for ``X = 0`` judged on ``||X|| / scale``."""
    r = scaled_residual(X, scale)
    return ClassVerdict(name, index, r, zero_zone(r, tol), tol)


def rank_at_least(name: str, M: np.ndarray, r: int, tol: Tolerance) -> ClassVerdict:
    """Verdict for ``rank(M) >= r`` from the ratio ``s_r / s_max``.

    The reported residual is that ratio; a clearly nonzero ratio passes.
    """
    if r <= 0:
        return ClassVerdict(name, None, 1.0, Verdict.PASS, tol)
    s = singular_values(M)
    if r > s.size or s[0] == 0.0:
        return ClassVerdict(name, None, 0.0, Verdict.FAIL, tol)
    ratio = float(s[r - 1] / s[0])
    return ClassVerdict(name, None, ratio, nonzero_zone(ratio, tol), tol)


def injective(name: str, M: np.ndarray, tol: Tolerance) -> ClassVerdict:
    return rank_at_least(name, M, M.shape[1], tol)


def _check_index(idx: ClassIndex) -> ClassIndex:
    if not isinstance(idx, ClassIndex):
        raise IndexRangeError(f"expected a ClassIndex, got {idx!r}")
    return idx


def nm_normal_residual(op: BoundOperator, idx: ClassIndex) -> ClassVerdict:
    """``[T^n, (T^#)^m] = 0`` scaled by ``||T||^n ||T^#||^m``."""
    idx = _check_index(idx)
    C = commutator(op.power(idx.n), op.sharp_power(idx.m))
    scale = op.norm ** idx.n * op.sharp_scale ** idx.m
    return vanishes("nm_normal", C, scale, op.ctx.tol, idx)


def nm_quasinormal_residual(op: BoundOperator, idx: ClassIndex) -> ClassVerdict:
    """``[T^n, (T^#)^m T] = 0`` scaled by ``||T||^(n+1) ||T^#||^m``."""
    idx = _check_index(idx)
    C = commutator(op.power(idx.n), op.sharp_power(idx.m) @ op.T)
    scale = op.norm ** (idx.n + 1) * op.sharp_scale ** idx.m
    return vanishes("nm_quasinormal", C, scale, op.ctx.tol, idx)


def a_normal(op: BoundOperator) -> ClassVerdict:
    return vanishes("a_normal", commutator(op.T_sharp, op.T), op.norm * op.sharp_scale, op.ctx.tol)


def a_selfadjoint(op: BoundOperator) -> ClassVerdict:
    ctx = op.ctx
    X = ctx.A @ op.T - op.T.conj().T @ ctx.A
    return vanishes("a_selfadjoint", X, ctx.norm * op.norm, ctx.tol)


def a_isometry(op: BoundOperator) -> ClassVerdict:
    X = op.T_sharp @ op.T - op.ctx.P
    return vanishes("a_isometry", X, max(op.norm * op.sharp_scale, 1.0), op.ctx.tol)


def a_unitary(op: BoundOperator) -> ClassVerdict:
    """``T`` and ``T^#`` are both A-isometries."""
    ctx = op.ctx
    first = a_isometry(op)
    # (T#)# = P T P, so T# being an A-isometry reads P T P T# = P.
    X = ctx.P @ op.T @ ctx.P @ op.T_sharp - ctx.P
    second = vanishes("a_isometry(T#)", X, max(op.norm * op.sharp_scale, 1.0), ctx.tol)
    r = max(first.residual, second.residual)
    return ClassVerdict("a_unitary", None, r, all_of([first.verdict, second.verdict]), ctx.tol)


def basic_class_predicates(op: BoundOperator) -> dict[str, ClassVerdict]:
    """Verdicts for A-normal, A-selfadjoint, A-isometry and A-unitary."""
    return {
        "a_normal": a_normal(op),
        "a_selfadjoint": a_selfadjoint(op),
        "a_isometry": a_isometry(op),
        "a_unitary": a_unitary(op),
    }


def build_xyz(op: BoundOperator, idx: ClassIndex) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``X = T^n + (T^#)^m``, ``Y = T^n - (T^#)^m``, ``Z = T^n (T^#)^m``."""
    idx = _check_index(idx)
    Tn = op.power(idx.n)
    Sm = op.sharp_power(idx.m)
    return Tn + Sm, Tn - Sm, Tn @ Sm


def _modulus_root(M: np.ndarray, op: BoundOperator, what: str) -> np.ndarray:
    try:
        return psd_sqrt(M, op.ctx.tol)
    except SpectrumNegativeError as exc:
        raise SpectrumNegativeError(
            f"{what} has no principal square root: {exc}. Positivity is guaranteed "
            "when T A = A T and N(A) reduces T; at least one of these fails here",
            eigenvalues=exc.eigenvalues,
        ) from exc


def c_operator(op: BoundOperator, m: int) -> np.ndarray:
    """Principal root of ``(T^#)^m T^m``."""
    return _modulus_root(op.sharp_power(m) @ op.power(m), op, f"(T#)^{m} T^{m}")


def b_operator(op: BoundOperator, m: int) -> np.ndarray:
    """Principal root of ``T^m (T^#)^m``."""
    return _modulus_root(op.power(m) @ op.sharp_power(m), op, f"T^{m} (T#)^{m}")


def power_operator(op: BoundOperator, k: int) -> BoundOperator:
    """``T^k`` as a new bound operator, with its own freshly computed A-adjoint.

    Membership is judged against ``||T||^k``, the size of the roundoff in
    the computed power.
    """
    return a_adjoint(op.ctx, op.power(k), scale=op.norm ** k)


def standard_normal_residual(M: np.ndarray, tol: Tolerance, name: str = "normal") -> ClassVerdict:
    """Ordinary normality ``M M^* = M^* M`` (Hilbert-space adjoint)."""
    return vanishes(name, commutator(M, M.conj().T), spectral_norm(M) ** 2, tol)
