"""Semi-Hilbertian structure induced by a positive semidefinite metric ``A``.

The semi-inner product is ``<h|k>_A = <Ah, k>``, linear in the first slot
and conjugate-linear in the second, so for column vectors it equals
``k^* A h``.  The A-adjoint of ``T`` is the reduced solution of
``AX = T^* A``, namely ``A^+ T^* A`` (``A^+`` the Moore-Penrose inverse).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvariantError,
    MetricViolationError,
    NegativeEigenvalueError,
    NotHermitianError,
    NotInBAError,
    NotInBUpperAError,
)
from .numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    Verdict,
    adjoint,
    as_square,
    matrix_power,
    orthogonal_projector_onto_range,
    pseudo_inverse,
    psd_sqrt,
    scaled_residual,
    spectral_norm,
    zero_zone,
)

# Relative floor for the scale attached to T^# (see BoundOperator.sharp_scale).
SHARP_FLOOR = 1e-4

FINITE_DIM_NOTE = (
    "in finite dimensions R(A) is closed, so both memberships reduce to "
    "T(N(A)) ⊆ N(A); the two verdicts are still computed separately"
)


@dataclass(frozen=True, eq=False)
class MetricContext:
    """A positive semidefinite metric with its cached derived matrices."""

    A: np.ndarray
    A_dagger: np.ndarray
    A_half: np.ndarray
    A_half_dagger: np.ndarray
    P: np.ndarray
    tol: Tolerance
    rank: int

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    @property
    def norm(self) -> float:
        return spectral_norm(self.A)

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=np.complex128)

    @property
    def P_perp(self) -> np.ndarray:
        return self.identity - self.P

    @property
    def invertible(self) -> bool:
        return self.rank == self.dim


def make_context(A, tol: Tolerance = DEFAULT_TOLERANCE) -> MetricContext:
    """Validate ``A`` as Hermitian PSD and cache ``A^+``, ``A^{1/2}`` and ``P``.

    Raises
    ------
    NotHermitianError
        ``||A - A^*|| > residual_tol * ||A||``.
    NegativeEigenvalueError
        Smallest eigenvalue below ``-residual_tol * ||A||``.
    """
    A = as_square(A, "metric A")
    norm = spectral_norm(A)
    slack = tol.residual_tol * norm
    asym = spectral_norm(A - adjoint(A))
    if asym > slack:
        raise NotHermitianError(f"metric A is not Hermitian: ||A - A*|| = {asym:.6g}")
    A = 0.5 * (A + adjoint(A))
    w = np.linalg.eigvalsh(A)
    if w.size and w[0] < -slack:
        raise NegativeEigenvalueError(
            f"metric A is not positive semidefinite: smallest eigenvalue {w[0]:.6g}"
        )

    A_dagger = pseudo_inverse(A, tol)
    A_dagger = 0.5 * (A_dagger + adjoint(A_dagger))
    A_half = psd_sqrt(A, tol)
    A_half_dagger = pseudo_inverse(A_half, tol)
    P = orthogonal_projector_onto_range(A, tol)
    rank = int(round(np.real(np.trace(P))))

    if scaled_residual(A @ A_dagger - P, 1.0) > tol.residual_tol * max(1.0, A.shape[0]):
        raise InvariantError("cached projector disagrees with A A^+")
    return MetricContext(A, A_dagger, A_half, A_half_dagger, P, tol, rank)


def _vector(h, dim: int, name: str) -> np.ndarray:
    v = np.asarray(h, dtype=np.complex128).reshape(-1)
    if v.shape[0] != dim:
        raise DimensionMismatchError(f"{name} has length {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return v


def semi_inner_product(ctx: MetricContext, h, k) -> complex:
    """``<h|k>_A = <Ah, k> = k^* A h``."""
    h = _vector(h, ctx.dim, "h")
    k = _vector(k, ctx.dim, "k")
    return complex(np.vdot(k, ctx.A @ h))


def vector_seminorm(ctx: MetricContext, h) -> float:
    h = _vector(h, ctx.dim, "h")
    value = np.real(np.vdot(h, ctx.A @ h))
    if value < -ctx.tol.residual_tol * ctx.norm * float(np.vdot(h, h).real):
        raise MetricViolationError(f"negative A-seminorm radicand {value:.6g}")
    return float(np.sqrt(max(value, 0.0)))


@dataclass(frozen=True)
class MembershipVerdict:
    in_B_upper_A: Verdict
    in_B_A: Verdict
    bound_constant: float | None
    residuals: dict
    note: str = FINITE_DIM_NOTE

    def to_dict(self) -> dict:
        return {
            "in_B_upper_A": self.in_B_upper_A.value,
            "in_B_A": self.in_B_A.value,
            "bound_constant": self.bound_constant,
            "residuals": dict(self.residuals),
            "note": self.note,
        }


def _operator(ctx: MetricContext, T) -> np.ndarray:
    T = as_square(T, "operator T")
    if T.shape != ctx.A.shape:
        raise DimensionMismatchError(f"operator shape {T.shape} does not match metric {ctx.A.shape}")
    return T


def _upper_residual(ctx: MetricContext, T: np.ndarray, scale: float | None = None) -> float:
    nT = spectral_norm(T) if scale is None else scale
    return scaled_residual(ctx.A_half @ T @ ctx.P_perp, spectral_norm(ctx.A_half) * nT)


def _seminorm_unchecked(ctx: MetricContext, T: np.ndarray) -> float:
    return spectral_norm(ctx.A_half @ T @ ctx.A_half_dagger)


def membership(ctx: MetricContext, T, scale: float | None = None) -> MembershipVerdict:
    """Three-state membership of ``T`` in ``B^A(H)`` and ``B_A(H)``.

    ``B_A`` is tested as ``(I - P) T^* A = 0`` (range of ``T^*A`` inside
    the range of ``A``) and ``B^A`` as ``A^{1/2} T (I - P) = 0``.
    ``scale`` replaces ``||T||`` in the residual denominators; pass it when
    ``T`` is a computed product whose roundoff is set by its factors.
    """
    T = _operator(ctx, T)
    nT = spectral_norm(T) if scale is None else scale
    r_lower = scaled_residual(ctx.P_perp @ adjoint(T) @ ctx.A, nT * ctx.norm)
    r_upper = _upper_residual(ctx, T, nT)
    upper = zero_zone(r_upper, ctx.tol)
    bound = _seminorm_unchecked(ctx, T) if upper is Verdict.PASS else None
    return MembershipVerdict(
        in_B_upper_A=upper,
        in_B_A=zero_zone(r_lower, ctx.tol),
        bound_constant=bound,
        residuals={"in_B_A": r_lower, "in_B_upper_A": r_upper},
    )


def operator_seminorm(ctx: MetricContext, T) -> float:
    """``||T||_A = sup ||Th||_A / ||h||_A`` over ``h`` outside ``N(A)``.

    Computed as the spectral norm of ``A^{1/2} T (A^{1/2})^+``, which is
    exact once ``T`` maps ``N(A)`` into itself.
    """
    T = _operator(ctx, T)
    r = _upper_residual(ctx, T)
    if zero_zone(r, ctx.tol) is Verdict.FAIL:
        raise NotInBUpperAError(f"T does not map N(A) into N(A) (residual {r:.3g})")
    return _seminorm_unchecked(ctx, T)


@dataclass(frozen=True, eq=False)
class BoundOperator:
    """An operator in ``B_A(H)`` together with its A-adjoint.

    Build instances with :func:`a_adjoint`.  Powers of ``T`` and of
    ``T_sharp`` are memoised; the cache is private and does not change any
    observable value.
    """

    T: np.ndarray
    ctx: MetricContext
    T_sharp: np.ndarray
    invariant_residuals: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.T.shape[0]

    def power(self, k: int) -> np.ndarray:
        key = ("T", k)
        if key not in self._cache:
            self._cache[key] = matrix_power(self.T, k)
        return self._cache[key]

    def sharp_power(self, k: int) -> np.ndarray:
        """``(T^#)^k``; a power of the adjoint, not the adjoint of a power."""
        key = ("S", k)
        if key not in self._cache:
            self._cache[key] = matrix_power(self.T_sharp, k)
        return self._cache[key]

    @property
    def norm(self) -> float:
        if "norm" not in self._cache:
            self._cache["norm"] = spectral_norm(self.T)
        return self._cache["norm"]

    @property
    def sharp_norm(self) -> float:
        if "sharp_norm" not in self._cache:
            self._cache["sharp_norm"] = spectral_norm(self.T_sharp)
        return self._cache["sharp_norm"]

    @property
    def sharp_scale(self) -> float:
        """``||T^#||`` floored at ``SHARP_FLOOR * ||A^+|| ||A|| ||T||``.

        The computed ``T^#`` carries an absolute error proportional to that
        bound, so residuals scaled by a numerically vanishing ``||T^#||``
        would amplify roundoff.
        """
        if "sharp_scale" not in self._cache:
            bound = spectral_norm(self.ctx.A_dagger) * self.ctx.norm * self.norm
            self._cache["sharp_scale"] = max(self.sharp_norm, SHARP_FLOOR * bound)
        return self._cache["sharp_scale"]


def a_adjoint(ctx: MetricContext, T, scale: float | None = None) -> BoundOperator:
    """Wrap ``T`` with its A-adjoint ``A^+ T^* A`` after checking membership.

    ``scale`` is forwarded to :func:`membership` and the invariant checks.

    Raises
    ------
    NotInBAError
        Unless the ``B_A`` membership test passes outright.
    InvariantError
        If ``A T^# = T^* A`` or ``(I - P) T^# = 0`` lands in the fail zone.
    """
    T = _operator(ctx, T)
    verdict = membership(ctx, T, scale)
    if verdict.in_B_A is not Verdict.PASS:
        raise NotInBAError(
            f"T has no A-adjoint: membership in B_A is {verdict.in_B_A.value} "
            f"(residual {verdict.residuals['in_B_A']:.3g}); "
            "T must map N(A) into N(A)"
        )
    Ts = ctx.A_dagger @ adjoint(T) @ ctx.A
    nT = spectral_norm(T) if scale is None else max(scale, spectral_norm(T))
    # ||T#|| <= ||A^+|| ||T|| ||A||; scaling by the bound keeps a vanishing T# well defined
    sharp_bound = spectral_norm(ctx.A_dagger) * ctx.norm * nT
    residuals = {
        "A T# = T* A": scaled_residual(ctx.A @ Ts - adjoint(T) @ ctx.A, ctx.norm * nT),
        "(I-P) T# = 0": scaled_residual(ctx.P_perp @ Ts, sharp_bound),
    }
    for name, r in residuals.items():
        if zero_zone(r, ctx.tol) is Verdict.FAIL:
            raise InvariantError(f"A-adjoint invariant '{name}' violated (residual {r:.3g})")
    return BoundOperator(T=T, ctx=ctx, T_sharp=Ts, invariant_residuals=residuals)


def double_sharp(ctx: MetricContext, op: BoundOperator) -> np.ndarray:
    """``(T^#)^#``, cross-checked against ``P T P``."""
    result = a_adjoint(ctx, op.T_sharp).T_sharp
    expected = ctx.P @ op.T @ ctx.P
    r = scaled_residual(result - expected, max(op.norm, op.sharp_norm))
    if zero_zone(r, ctx.tol) is Verdict.FAIL:
        raise InvariantError(f"(T#)# differs from P T P (residual {r:.3g})")
    return result


def re_im_parts(op: BoundOperator) -> tuple[np.ndarray, np.ndarray]:
    """A-real and A-imaginary parts: ``(T + T^#)/2`` and ``(T - T^#)/(2i)``."""
    re = 0.5 * (op.T + op.T_sharp)
    im = -0.5j * (op.T - op.T_sharp)
    return re, im
