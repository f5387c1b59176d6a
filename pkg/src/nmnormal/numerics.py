"""Dense complex matrix kernel and the tolerance policy.

All matrices are ``numpy.ndarray`` with dtype ``complex128``.  Functions
here never mutate their arguments.

Zero tests follow a three-zone rule.  A quantity that should vanish
*passes* when its scaled size is at most ``residual_tol``, *fails* when it
is at least ``distinctness_margin``, and is *indeterminate* in between.
"""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatchError, InvalidInputError, SpectrumNegativeError

# Guards residual scaling against a zero denominator.
SCALE_EPS = 1e-300


@dataclass(frozen=True)
class Tolerance:
    """Numerical thresholds shared by every predicate.

    Attributes
    ----------
    rank_cutoff : float
        Singular values ``s_i <= rank_cutoff * s_max`` count as zero.
    residual_tol : float
        Scaled residuals at or below this value pass.
    distinctness_margin : float
        Scaled residuals at or above this value fail.
    """

    rank_cutoff: float = 1e-10
    residual_tol: float = 1e-9
    distinctness_margin: float = 1e-6

    def __post_init__(self):
        for name in ("rank_cutoff", "residual_tol", "distinctness_margin"):
            value = getattr(self, name)
            if not np.isfinite(value):
                raise InvalidInputError(f"{name} must be finite, got {value!r}")
        if not 0.0 < self.rank_cutoff < 1.0:
            raise InvalidInputError(f"rank_cutoff must lie in (0, 1), got {self.rank_cutoff}")
        if not 0.0 < self.residual_tol < self.distinctness_margin:
            raise InvalidInputError(
                "need 0 < residual_tol < distinctness_margin, got "
                f"{self.residual_tol} and {self.distinctness_margin}"
            )

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_TOLERANCE = Tolerance()


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"

    def __str__(self):
        return self.value


def zero_zone(residual: float, tol: Tolerance) -> Verdict:
    """Classify a scaled residual of a quantity expected to vanish."""
    if not np.isfinite(residual):
        return Verdict.FAIL
    if residual <= tol.residual_tol:
        return Verdict.PASS
    if residual >= tol.distinctness_margin:
        return Verdict.FAIL
    return Verdict.INDETERMINATE


def nonzero_zone(ratio: float, tol: Tolerance) -> Verdict:
    """Classify a scaled quantity expected to be bounded away from zero.

    This is the mirror image of :func:`zero_zone`, used for rank and
    injectivity premises: a ratio that is clearly nonzero passes.
    """
    if ratio >= tol.distinctness_margin:
        return Verdict.PASS
    if ratio <= tol.residual_tol:
        return Verdict.FAIL
    return Verdict.INDETERMINATE


def all_of(verdicts) -> Verdict:
    """Conjunction under the three-zone logic (FAIL dominates)."""
    verdicts = list(verdicts)
    if any(v is Verdict.FAIL for v in verdicts):
        return Verdict.FAIL
    if any(v is Verdict.INDETERMINATE for v in verdicts):
        return Verdict.INDETERMINATE
    return Verdict.PASS


def iff(left: Verdict, right: Verdict) -> Verdict:
    """Agreement of two verdicts; indeterminate if either side is."""
    if Verdict.INDETERMINATE in (left, right):
        return Verdict.INDETERMINATE
    return Verdict.PASS if left is right else Verdict.FAIL


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    """Return ``M`` as a finite 2-D complex128 array or raise."""
    try:
        arr = np.array(M, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a complex matrix ({exc})") from exc
    if arr.ndim != 2:
        raise InvalidInputError(f"{name}: expected a 2-D array, got ndim={arr.ndim}")
    if arr.size == 0:
        raise InvalidInputError(f"{name}: empty matrix")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: entries must be finite (found NaN or Inf)")
    return arr


def as_square(M, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionMismatchError(f"{name}: expected a square matrix, got shape {arr.shape}")
    return arr


def adjoint(M: np.ndarray) -> np.ndarray:
    return M.conj().T


def spectral_norm(M: np.ndarray) -> float:
    """Largest singular value (0 for the zero matrix)."""
    return float(np.linalg.norm(M, 2))


def singular_values(M: np.ndarray) -> np.ndarray:
    return np.linalg.svd(M, compute_uv=False)


def numerical_rank(M, tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    s = singular_values(as_matrix(M))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.rank_cutoff * s[0]))


def scaled_residual(X: np.ndarray, scale: float) -> float:
    """``||X|| / (scale + eps)`` in the spectral norm."""
    return spectral_norm(X) / (scale + SCALE_EPS)


def matrix_power(M: np.ndarray, k: int) -> np.ndarray:
    """``M**k`` by binary powering; ``k = 0`` gives the identity."""
    if k < 0:
        raise InvalidInputError(f"negative matrix power {k}")
    return np.linalg.matrix_power(M, k)


def pseudo_inverse(M, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Moore-Penrose inverse with an explicit relative rank cutoff.

    Singular values ``s_i > rank_cutoff * s_max`` are inverted; the rest
    are treated as exact zeros.

    Raises
    ------
    InvalidInputError
        If ``M`` is not a finite 2-D array.
    """
    M = as_matrix(M)
    U, s, Vh = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[1], M.shape[0]), dtype=np.complex128)
    keep = s > tol.rank_cutoff * s[0]
    return (Vh[keep].conj().T / s[keep]) @ U[:, keep].conj().T


def penrose_residuals(M: np.ndarray, Mp: np.ndarray) -> dict[str, float]:
    """Relative residuals of the four Penrose identities.

    Each residual is scaled so that a correct pseudoinverse gives values
    near machine precision regardless of the magnitude of ``M``.
    """
    nM = spectral_norm(M)
    nP = spectral_norm(Mp)
    MMp = M @ Mp
    MpM = Mp @ M
    return {
        "M Mp M = M": scaled_residual(MMp @ M - M, nM),
        "Mp M Mp = Mp": scaled_residual(MpM @ Mp - Mp, nP),
        "(M Mp)* = M Mp": scaled_residual(adjoint(MMp) - MMp, nM * nP),
        "(Mp M)* = Mp M": scaled_residual(adjoint(MpM) - MpM, nM * nP),
    }


def orthogonal_projector_onto_range(M, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Hermitian idempotent projector onto the numerical column space of ``M``."""
    M = as_matrix(M)
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((M.shape[0], M.shape[0]), dtype=np.complex128)
    Ur = U[:, s > tol.rank_cutoff * s[0]]
    P = Ur @ Ur.conj().T
    return 0.5 * (P + P.conj().T)


def psd_sqrt(M, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Principal square root of a matrix with spectrum in ``[0, inf)``.

    Nearly Hermitian input is symmetrised and handled by ``eigh``;
    eigenvalues at or below ``rank_cutoff * lambda_max`` are set to zero so
    the numerical null space maps to an exact null space.  Other input goes
    through the Schur method of :func:`scipy.linalg.sqrtm` followed by a
    square-back check.

    Raises
    ------
    SpectrumNegativeError
        If an eigenvalue has real part below ``-residual_tol * ||M||``, a
        significant imaginary part, or no principal root exists.
    """
    M = as_square(M)
    norm = spectral_norm(M)
    if norm == 0.0:
        return np.zeros_like(M)
    slack = tol.residual_tol * norm

    if spectral_norm(M - M.conj().T) <= slack:
        H = 0.5 * (M + M.conj().T)
        w, V = np.linalg.eigh(H)
        if w[0] < -slack:
            raise SpectrumNegativeError(
                f"matrix is not positive semidefinite: smallest eigenvalue {w[0]:.6g} "
                f"is below -{slack:.3g}",
                eigenvalues=w,
            )
        w = np.where(w > tol.rank_cutoff * max(w[-1], 0.0), w, 0.0)
        R = (V * np.sqrt(w)) @ V.conj().T
        return 0.5 * (R + R.conj().T)

    w = scipy.linalg.eigvals(M)
    bad = (w.real < -slack) | (np.abs(w.imag) > slack)
    if np.any(bad):
        raise SpectrumNegativeError(
            "spectrum leaves the closed right half-line: offending eigenvalues "
            + ", ".join(f"{z:.6g}" for z in w[bad]),
            eigenvalues=w,
        )
    R = scipy.linalg.sqrtm(M)
    if not np.all(np.isfinite(R)) or scaled_residual(R @ R - M, norm) > tol.residual_tol:
        raise SpectrumNegativeError(
            "no principal square root found (matrix may be defective at 0)", eigenvalues=w
        )
    return np.asarray(R, dtype=np.complex128)


def commutator(M1, M2) -> np.ndarray:
    """``M1 @ M2 - M2 @ M1`` for square matrices of equal size."""
    M1 = as_square(M1, "first operand")
    M2 = as_square(M2, "second operand")
    if M1.shape != M2.shape:
        raise DimensionMismatchError(f"commutator of shapes {M1.shape} and {M2.shape}")
    return M1 @ M2 - M2 @ M1
