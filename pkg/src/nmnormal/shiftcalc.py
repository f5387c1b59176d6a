"""Exact calculus for weighted unilateral shifts with diagonal metrics.

The shift acts by ``T e_k = w_k e_{k+1}`` for ``k >= 1`` and the metric by
``A e_k = a_k e_k``.  Both sequences are eventually periodic with exact
rational (weights: Gaussian-rational) entries, so every class identity can
be decided by a finite, exact comparison of coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Rational

import numpy as np

from .classes import ClassIndex
from .errors import InvalidInputError, ShiftInvariantError


@dataclass(frozen=True)
class GaussianRational:
    """``re + i*im`` with both parts exact fractions."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        if type(self.re) is not Fraction:
            object.__setattr__(self, "re", Fraction(self.re))
        if type(self.im) is not Fraction:
            object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x) -> GaussianRational:
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, bool) or not isinstance(x, Rational):
            raise InvalidInputError(f"expected an exact rational, got {x!r}")
        return cls(Fraction(x))

    def __add__(self, other):
        other = GaussianRational.coerce(other)
        # shift sections are sparse, so zero operands are the common case
        if not other:
            return self
        if not self:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        other = GaussianRational.coerce(other)
        if not self or not other:
            return ZERO
        return GaussianRational(self.re * other.re - self.im * other.im,
                                self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs_squared(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i)"


ZERO = GaussianRational(0)
ONE = GaussianRational(1)


@dataclass(frozen=True)
class EventuallyPeriodicSequence:
    """Sequence indexed from 1: ``preperiod`` then ``period`` repeated forever."""

    preperiod: tuple
    period: tuple

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(self.preperiod))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise InvalidInputError("period must contain at least one value")

    def __getitem__(self, k: int):
        if k < 1:
            raise IndexError(f"sequence index {k} < 1")
        if k <= len(self.preperiod):
            return self.preperiod[k - 1]
        return self.period[(k - len(self.preperiod) - 1) % len(self.period)]

    def head(self, count: int) -> list:
        return [self[k] for k in range(1, count + 1)]

    @classmethod
    def constant(cls, value) -> EventuallyPeriodicSequence:
        return cls((), (value,))


def weight_sequence(preperiod=(), period=(1,)) -> EventuallyPeriodicSequence:
    return EventuallyPeriodicSequence(
        tuple(GaussianRational.coerce(x) for x in preperiod),
        tuple(GaussianRational.coerce(x) for x in period),
    )


def metric_sequence(preperiod=(), period=(1,)) -> EventuallyPeriodicSequence:
    def rational(x):
        if isinstance(x, bool) or not isinstance(x, Rational):
            raise InvalidInputError(f"metric entries must be exact rationals, got {x!r}")
        x = Fraction(x)
        if x < 0:
            raise ShiftInvariantError(f"metric entries must be nonnegative, got {x}")
        return x

    return EventuallyPeriodicSequence(tuple(map(rational, preperiod)), tuple(map(rational, period)))


def _lcm(*values: int) -> int:
    return reduce(math.lcm, values, 1)


@dataclass(frozen=True)
class WeightedShiftInstance:
    weights: EventuallyPeriodicSequence
    metric_diag: EventuallyPeriodicSequence

    def __post_init__(self):
        bad = self.membership_violation()
        if bad is not None:
            raise ShiftInvariantError(
                f"shift does not map N(A) into N(A): a_{bad} = 0 and w_{bad} != 0 "
                f"but a_{bad + 1} = {self.metric_diag[bad + 1]}"
            )

    @property
    def preperiod(self) -> int:
        return max(len(self.weights.preperiod), len(self.metric_diag.preperiod))

    @property
    def period(self) -> int:
        return _lcm(len(self.weights.period), len(self.metric_diag.period))

    def membership_violation(self) -> int | None:
        """First ``k`` with ``a_k = 0``, ``w_k != 0`` and ``a_{k+1} != 0``."""
        for k in range(1, self.preperiod + self.period + 2):
            if self.metric_diag[k] == 0 and self.weights[k] and self.metric_diag[k + 1] != 0:
                return k
        return None

    def a_bound_squared(self) -> Fraction:
        """``sup |w_k|^2 a_{k+1} / a_k`` over ``a_k != 0``: the squared A-seminorm bound."""
        values = [
            self.weights[k].abs_squared() * self.metric_diag[k + 1] / self.metric_diag[k]
            for k in range(1, self.preperiod + self.period + 1)
            if self.metric_diag[k] != 0
        ]
        return max(values, default=Fraction(0))


def unilateral_shift() -> WeightedShiftInstance:
    """Unit weights with the identity metric."""
    return WeightedShiftInstance(weight_sequence((), (1,)), metric_sequence((), (1,)))


def shift_a_adjoint(S: WeightedShiftInstance) -> EventuallyPeriodicSequence:
    """Backward weights ``v`` with ``T^# e_k = v_k e_{k-1}``.

    ``v_1 = 0``; for ``k >= 2``, ``v_k = (a_k / a_{k-1}) conj(w_{k-1})`` when
    ``a_{k-1} != 0`` and ``0`` otherwise.
    """
    a, w = S.metric_diag, S.weights

    def v(k: int) -> GaussianRational:
        if k == 1 or a[k - 1] == 0:
            return ZERO
        return w[k - 1].conjugate() * (a[k] / a[k - 1])

    start = S.preperiod + 1
    return EventuallyPeriodicSequence(
        tuple(v(k) for k in range(1, start + 1)),
        tuple(v(k) for k in range(start + 1, start + S.period + 1)),
    )


def _forward(w, i: int, n: int) -> GaussianRational:
    """Coefficient of ``T^n e_i`` on ``e_{i+n}``; zero when ``i < 1``."""
    if i < 1:
        return ZERO
    out = ONE
    for j in range(n):
        out = out * w[i + j]
    return out


def _backward(v, k: int, m: int) -> GaussianRational:
    """Coefficient of ``(T^#)^m e_k`` on ``e_{k-m}``; zero when ``k - m < 1``."""
    if k - m < 1:
        return ZERO
    out = ONE
    for j in range(m):
        out = out * v[k - j]
    return out


def commutator_coefficients(S: WeightedShiftInstance, idx: ClassIndex, which: str,
                            k: int, v=None) -> tuple[GaussianRational, GaussianRational]:
    """Both sides of the class identity applied to ``e_k``.

    Each side is a multiple of a single basis vector (``e_{k+n-m}`` for
    ``normal``, ``e_{k+1+n-m}`` for ``quasinormal``); the pair returned is
    ``(coefficient of T^n X e_k, coefficient of X T^n e_k)`` with
    ``X = (T^#)^m`` or ``(T^#)^m T``.
    """
    w = S.weights
    v = shift_a_adjoint(S) if v is None else v
    n, m = idx.n, idx.m
    if which == "normal":
        lhs = _backward(v, k, m) * _forward(w, k - m, n)
        rhs = _forward(w, k, n) * _backward(v, k + n, m)
    elif which == "quasinormal":
        lhs = w[k] * _backward(v, k + 1, m) * _forward(w, k + 1 - m, n)
        rhs = _forward(w, k, n + 1) * _backward(v, k + n + 1, m)
    else:
        raise InvalidInputError(f"which must be 'normal' or 'quasinormal', got {which!r}")
    return lhs, rhs


@dataclass(frozen=True)
class ShiftVerdict:
    which: str
    index: ClassIndex
    passed: bool
    witness_k: int | None
    window: int
    lhs: GaussianRational | None = None
    rhs: GaussianRational | None = None

    def to_dict(self) -> dict:
        return {
            "predicate": f"nm_{self.which}",
            "index": [self.index.n, self.index.m],
            "verdict": "pass" if self.passed else "fail",
            "exact": True,
            "window": self.window,
            "witness_k": self.witness_k,
            "lhs": None if self.lhs is None else str(self.lhs),
            "rhs": None if self.rhs is None else str(self.rhs),
        }


def check_window(S: WeightedShiftInstance, idx: ClassIndex) -> int:
    """Number of basis vectors that decides a class identity exactly.

    Beyond ``preperiod + 1 + m`` every factor of both coefficients lies in
    the periodic regime, so coefficients repeat with period ``lcm``; the
    window adds ``(n + m + 2)`` full periods on top of the preperiod.
    """
    return S.preperiod + 1 + (idx.n + idx.m + 2) * S.period


def shift_class_check(S: WeightedShiftInstance, idx: ClassIndex, which: str) -> ShiftVerdict:
    """Exact (n,m)-A-normal / quasinormal verdict with the first violating ``k``."""
    v = shift_a_adjoint(S)
    window = check_window(S, idx)
    for k in range(1, window + 1):
        lhs, rhs = commutator_coefficients(S, idx, which, k, v)
        if lhs != rhs:
            return ShiftVerdict(which, idx, False, k, window, lhs, rhs)
    return ShiftVerdict(which, idx, True, None, window)


def finite_section_exact(S: WeightedShiftInstance, size: int) -> tuple[np.ndarray, np.ndarray]:
    """``(A_N, T_N)`` as object arrays of exact Gaussian rationals."""
    A = np.full((size, size), ZERO, dtype=object)
    T = np.full((size, size), ZERO, dtype=object)
    for k in range(1, size + 1):
        A[k - 1, k - 1] = GaussianRational(S.metric_diag[k])
        if k < size:
            T[k, k - 1] = S.weights[k]
    return A, T


def finite_section(S: WeightedShiftInstance, size: int) -> tuple[np.ndarray, np.ndarray]:
    """``(A_N, T_N)`` as complex128 arrays."""
    A, T = finite_section_exact(S, size)
    to_complex = np.vectorize(complex, otypes=[np.complex128])
    return to_complex(A), to_complex(T)


def _exact_adjoint_section(A: np.ndarray, T: np.ndarray) -> np.ndarray:
    size = A.shape[0]
    A_dag = np.full((size, size), ZERO, dtype=object)
    for i in range(size):
        a = A[i, i].re
        if a:
            A_dag[i, i] = GaussianRational(1 / a)
    T_star = np.vectorize(GaussianRational.conjugate, otypes=[object])(T.T)
    return A_dag @ T_star @ A


def interior_columns(size: int, idx: ClassIndex) -> range:
    """1-based columns whose images are not affected by truncation to ``size``."""
    return range(1, max(size - idx.n - 1, 0) + 1)


def section_violations(S: WeightedShiftInstance, idx: ClassIndex, which: str, size: int,
                       interior_only: bool = True) -> list[int]:
    """Columns (1-based) where the exact truncated commutator is nonzero."""
    A, T = finite_section_exact(S, size)
    Ts = _exact_adjoint_section(A, T)
    Tn = _object_power(T, idx.n)
    X = _object_power(Ts, idx.m)
    if which == "quasinormal":
        X = X @ T
    elif which != "normal":
        raise InvalidInputError(f"which must be 'normal' or 'quasinormal', got {which!r}")
    C = Tn @ X - X @ Tn
    cols = interior_columns(size, idx) if interior_only else range(1, size + 1)
    return [k for k in cols if any(bool(C[i, k - 1]) for i in range(size))]


def _object_power(M: np.ndarray, k: int) -> np.ndarray:
    out = np.full(M.shape, ZERO, dtype=object)
    for i in range(M.shape[0]):
        out[i, i] = ONE
    for _ in range(k):
        out = out @ M
    return out


# JSON: a real rational is [num, den]; a complex one {"re": [n, d], "im": [n, d]}.

def _rational_from_json(x, where: str) -> Fraction:
    if isinstance(x, bool):
        raise InvalidInputError(f"{where}: booleans are not numbers")
    if isinstance(x, int):
        return Fraction(x)
    if (isinstance(x, list) and len(x) == 2 and all(isinstance(t, int) and not isinstance(t, bool)
                                                   for t in x)):
        if x[1] == 0:
            raise InvalidInputError(f"{where}: zero denominator")
        return Fraction(x[0], x[1])
    raise InvalidInputError(f"{where}: expected [num, den] with integer parts, got {x!r}")


def _rational_to_json(x: Fraction) -> list:
    return [x.numerator, x.denominator]


def value_from_json(x, where: str = "value") -> GaussianRational:
    if isinstance(x, dict):
        if set(x) - {"re", "im"} or "re" not in x:
            raise InvalidInputError(f"{where}: complex values need keys 're' and optional 'im'")
        return GaussianRational(_rational_from_json(x["re"], where),
                                _rational_from_json(x.get("im", 0), where))
    return GaussianRational(_rational_from_json(x, where))


def value_to_json(x) -> list | dict:
    x = GaussianRational.coerce(x)
    if not x.im:
        return _rational_to_json(x.re)
    return {"re": _rational_to_json(x.re), "im": _rational_to_json(x.im)}


def sequence_from_json(obj, *, metric: bool = False) -> EventuallyPeriodicSequence:
    if not isinstance(obj, dict) or "period" not in obj:
        raise InvalidInputError("sequence must be an object with 'preperiod' and 'period'")
    pre = obj.get("preperiod", [])
    per = obj["period"]
    if not isinstance(pre, list) or not isinstance(per, list):
        raise InvalidInputError("'preperiod' and 'period' must be lists")
    pre = [value_from_json(x, f"preperiod[{i}]") for i, x in enumerate(pre)]
    per = [value_from_json(x, f"period[{i}]") for i, x in enumerate(per)]
    if not metric:
        return weight_sequence(pre, per)
    for i, x in enumerate(pre + per):
        if x.im:
            raise InvalidInputError(f"metric entry {i} is not real: {x}")
    return metric_sequence([x.re for x in pre], [x.re for x in per])


def sequence_to_json(seq: EventuallyPeriodicSequence) -> dict:
    return {
        "preperiod": [value_to_json(x) for x in seq.preperiod],
        "period": [value_to_json(x) for x in seq.period],
    }


def shift_from_json(obj) -> WeightedShiftInstance:
    if not isinstance(obj, dict) or "weights" not in obj or "metric" not in obj:
        raise InvalidInputError("shift file must be an object with 'weights' and 'metric'")
    return WeightedShiftInstance(
        sequence_from_json(obj["weights"]), sequence_from_json(obj["metric"], metric=True)
    )


def shift_to_json(S: WeightedShiftInstance) -> dict:
    return {"weights": sequence_to_json(S.weights), "metric": sequence_to_json(S.metric_diag)}
