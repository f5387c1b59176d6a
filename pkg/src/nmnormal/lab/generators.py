"""Seeded instance generators.

Every dense family is built in a *frame*: an orthonormal basis in which
``A = diag(a_1, ..., a_r, 0, ..., 0)`` with the positive eigenvalues first.
In that basis ``R(A)`` is spanned by the first ``r`` coordinates, so the
structural conditions (``T`` maps ``N(A)`` into itself, ``PT = TP``,
``AT = TA``) become block-sparsity patterns.  The finished matrices are
rotated to a random orthonormal basis before they are returned.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import scipy.linalg

from ..errors import InfeasibleSpecError
from ..numerics import DEFAULT_TOLERANCE, Tolerance, orthogonal_projector_onto_range
from ..semihilbert import BoundOperator, MetricContext, a_adjoint, make_context
from .. import shiftcalc

FAMILIES = (
    "general_in_BA",
    "a_normal",
    "scalar_power",
    "commuting_with_A",
    "isometry_V",
    "paper_example",
    "shift",
    "partial_isometry",
    "commuting_pair",
)

INNER_KINDS = {
    "commuting_with_A": ("generic", "normal", "scalar_power"),
    "isometry_V": ("scalar_power", "normal"),
    "commuting_pair": ("selfadjoint", "normal", "class"),
}

# Positive metric eigenvalues are drawn log-uniformly from this interval.
EIG_RANGE = (0.5, 2.0)
MAX_DIM = 16


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one instance.

    ``power`` and ``scalar`` parametrise ``scalar_power`` (``T^power =
    scalar * I``); ``partial_isometry`` reads ``power`` as the size of its
    nilpotent block.  ``inner`` selects the block type for the families
    listed in ``INNER_KINDS``.  ``metric_rank=None`` means full rank.
    """

    family: str
    dim: int
    seed: int
    metric_rank: int | None = None
    power: int = 2
    scalar: complex = 4.0
    inner: str = "generic"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InfeasibleSpecError(f"unknown family {self.family!r}")
        if isinstance(self.dim, bool) or not 2 <= int(self.dim) <= MAX_DIM:
            raise InfeasibleSpecError(f"dim must lie in [2, {MAX_DIM}], got {self.dim}")
        if self.metric_rank is not None and not 1 <= self.metric_rank <= self.dim:
            raise InfeasibleSpecError(f"metric_rank {self.metric_rank} outside [1, {self.dim}]")
        if not 0 <= int(self.seed) < 2**64:
            raise InfeasibleSpecError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.family == "scalar_power":
            if self.power < 1:
                raise InfeasibleSpecError(f"scalar_power needs n >= 1, got {self.power}")
            if self.scalar == 0:
                raise InfeasibleSpecError("scalar_power needs c != 0")
        if self.family in INNER_KINDS and self.inner != "generic":
            if self.inner not in INNER_KINDS[self.family]:
                raise InfeasibleSpecError(f"family {self.family} has no inner kind {self.inner!r}")

    @property
    def rank(self) -> int:
        return self.dim if self.metric_rank is None else self.metric_rank

    def to_dict(self) -> dict:
        d = asdict(self)
        c = complex(self.scalar)
        d["scalar"] = [c.real, c.imag]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratorSpec":
        d = dict(d)
        if isinstance(d.get("scalar"), (list, tuple)):
            re, im = d["scalar"]
            d["scalar"] = complex(re, im)
        return cls(**d)


@dataclass(frozen=True, eq=False)
class Instance:
    spec: GeneratorSpec
    ctx: MetricContext
    op: BoundOperator
    extras: dict = field(default_factory=dict)
    shift: shiftcalc.WeightedShiftInstance | None = None


# ---------------------------------------------------------------- helpers


def _cgauss(rng, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)


def haar_unitary(rng, d: int) -> np.ndarray:
    """Haar-distributed unitary (QR of a Ginibre matrix with phase fix)."""
    if d == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    Q, R = np.linalg.qr(_cgauss(rng, d, d))
    ph = np.diag(R) / np.abs(np.diag(R))
    return Q * ph


def _positive_eigs(rng, k: int) -> np.ndarray:
    lo, hi = np.log(EIG_RANGE[0]), np.log(EIG_RANGE[1])
    return np.exp(rng.uniform(lo, hi, size=k))


def _unit_phases(rng, k: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.uniform(size=k))


def _well_conditioned(rng, d: int, lo: float = 0.5, hi: float = 1.5) -> np.ndarray:
    """Random matrix with singular values in ``[lo, hi]``."""
    return haar_unitary(rng, d) @ np.diag(rng.uniform(lo, hi, size=d)) @ haar_unitary(rng, d)


def _normal_block(rng, d: int, singular: bool = False) -> np.ndarray:
    lam = rng.uniform(0.5, 1.5, size=d) * _unit_phases(rng, d)
    if singular:
        lam[rng.integers(d)] = 0.0
    U = haar_unitary(rng, d)
    return (U * lam) @ U.conj().T


def _hermitian_block(rng, d: int) -> np.ndarray:
    U = haar_unitary(rng, d)
    lam = rng.uniform(0.5, 1.5, size=d) * rng.choice([-1.0, 1.0], size=d)
    return (U * lam) @ U.conj().T


def _divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def _scalar_power_block(rng, d: int, n: int, c: complex, mix: bool) -> np.ndarray:
    """Weighted permutation ``W`` on ``d`` coordinates with ``W^n = c I``.

    Cycle lengths divide ``n``; on a cycle of length ``l`` the weight
    product is an ``l``-th power root ``rho`` with ``rho^(n/l) = c``.  Log
    moduli are centred so every weight stays within ``e^0.4`` of
    ``|c|^(1/n)``.  With ``mix`` the block is conjugated by a mild
    similarity, which keeps ``W^n = c I``.
    """
    if d == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    divs = _divisors(n)
    perm = rng.permutation(d)
    W = np.zeros((d, d), dtype=np.complex128)
    base = abs(c) ** (1.0 / n)
    pos = 0
    while pos < d:
        ell = int(rng.choice([k for k in divs if k <= d - pos]))
        cyc = perm[pos:pos + ell]
        pos += ell
        q = n // ell
        root = np.exp(2j * np.pi * rng.integers(q) / q)
        rho = c ** (1.0 / q) * root
        delta = rng.uniform(-0.4, 0.4, size=ell)
        delta -= delta.mean()
        w = base * np.exp(delta) * _unit_phases(rng, ell)
        w[-1] *= rho / np.prod(w)
        for j in range(ell):
            W[cyc[(j + 1) % ell], cyc[j]] = w[j]
    if mix:
        E = _cgauss(rng, d, d)
        G = np.eye(d) + 0.15 * E / np.linalg.norm(E, 2)
        W = G @ W @ np.linalg.inv(G)
    return W


def _nilpotent_shift(d: int) -> np.ndarray:
    return np.eye(d, k=-1, dtype=np.complex128)


@dataclass(frozen=True)
class Frame:
    """Orthonormal basis ``Q`` diagonalising ``A`` with eigenvalues ``a``."""

    Q: np.ndarray
    a: np.ndarray
    r: int

    @property
    def dim(self) -> int:
        return self.a.size

    @property
    def root(self) -> np.ndarray:
        return np.sqrt(self.a[: self.r])

    def metric(self) -> np.ndarray:
        return (self.Q * self.a) @ self.Q.conj().T

    def world(self, M: np.ndarray) -> np.ndarray:
        return self.Q @ M @ self.Q.conj().T

    def a_conj(self, M: np.ndarray) -> np.ndarray:
        """``A_R^{-1/2} M A_R^{1/2}`` on the range block."""
        s = self.root
        return (M / s[:, None]) * s[None, :]


def _frame(rng, dim: int, rank: int, clusters: bool = False) -> Frame:
    a = np.zeros(dim)
    if clusters and rank >= 2:
        k = int(rng.integers(1, rank))
        values = _positive_eigs(rng, k)
        labels = np.concatenate([np.arange(k), rng.integers(k, size=rank - k)])
        a[:rank] = np.sort(values[labels])
    else:
        a[:rank] = _positive_eigs(rng, rank)
    return Frame(haar_unitary(rng, dim), a, rank)


def _blocks_of(frame: Frame) -> list[np.ndarray]:
    """Index groups of equal metric eigenvalue (the zero group last)."""
    groups = []
    vals = frame.a
    start = 0
    for i in range(1, frame.dim + 1):
        if i == frame.dim or vals[i] != vals[start]:
            groups.append(np.arange(start, i))
            start = i
    return groups


def _block_diag(*blocks) -> np.ndarray:
    return np.asarray(scipy.linalg.block_diag(*blocks), dtype=np.complex128)


def _finish(spec: GeneratorSpec, frame: Frame, T_f: np.ndarray, tol: Tolerance,
            extras_f: dict | None = None) -> Instance:
    ctx = make_context(frame.metric(), tol)
    op = a_adjoint(ctx, frame.world(T_f))
    extras = {k: a_adjoint(ctx, frame.world(v)) for k, v in (extras_f or {}).items()}
    return Instance(spec, ctx, op, extras)


# ---------------------------------------------------------------- families


def _general_in_BA(spec, rng, tol):
    frame = _frame(rng, spec.dim, spec.rank)
    T = _cgauss(rng, spec.dim, spec.dim) / math.sqrt(spec.dim)
    T[: frame.r, frame.r:] = 0.0
    return _finish(spec, frame, T, tol)


def _a_normal_frame(rng, frame: Frame, with_tail: bool) -> np.ndarray:
    r, d = frame.r, frame.dim
    singular = with_tail and d > r and rng.uniform() < 0.5
    N = _normal_block(rng, r, singular=singular)
    T = np.zeros((d, d), dtype=np.complex128)
    T[:r, :r] = frame.a_conj(N)
    if d > r:
        T[r:, r:] = _cgauss(rng, d - r, d - r) / math.sqrt(d - r)
        if singular:
            # T^# restricted to R(A); X must vanish on its range.
            sharp_R = frame.a_conj(N.conj().T)
            Y = _cgauss(rng, d - r, r)
            T[r:, :r] = Y @ (np.eye(r) - orthogonal_projector_onto_range(sharp_R))
    return T


def _a_normal(spec, rng, tol):
    frame = _frame(rng, spec.dim, spec.rank)
    return _finish(spec, frame, _a_normal_frame(rng, frame, with_tail=True), tol)


def _scalar_power(spec, rng, tol):
    frame = _frame(rng, spec.dim, spec.rank)
    mix = bool(rng.uniform() < 0.5)
    c = complex(spec.scalar)
    r, d = frame.r, frame.dim
    T = _block_diag(frame.a_conj(_scalar_power_block(rng, r, spec.power, c, mix)),
                    _scalar_power_block(rng, d - r, spec.power, c, mix))
    return _finish(spec, frame, T, tol)


def _inner_block(rng, kind: str, size: int, spec: GeneratorSpec) -> np.ndarray:
    if kind == "normal":
        return _normal_block(rng, size)
    if kind == "scalar_power":
        return _scalar_power_block(rng, size, spec.power, complex(spec.scalar), mix=True)
    return _well_conditioned(rng, size)


def _commuting_with_A(spec, rng, tol):
    frame = _frame(rng, spec.dim, spec.rank, clusters=True)
    blocks = [_inner_block(rng, spec.inner, g.size, spec) for g in _blocks_of(frame)]
    return _finish(spec, frame, _block_diag(*blocks), tol)


def _isometry_V(spec, rng, tol):
    frame = _frame(rng, spec.dim, spec.rank)
    r, d = frame.r, frame.dim
    V = _block_diag(frame.a_conj(haar_unitary(rng, r)), _well_conditioned(rng, d - r))
    kind = spec.inner if spec.inner != "generic" else str(rng.choice(INNER_KINDS["isometry_V"]))
    if kind == "normal":
        partner = _block_diag(frame.a_conj(_normal_block(rng, r)),
                              _cgauss(rng, d - r, d - r) / math.sqrt(max(d - r, 1)))
    else:
        c = complex(spec.scalar)
        partner = _block_diag(frame.a_conj(_scalar_power_block(rng, r, spec.power, c, True)),
                              _scalar_power_block(rng, d - r, spec.power, c, True))
    return _finish(spec, frame, V, tol, {"partner": partner})


def _paper_example(spec, rng, tol):
    if spec.dim != 2:
        raise InfeasibleSpecError("paper_example is a fixed 2x2 instance")
    ctx = make_context(np.diag([1.0, 2.0]).astype(np.complex128), tol)
    op = a_adjoint(ctx, np.array([[2, 0], [1, -2]], dtype=np.complex128))
    return Instance(spec, ctx, op)


def random_shift(rng) -> shiftcalc.WeightedShiftInstance:
    """Small eventually periodic weighted shift with a positive diagonal metric."""
    from fractions import Fraction

    choices = [1, 2, -1, 1j, Fraction(1, 2), 3]

    def gr(v):
        if isinstance(v, complex):
            return shiftcalc.GaussianRational(Fraction(int(v.real)), Fraction(int(v.imag)))
        return shiftcalc.GaussianRational.coerce(v)

    def seq(maker, pool):
        pre = [pool[int(i)] for i in rng.integers(len(pool), size=int(rng.integers(0, 3)))]
        per = [pool[int(i)] for i in rng.integers(len(pool), size=int(rng.integers(1, 4)))]
        return maker(pre, per)

    weights = seq(lambda pre, per: shiftcalc.weight_sequence([gr(v) for v in pre], [gr(v) for v in per]),
                  choices)
    metric = seq(shiftcalc.metric_sequence, [1, 2, 3, Fraction(1, 2)])
    return shiftcalc.WeightedShiftInstance(weights, metric)


def _shift(spec, rng, tol):
    S = random_shift(rng)
    A, T = shiftcalc.finite_section(S, spec.dim)
    ctx = make_context(A, tol)
    return Instance(spec, ctx, a_adjoint(ctx, T), shift=S)


def _partial_isometry(spec, rng, tol):
    """A-partial isometry: conjugated ``U ⊕ J`` on ``R(A)``, zero on ``N(A)``.

    ``J`` is the nilpotent shift of size ``min(power, r)``, so ``T^k`` is
    again an A-partial isometry and ``T`` is (n,m)-A-normal for
    ``n >= power``.
    """
    frame = _frame(rng, spec.dim, spec.rank)
    r, d = frame.r, frame.dim
    k = min(max(spec.power, 0), r)
    core = _block_diag(haar_unitary(rng, r - k), _nilpotent_shift(k)) if k < r else _nilpotent_shift(k)
    U = haar_unitary(rng, r)
    W = U @ core @ U.conj().T
    T = _block_diag(frame.a_conj(W), np.zeros((d - r, d - r)))
    return _finish(spec, frame, T, tol)


def _class_block(rng, frame_sub: Frame, spec: GeneratorSpec) -> np.ndarray:
    """Block commuting with its projector and lying in a class that propagates."""
    r, d = frame_sub.r, frame_sub.dim
    kind = rng.choice(["normal", "scalar_power"])
    if kind == "normal":
        R = frame_sub.a_conj(_normal_block(rng, r))
        N = _cgauss(rng, d - r, d - r) / math.sqrt(max(d - r, 1))
    else:
        c = complex(spec.scalar)
        R = frame_sub.a_conj(_scalar_power_block(rng, r, spec.power, c, True))
        N = _scalar_power_block(rng, d - r, spec.power, c, True)
    return _block_diag(R, N)


def _partner_block(rng, frame_sub: Frame, spec: GeneratorSpec) -> np.ndarray:
    r, d = frame_sub.r, frame_sub.dim
    if spec.inner == "selfadjoint":
        # A_R^{-1} H with H Hermitian is A-selfadjoint on R(A)
        R = _hermitian_block(rng, r) / frame_sub.a[:r][:, None]
        N = _cgauss(rng, d - r, d - r) / math.sqrt(max(d - r, 1))
        return _block_diag(R, N)
    if spec.inner == "normal":
        return _block_diag(frame_sub.a_conj(_normal_block(rng, r)),
                           _cgauss(rng, d - r, d - r) / math.sqrt(max(d - r, 1)))
    return _class_block(rng, frame_sub, spec)


def _sub_frame(rng, dim: int, rank: int) -> Frame:
    a = np.zeros(dim)
    a[:rank] = _positive_eigs(rng, rank)
    return Frame(haar_unitary(rng, dim), a, rank)


def _commuting_pair(spec, rng, tol):
    """Commuting pair ``(T, S)`` in block form, returned as ``op`` and extras["S"].

    For ``dim = 4`` half the draws use a Kronecker product
    ``T = T1 ⊗ I``, ``S = I ⊗ S2`` with ``A = A1 ⊗ A2`` and ``A2``
    invertible; the rest use a direct sum ``T = T1 ⊕ tI``, ``S = sI ⊕ S2``.
    """
    d = spec.dim
    if d == 4 and rng.uniform() < 0.5:
        r1 = int(rng.integers(1, 3))
        f1 = _sub_frame(rng, 2, r1)
        f2 = _sub_frame(rng, 2, 2)
        T1 = _class_block(rng, f1, spec)
        S2 = _partner_block(rng, f2, spec)
        A1 = f1.metric()
        A2 = f2.metric()
        A = np.kron(A1, A2)
        T = np.kron(f1.world(T1), np.eye(2))
        S = np.kron(np.eye(2), f2.world(S2))
        ctx = make_context(A, tol)
        return Instance(spec, ctx, a_adjoint(ctx, T), {"S": a_adjoint(ctx, S)})

    rank = spec.rank
    if rank < 2:
        raise InfeasibleSpecError("commuting_pair needs metric_rank >= 2")
    d1 = int(rng.integers(1, d))
    d2 = d - d1
    # each summand keeps a nonzero range
    r1 = int(rng.integers(max(1, rank - d2), min(d1, rank - 1) + 1))
    r2 = rank - r1
    f1 = _sub_frame(rng, d1, r1)
    f2 = _sub_frame(rng, d2, r2)
    if spec.inner == "selfadjoint":
        s = float(rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0]))
    else:
        s = complex(rng.uniform(0.5, 1.5) * _unit_phases(rng, 1)[0])
    t = complex(rng.uniform(0.5, 1.5) * _unit_phases(rng, 1)[0])
    T1 = _class_block(rng, f1, spec)
    S2 = _partner_block(rng, f2, spec)
    T = _block_diag(f1.world(T1), t * np.eye(d2))
    S = _block_diag(s * np.eye(d1), f2.world(S2))
    A = _block_diag(f1.metric(), f2.metric())
    ctx = make_context(A, tol)
    return Instance(spec, ctx, a_adjoint(ctx, T), {"S": a_adjoint(ctx, S)})


_BUILDERS = {
    "general_in_BA": _general_in_BA,
    "a_normal": _a_normal,
    "scalar_power": _scalar_power,
    "commuting_with_A": _commuting_with_A,
    "isometry_V": _isometry_V,
    "paper_example": _paper_example,
    "shift": _shift,
    "partial_isometry": _partial_isometry,
    "commuting_pair": _commuting_pair,
}


def generate(spec: GeneratorSpec, tol: Tolerance = DEFAULT_TOLERANCE) -> Instance:
    """Build the instance described by ``spec``; identical specs give identical output."""
    rng = np.random.default_rng(int(spec.seed))
    return _BUILDERS[spec.family](spec, rng, tol)


def with_seed(spec: GeneratorSpec, seed: int) -> GeneratorSpec:
    return replace(spec, seed=int(seed))
