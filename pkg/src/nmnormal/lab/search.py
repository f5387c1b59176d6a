"""Witness search for class separations.

Targets
-------
``not_normal(n,m)``
    An operator that is *not* (n,m)-A-normal (residual in the fail zone).
``qn_not_normal(n,m)``
    An operator that is (n,m)-A-quasinormal (pass zone) while failing
    (n,m)-A-normality (fail zone).

The dense domain works on ``dim x dim`` matrices; the shift domain works on
eventually periodic weighted shifts with exact verdicts.  A returned
witness has always been re-verified from scratch; otherwise the outcome is
``exhausted`` together with search statistics.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .. import shiftcalc
from ..classes import ClassIndex, nm_normal_residual, nm_quasinormal_residual
from ..errors import InvalidInputError, NmNormalError, UnknownTargetError
from ..io import matrix_to_json
from ..numerics import DEFAULT_TOLERANCE, Tolerance, Verdict, commutator, matrix_power
from ..semihilbert import a_adjoint, make_context
from .generators import GeneratorSpec, _cgauss, _positive_eigs, generate, random_shift

_TARGET = re.compile(r"^(not_normal|qn_not_normal)\((\d+),(\d+)\)$")
DOMAINS = ("dense", "shift")
# Coordinate-descent step bounds.
STEP_START = 0.25
STEP_MIN = 1e-9


@dataclass(frozen=True)
class Target:
    kind: str
    index: ClassIndex

    @classmethod
    def parse(cls, text: str) -> "Target":
        match = _TARGET.match(text.replace(" ", ""))
        if not match:
            raise UnknownTargetError(
                f"unknown search target {text!r}; expected not_normal(n,m) or qn_not_normal(n,m)"
            )
        try:
            idx = ClassIndex(int(match.group(2)), int(match.group(3)))
        except InvalidInputError as exc:
            raise UnknownTargetError(f"search target {text!r}: {exc}") from None
        return cls(match.group(1), idx)

    def __str__(self):
        return f"{self.kind}({self.index.n},{self.index.m})"


@dataclass
class SearchOutcome:
    target: str
    domain: str
    status: str
    witness: dict | None
    stats: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.status == "witness"

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "domain": self.domain,
            "status": self.status,
            "witness": self.witness,
            "stats": self.stats,
        }


# ---------------------------------------------------------------- dense


def _exact_commutators(a: np.ndarray, T: np.ndarray, idx: ClassIndex) -> tuple[bool, bool]:
    """``(QN identity exact, normal identity exact)`` for the binary values of ``a`` and ``T``.

    Every float is a dyadic rational, so ``A = diag(a)`` and ``T`` are
    taken at face value and the commutators are evaluated without rounding.
    """
    from fractions import Fraction

    GR = shiftcalc.GaussianRational
    d = a.size
    af = [Fraction(float(v)) for v in a]
    ainv = [1 / v if v else Fraction(0) for v in af]
    Tx = np.empty((d, d), dtype=object)
    Sx = np.empty((d, d), dtype=object)
    for i in range(d):
        for j in range(d):
            Tx[i, j] = GR(Fraction(float(T[i, j].real)), Fraction(float(T[i, j].imag)))
    for i in range(d):
        for j in range(d):
            Sx[i, j] = Tx[j, i].conjugate() * (ainv[i] * af[j])
    Tn = shiftcalc._object_power(Tx, idx.n)
    Sm = shiftcalc._object_power(Sx, idx.m)
    normal = Tn @ Sm - Sm @ Tn
    qn = Tn @ (Sm @ Tx) - (Sm @ Tx) @ Tn
    return not any(bool(z) for z in qn.ravel()), not any(bool(z) for z in normal.ravel())


def _verify_dense(target: Target, A: np.ndarray, T: np.ndarray, tol: Tolerance) -> dict | None:
    """Full re-verification through the public predicates; a witness dict or ``None``."""
    try:
        ctx = make_context(A, tol)
        op = a_adjoint(ctx, T)
    except NmNormalError:
        return None
    normal = nm_normal_residual(op, target.index)
    verdicts = [normal]
    ok = normal.verdict is Verdict.FAIL
    if target.kind == "qn_not_normal":
        qn = nm_quasinormal_residual(op, target.index)
        verdicts.append(qn)
        ok = ok and qn.verdict is Verdict.PASS
    if not ok:
        return None
    return {
        "metric": matrix_to_json(ctx.A),
        "operator": matrix_to_json(T),
        "verdicts": [v.to_dict() for v in verdicts],
    }


class _FrameObjective:
    """Residuals for a block lower-triangular ``T`` against ``A = diag(a)``.

    The free parameters are the real and imaginary parts of the entries
    allowed by ``T(N(A)) ⊆ N(A)``; ``T`` is kept at unit Frobenius norm,
    which the scale-free residuals do not notice.
    """

    def __init__(self, a: np.ndarray, idx: ClassIndex, margin: float):
        self.a = a
        self.idx = idx
        self.margin = margin
        d, r = a.size, int(np.count_nonzero(a))
        mask = np.ones((d, d), dtype=bool)
        mask[:r, r:] = False
        self.mask = mask
        self.a_inv = np.where(a > 0, 1.0 / np.where(a > 0, a, 1.0), 0.0)
        self.size = 2 * int(mask.sum())
        self.evaluations = 0

    def unpack(self, x: np.ndarray) -> np.ndarray:
        k = self.size // 2
        T = np.zeros(self.mask.shape, dtype=np.complex128)
        T[self.mask] = x[:k] + 1j * x[k:]
        return T

    def pack(self, T: np.ndarray) -> np.ndarray:
        v = T[self.mask]
        return np.concatenate([v.real, v.imag])

    def sharp(self, T: np.ndarray) -> np.ndarray:
        return (self.a_inv[:, None] * T.conj().T) * self.a[None, :]

    def residuals(self, x: np.ndarray) -> tuple[float, float]:
        self.evaluations += 1
        T = self.unpack(x)
        S = self.sharp(T)
        n, m = self.idx.n, self.idx.m
        Tn, Sm = matrix_power(T, n), matrix_power(S, m)
        t, s = np.linalg.norm(T, 2), max(np.linalg.norm(S, 2), 1e-300)
        qn = np.linalg.norm(commutator(Tn, Sm @ T), 2) / (t ** (n + 1) * s ** m + 1e-300)
        nr = np.linalg.norm(commutator(Tn, Sm), 2) / (t ** n * s ** m + 1e-300)
        return float(qn), float(nr)

    def value(self, x: np.ndarray) -> float:
        """``log10`` of the QN residual, penalised when the normal residual drops below margin."""
        qn, nr = self.residuals(x)
        f = np.log10(qn + 1e-300)
        floor = 10 * self.margin
        if nr < floor:
            f += 10.0 * (np.log10(floor) - np.log10(nr + 1e-300))
        return float(f)

    def qn_vector(self, x: np.ndarray) -> np.ndarray:
        self.evaluations += 1
        T = self.unpack(x)
        S = self.sharp(T)
        n, m = self.idx.n, self.idx.m
        C = commutator(matrix_power(T, n), matrix_power(S, m) @ T)
        nrm = np.linalg.norm(x)
        # keep the iterate away from T = 0, where every commutator vanishes trivially
        return np.concatenate([C.real.ravel(), C.imag.ravel(), [nrm - 1.0]])


def _descend(obj: _FrameObjective, x: np.ndarray, rng, budget: int) -> tuple[np.ndarray, float]:
    """Randomised coordinate descent on ``obj.value`` within ``budget`` evaluations."""
    start = obj.evaluations
    best = obj.value(x)
    h = STEP_START
    while obj.evaluations - start < budget and h > STEP_MIN:
        improved = False
        for i in rng.permutation(x.size):
            for sign in (1.0, -1.0):
                if obj.evaluations - start >= budget:
                    break
                y = x.copy()
                y[i] += sign * h
                y /= np.linalg.norm(y)
                v = obj.value(y)
                if v < best:
                    x, best, improved = y, v, True
                    break
        if not improved:
            h *= 0.5
    return x, best


def _dense_search(target: Target, dim: int, budget: int, rng, tol: Tolerance,
                  polish: bool) -> SearchOutcome:
    stats = {"evaluations": 0, "candidates": 0, "restarts": 0, "polishes": 0,
             "float_only_candidates": 0, "best_qn_residual_with_normal_failing": None}

    def found(wit, how):
        stats["found_by"] = how
        return SearchOutcome(str(target), "dense", "witness", wit, stats)

    if dim == 2:
        inst = generate(GeneratorSpec("paper_example", 2, 0), tol)
        stats["candidates"] += 1
        stats["evaluations"] += 1
        wit = _verify_dense(target, inst.ctx.A, inst.op.T, tol)
        if wit:
            return found(wit, "fixed example")

    if target.kind == "not_normal":
        while stats["evaluations"] < budget:
            rank = int(rng.integers(1, dim + 1))
            spec = GeneratorSpec("general_in_BA", dim, int(rng.integers(2**63)), rank)
            inst = generate(spec, tol)
            stats["candidates"] += 1
            stats["evaluations"] += 1
            wit = _verify_dense(target, inst.ctx.A, inst.op.T, tol)
            if wit:
                wit["spec"] = spec.to_dict()
                return found(wit, "random generation")
        return SearchOutcome(str(target), "dense", "exhausted", None, stats)

    best_seen = np.inf
    while stats["evaluations"] < budget:
        stats["restarts"] += 1
        rank = int(rng.integers(1, dim + 1))
        a = np.zeros(dim)
        a[:rank] = _positive_eigs(rng, rank)
        obj = _FrameObjective(a, target.index, tol.distinctness_margin)
        T0 = _cgauss(rng, dim, dim)
        x = obj.pack(T0)
        x /= np.linalg.norm(x)
        # one evaluation is reserved for the final residual check
        remaining = budget - stats["evaluations"] - 1
        if remaining > 0:
            x, _ = _descend(obj, x, rng, min(remaining, 40 * obj.size))
        # each least-squares iteration also spends obj.size evaluations on its Jacobian
        nfev = min(budget - stats["evaluations"] - obj.evaluations - 1, 50 * obj.size) // (obj.size + 1)
        if polish and nfev >= 1:
            stats["polishes"] += 1
            try:
                sol = scipy.optimize.least_squares(obj.qn_vector, x, max_nfev=nfev, method="trf")
                x = sol.x / np.linalg.norm(sol.x)
            except (ValueError, np.linalg.LinAlgError):
                pass
        qn, nr = obj.residuals(x)
        stats["evaluations"] += obj.evaluations
        stats["candidates"] += 1
        if nr >= tol.distinctness_margin:
            best_seen = min(best_seen, qn)
        T = obj.unpack(x)
        wit = _verify_dense(target, np.diag(a).astype(np.complex128), T, tol)
        if wit:
            # a float pass can come from a degenerate scale; demand the exact identities
            qn_exact, normal_exact = _exact_commutators(a, T, target.index)
            if qn_exact and not normal_exact:
                wit["exact"] = {"quasinormal": True, "normal": False}
                return found(wit, "descent")
            stats["float_only_candidates"] += 1
    if np.isfinite(best_seen):
        stats["best_qn_residual_with_normal_failing"] = float(best_seen)
    return SearchOutcome(str(target), "dense", "exhausted", None, stats)


# ---------------------------------------------------------------- shifts


def _verify_shift(target: Target, S: shiftcalc.WeightedShiftInstance) -> dict | None:
    normal = shiftcalc.shift_class_check(S, target.index, "normal")
    verdicts = [normal]
    ok = not normal.passed
    if target.kind == "qn_not_normal":
        qn = shiftcalc.shift_class_check(S, target.index, "quasinormal")
        verdicts.append(qn)
        ok = ok and qn.passed
    if not ok:
        return None
    return {"shift": shiftcalc.shift_to_json(S), "verdicts": [v.to_dict() for v in verdicts]}


def _shift_search(target: Target, budget: int, rng) -> SearchOutcome:
    stats = {"evaluations": 0, "candidates": 0}
    candidates = [shiftcalc.unilateral_shift()]
    while stats["evaluations"] < budget:
        S = candidates.pop() if candidates else random_shift(rng)
        stats["evaluations"] += 1
        stats["candidates"] += 1
        wit = _verify_shift(target, S)
        if wit:
            return SearchOutcome(str(target), "shift", "witness", wit, stats)
    return SearchOutcome(str(target), "shift", "exhausted", None, stats)


def search(target: str, dim: int = 2, budget: int = 1000, seed: int = 0, domain: str = "dense",
           tol: Tolerance = DEFAULT_TOLERANCE, polish: bool = True) -> SearchOutcome:
    """Look for a witness of ``target``; deterministic in ``seed``.

    ``budget`` counts objective evaluations (dense) or candidate shifts
    (shift domain).

    Raises
    ------
    UnknownTargetError
        ``target`` does not parse.
    InvalidInputError
        ``budget < 1``, unknown ``domain`` or ``dim`` outside ``[2, 16]``.
    """
    tgt = Target.parse(target)
    if isinstance(budget, bool) or not isinstance(budget, (int, np.integer)) or budget < 1:
        raise InvalidInputError(f"budget must be a positive integer, got {budget!r}")
    if domain not in DOMAINS:
        raise InvalidInputError(f"unknown search domain {domain!r}; choose from {DOMAINS}")
    rng = np.random.default_rng(int(seed))
    if domain == "shift":
        return _shift_search(tgt, int(budget), rng)
    if not 2 <= dim <= 16:
        raise InvalidInputError(f"dim must lie in [2, 16], got {dim}")
    return _dense_search(tgt, int(dim), int(budget), rng, tol, polish)
