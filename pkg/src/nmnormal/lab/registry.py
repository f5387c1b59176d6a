"""The statement registry.

Each row encodes one implication or equivalence between operator classes
as a checkable property.  A row evaluates to one or more *parts*; a part
has premise verdicts and, only when every premise passes, conclusion
verdicts.  Premises that fail make the part vacuous, which is reported
and never counted as a pass.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from ..classes import (
    ClassIndex,
    ClassVerdict,
    a_isometry,
    a_normal,
    a_selfadjoint,
    b_operator,
    build_xyz,
    c_operator,
    injective,
    nm_normal_residual,
    nm_quasinormal_residual,
    power_operator,
    rank_at_least,
    vanishes,
)
from ..errors import UnknownCheckError
from ..numerics import Verdict, adjoint, all_of, commutator, iff, spectral_norm
from ..semihilbert import SHARP_FLOOR, a_adjoint, re_im_parts
from .generators import GeneratorSpec, Instance, _divisors

# Internal index bound: derived indices such as n*m reach 16.
INTERNAL_LIMIT = 64


class PremiseStatus(str, enum.Enum):
    SATISFIED = "satisfied"
    VACUOUS = "vacuous"
    INDETERMINATE = "indeterminate"

    def __str__(self):
        return self.value


def premise_status(premises: Iterable[ClassVerdict]) -> PremiseStatus:
    v = all_of(p.verdict for p in premises)
    if v is Verdict.PASS:
        return PremiseStatus.SATISFIED
    if v is Verdict.FAIL:
        return PremiseStatus.VACUOUS
    return PremiseStatus.INDETERMINATE


@dataclass(frozen=True)
class PartResult:
    label: str
    index: ClassIndex
    premise: PremiseStatus
    conclusion: Verdict | None
    premises: tuple = ()
    conclusions: tuple = ()

    def residuals(self) -> list[tuple[str, float]]:
        return [(c.label, float(c.residual)) for c in self.premises + self.conclusions]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "index": [int(self.index.n), int(self.index.m)],
            "premise": self.premise.value,
            "conclusion": None if self.conclusion is None else self.conclusion.value,
            "premises": [c.to_dict() for c in self.premises],
            "conclusions": [c.to_dict() for c in self.conclusions],
        }


@dataclass(frozen=True)
class CheckReport:
    check_id: str
    premise: PremiseStatus
    conclusion: Verdict | None
    witness: dict | None
    residuals: list = field(default_factory=list)
    parts: tuple = ()

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "premise": self.premise.value,
            "conclusion": None if self.conclusion is None else self.conclusion.value,
            "witness": self.witness,
            "residuals": [[name, value] for name, value in self.residuals],
        }


def equivalence(name: str, left: list[ClassVerdict], right: list[ClassVerdict]) -> ClassVerdict:
    """Verdict on ``all(left) <=> all(right)``; the residual is the largest component."""
    comps = left + right
    r = max(c.residual for c in comps)
    v = iff(all_of(c.verdict for c in left), all_of(c.verdict for c in right))
    return ClassVerdict(name, None, r, v, comps[0].tolerances)


class Eval:
    """Memoised predicates on one instance."""

    def __init__(self, inst: Instance):
        self.inst = inst
        self.op = inst.op
        self.ctx = inst.ctx
        self.tol = inst.ctx.tol
        self._memo: dict = {}

    def _get(self, key, fn):
        if key not in self._memo:
            self._memo[key] = fn()
        return self._memo[key]

    def idx(self, n: int, m: int) -> ClassIndex:
        return ClassIndex(n, m, limit=INTERNAL_LIMIT)

    def N(self, n: int, m: int, op=None) -> ClassVerdict:
        op = op or self.op
        return self._get(("N", id(op), n, m), lambda: nm_normal_residual(op, self.idx(n, m)))

    def Q(self, n: int, m: int, op=None) -> ClassVerdict:
        op = op or self.op
        return self._get(("Q", id(op), n, m), lambda: nm_quasinormal_residual(op, self.idx(n, m)))

    # norms used as scales
    @property
    def t(self) -> float:
        return self.op.norm

    @property
    def s(self) -> float:
        return self.op.sharp_scale

    def commutes_with_A(self) -> ClassVerdict:
        return vanishes("AT=TA", commutator(self.ctx.A, self.op.T), self.ctx.norm * self.t, self.tol)

    def reduces(self) -> ClassVerdict:
        return vanishes("PT=TP", commutator(self.ctx.P, self.op.T), self.t, self.tol)


def _part(label: str, idx: ClassIndex, premises: list[ClassVerdict],
          conclude: Callable[[], list[ClassVerdict]]) -> PartResult:
    status = premise_status(premises)
    if status is not PremiseStatus.SATISFIED:
        return PartResult(label, idx, status, None, tuple(premises))
    conclusions = conclude()
    verdict = all_of(c.verdict for c in conclusions)
    return PartResult(label, idx, status, verdict, tuple(premises), tuple(conclusions))


def _lazy_premises(*stages):
    """Evaluate premise groups in order, stopping after the first group that does not pass."""
    out = []
    for stage in stages:
        group = stage()
        out.extend(group)
        if all_of(p.verdict for p in group) is not Verdict.PASS:
            break
    return out


def _index_fact(name: str, ok: bool, tol) -> ClassVerdict:
    return ClassVerdict(name, None, 0.0 if ok else 1.0, Verdict.PASS if ok else Verdict.FAIL, tol)


# ---------------------------------------------------------------- characterisations


def _form_and_range(E: Eval, n: int, m: int, quasi: bool) -> list[ClassVerdict]:
    op, ctx = E.op, E.ctx
    Sn, Sm, Tn, Tm = op.sharp_power(n), op.sharp_power(m), op.power(n), op.power(m)
    extra = op.T if quasi else np.eye(ctx.dim)
    k = 1 if quasi else 0
    lhs = adjoint(Sn) @ ctx.A @ Sm @ extra
    rhs = adjoint(Tm) @ ctx.A @ Tn @ extra
    scale = ctx.norm * max(E.s ** (n + m) * E.t ** k, E.t ** (n + m + k))
    form = vanishes("form", lhs - rhs, scale, E.tol, E.idx(n, m))
    rng = vanishes("range", ctx.P_perp @ Tn @ Sm @ extra, E.t ** (n + k) * E.s ** m, E.tol, E.idx(n, m))
    return [form, rng]


def characterisation(instance: Instance, idx: ClassIndex, quasi: bool = False) -> tuple[ClassVerdict, ClassVerdict]:
    """``(commutator verdict, form-and-range verdict)`` for one instance and index."""
    E = Eval(instance)
    n, m = idx.n, idx.m
    direct = E.Q(n, m) if quasi else E.N(n, m)
    parts = _form_and_range(E, n, m, quasi)
    combined = ClassVerdict("form_and_range", E.idx(n, m), max(p.residual for p in parts),
                            all_of(p.verdict for p in parts), E.tol)
    return direct, combined


def thm2_1_fwd(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("fwd", idx, [E.N(n, m)], lambda: _form_and_range(E, n, m, False))]


def thm2_1_bwd(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("bwd", idx, _form_and_range(E, n, m, False), lambda: [E.N(n, m)])]


def thm3_1_fwd(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("fwd", idx, [E.Q(n, m)], lambda: _form_and_range(E, n, m, True))]


def thm3_1_bwd(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("bwd", idx, _form_and_range(E, n, m, True), lambda: [E.Q(n, m)])]


def pro2_1_swap(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    P = E.ctx.P
    prem = vanishes("(I-P)TP=0", E.ctx.P_perp @ E.op.T @ P, E.t, E.tol)
    return [_part("swap", idx, [prem],
                  lambda: [equivalence("(n,m)<=>(m,n)", [E.N(n, m)], [E.N(m, n)])])]


def _power_a_normal(E: Eval, j: int) -> ClassVerdict:
    """A-normality of ``U = T^j`` using a freshly computed ``U^#``.

    The computed ``U^#`` carries an absolute error of order
    ``||A^+|| ||A|| ||T||^j``, so its scale is floored relative to that
    bound rather than to powers of ``||T^#||``.
    """
    U = power_operator(E.op, j)
    tj = E.t ** j
    bound = spectral_norm(E.ctx.A_dagger) * E.ctx.norm * tj
    X = commutator(U.T_sharp, U.T)
    return vanishes(f"a_normal(T^{j})", X, tj * max(U.sharp_norm, SHARP_FLOOR * bound), E.tol)


def th21_lcm(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("lcm", idx, [E.N(n, m)],
                  lambda: [_power_a_normal(E, math.lcm(n, m)), _power_a_normal(E, n * m)])]


def pro22_xyz(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    X, Y, Z = build_xyz(E.op, E.idx(n, m))
    Tn = E.op.power(n)
    a, b = E.t ** n, E.s ** m
    normal = [E.N(n, m)]
    xy = vanishes("[X,Y]=0", commutator(X, Y), 2 * a * b, E.tol)
    tx = vanishes("[T^n,X]=0", commutator(Tn, X), a * b, E.tol)
    ty = vanishes("[T^n,Y]=0", commutator(Tn, Y), a * b, E.tol)
    equivs = _part("equivalences", idx, [], lambda: [
        equivalence("[X,Y]=0 <=> normal", [xy], normal),
        equivalence("[T^n,X]=0 <=> normal", [tx], normal),
        equivalence("[T^n,Y]=0 <=> normal", [ty], normal),
    ])
    zparts = _part("Z commutes", idx, normal, lambda: [
        vanishes("[Z,X]=0", commutator(Z, X), a * b * (a + b), E.tol),
        vanishes("[Z,Y]=0", commutator(Z, Y), a * b * (a + b), E.tol),
    ])
    return [equivs, zparts]


def conj_isometry(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    V = E.op
    T = E.inst.extras["partner"]
    P = E.ctx.P
    prem = [
        a_isometry(V),
        vanishes("PT=TP", commutator(P, T.T), T.norm, E.tol),
        vanishes("PV=VP", commutator(P, V.T), V.norm, E.tol),
        E.N(n, m, op=T),
    ]

    def conclude():
        W = a_adjoint(E.ctx, V.T @ T.T @ V.T_sharp, scale=V.norm * T.norm * V.sharp_scale)
        return [nm_normal_residual(W, E.idx(n, m))]

    return [_part("VTV#", idx, prem, conclude)]


def _product_premises(E: Eval, S, n: int, m: int, extra: list) -> list[ClassVerdict]:
    T = E.op
    nt, ns = T.norm, S.norm
    return [
        vanishes("TS=ST", commutator(T.T, S.T), nt * ns, E.tol),
        vanishes("ST#=T#S", commutator(S.T, T.T_sharp), ns * T.sharp_scale, E.tol),
        E.N(n, m),
    ] + extra


def _product_conclusion(E: Eval, S, n: int, m: int, quasi: bool) -> list[ClassVerdict]:
    TS = a_adjoint(E.ctx, E.op.T @ S.T, scale=E.op.norm * S.norm)
    out = [nm_normal_residual(TS, E.idx(n, m))]
    if quasi:
        out.append(nm_quasinormal_residual(TS, E.idx(n, m)))
    return out


def prod_selfadj(E: Eval, idx: ClassIndex):
    n = idx.n
    S = E.inst.extras["S"]
    prem = _product_premises(E, S, n, n, [a_selfadjoint(S)])
    return [_part("TS", E.idx(n, n), prem, lambda: _product_conclusion(E, S, n, n, False))]


def prod_normal(E: Eval, idx: ClassIndex):
    n = idx.n
    S = E.inst.extras["S"]
    prem = _product_premises(E, S, n, n, [a_normal(S)])
    return [_part("TS", E.idx(n, n), prem, lambda: _product_conclusion(E, S, n, n, False))]


def pro3_1_product(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    S = E.inst.extras["S"]
    T = E.op
    extra = [
        vanishes("TS#=S#T", commutator(T.T, S.T_sharp), T.norm * S.sharp_scale, E.tol),
        E.N(n, m, op=S),
    ]
    prem = _product_premises(E, S, n, m, extra)
    return [_part("TS", idx, prem, lambda: _product_conclusion(E, S, n, m, True))]


# ---------------------------------------------------------------- power propagation


def pro24_induction(E: Eval, idx: ClassIndex):
    m = idx.m
    return [_part("induction", idx, [E.N(2, m), E.N(3, m)],
                  lambda: [E.N(k, m) for k in range(4, 9)])]


def pro25_step(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("step", idx, [E.N(n, m), E.N(n + 1, m)], lambda: [E.N(n + 2, m)])]


def pro26_injective(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    prem = [injective("T injective", E.op.T, E.tol), E.N(n, m), E.N(n + 1, m)]
    return [_part("injective", idx, prem, lambda: [E.N(1, m)])]


def pro27_dual(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [
        _part("induction in m", idx, [E.N(n, 2), E.N(n, 3)], lambda: [E.N(n, k) for k in range(4, 9)]),
        _part("step in m", idx, [E.N(n, m), E.N(n, m + 1)], lambda: [E.N(n, m + 2)]),
    ]


def pro29_sharp_injective(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    prem = [injective("T# injective", E.op.T_sharp, E.tol), E.N(n, m), E.N(n, m + 1)]
    return [_part("sharp injective", idx, prem, lambda: [E.N(n, 1)])]


def _partial_isometry_identity(E: Eval, k: int, sharp_first: bool) -> ClassVerdict:
    op = E.op
    if sharp_first:
        X = op.sharp_power(k) @ op.power(k) @ op.sharp_power(k) - op.sharp_power(k)
        name = f"(T#)^{k} T^{k} (T#)^{k} = (T#)^{k}"
        scale = max(E.s ** (2 * k) * E.t ** k, E.s ** k)
    else:
        X = op.power(k) @ op.sharp_power(k) @ op.power(k) - op.power(k)
        name = f"T^{k} (T#)^{k} T^{k} = T^{k}"
        scale = max(E.t ** (2 * k) * E.s ** k, E.t ** k)
    return vanishes(name, X, scale, E.tol)


def th23_partial(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    first = _part("n>=m", idx, _lazy_premises(
        lambda: [_index_fact("n>=m", n >= m, E.tol)],
        lambda: [E.N(n, m), _partial_isometry_identity(E, m, False)],
    ), lambda: [E.N(n + m, m)])
    second = _part("m>=n", idx, _lazy_premises(
        lambda: [_index_fact("m>=n", m >= n, E.tol)],
        lambda: [E.N(n, m), _partial_isometry_identity(E, n, True)],
    ), lambda: [E.N(n, m + n)])
    return [first, second]


def sq_identity_normal(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    op = E.op

    def conclude():
        M = op.power(n) @ op.sharp_power(m)
        X = op.power(2 * n) @ op.sharp_power(2 * m) - M @ M
        return [vanishes("T^2n (T#)^2m = (T^n (T#)^m)^2", X, E.t ** (2 * n) * E.s ** (2 * m), E.tol)]

    return [_part("squared", idx, [E.N(n, m)], conclude)]


def _fuglede_premises(E: Eval) -> list[ClassVerdict]:
    return [E.commutes_with_A(), E.reduces()]


def proAA_fuglede(E: Eval, idx: ClassIndex):
    n = idx.n
    Tn = E.op.power(n)
    prem = _fuglede_premises(E) + [
        vanishes("T^n normal", commutator(Tn, adjoint(Tn)), E.t ** (2 * n), E.tol)
    ]
    return [_part("fuglede", idx, prem, lambda: [E.N(n, k) for k in range(1, 9)])]


def corAA_lcm(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    Tn, Tm = E.op.power(n), E.op.power(m)
    prem = _fuglede_premises(E) + [
        vanishes("[T^n, (T*)^m] = 0", commutator(Tn, adjoint(Tm)), E.t ** (n + m), E.tol)
    ]
    j = math.lcm(n, m)
    return [_part("lcm", idx, prem, lambda: [E.N(j, r) for r in range(1, 9)])]


# ---------------------------------------------------------------- quasinormal rows


def remark_inclusion(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("inclusion", idx, [E.N(n, m)], lambda: [E.Q(n, m)])]


def pro33_step(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    return [_part("step", idx, [E.Q(n, m), E.Q(n + 1, m)], lambda: [E.Q(n + 2, m)])]


def th31_partial(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    prem = _lazy_premises(
        lambda: [_index_fact("n>=m", n >= m, E.tol)],
        lambda: [E.Q(n, m), _partial_isometry_identity(E, m, False)],
    )
    return [_part("partial isometry", idx, prem, lambda: [E.Q(n + m, m)])]


def pro34_1(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    prem = [injective("T injective", E.op.T, E.tol), E.Q(n, m), E.Q(n + 1, m)]
    return [_part("injective", idx, prem, lambda: [E.Q(1, m)])]


def pro34_2(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    op = E.op
    prem = [
        injective("T* injective", adjoint(op.T), E.tol),
        rank_at_least("rank (T#)^m T = rank A", op.sharp_power(m) @ op.T, E.ctx.rank, E.tol),
        E.Q(n, m),
        E.Q(n, m + 1),
    ]
    return [_part("adjoint injective", idx, prem, lambda: [E.N(n, 1)])]


def pro35_induction(E: Eval, idx: ClassIndex):
    m = idx.m
    return [_part("induction", idx, [E.Q(2, m), E.Q(3, m)],
                  lambda: [E.Q(k, m) for k in range(4, 9)])]


def _dense_range_premise(E: Eval, m: int) -> ClassVerdict:
    return injective(f"T^{m - 1} full rank", E.op.power(m - 1), E.tol)


def _commutes_with_parts(E: Eval, R: np.ndarray, r_scale: float, k: int, name: str) -> list[ClassVerdict]:
    """``R`` commutes with ``Re_A(T^k)`` and ``Im_A(T^k)``; ``r_scale`` bounds ``||R||``."""
    Re, Im = re_im_parts(power_operator(E.op, k))
    scale = r_scale * 0.5 * (E.t ** k + E.s ** k)
    return [
        vanishes(f"[{name}, Re_A(T^{k})] = 0", commutator(R, Re), scale, E.tol),
        vanishes(f"[{name}, Im_A(T^{k})] = 0", commutator(R, Im), scale, E.tol),
    ]


def _root_scale(E: Eval, m: int) -> float:
    """Bound on ``||C_m||`` and ``||B_m||``: ``(||T|| ||T^#||)^(m/2)``."""
    return math.sqrt(E.t ** m * E.s ** m)


def th37_equiv(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    prem = [_dense_range_premise(E, m)] + _fuglede_premises(E)

    def conclude():
        C = c_operator(E.op, m)
        return [equivalence("QN <=> C commutes with Re and Im", [E.Q(n, m)],
                            _commutes_with_parts(E, C, _root_scale(E, m), n, f"C_{m}"))]

    return [_part("equivalence", idx, prem, conclude)]


def th2_2_bcond(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    op = E.op

    def b_conditions():
        B = b_operator(op, m)
        C2 = op.sharp_power(m) @ op.power(m)
        B2 = op.power(m) @ op.sharp_power(m)
        Tn = op.power(n)
        intertwine = vanishes("C^2 T^n = T^n B^2", C2 @ Tn - Tn @ B2,
                              E.t ** (m + n) * E.s ** m, E.tol)
        return _commutes_with_parts(E, B, _root_scale(E, m), m, f"B_{m}") + [intertwine]

    prem = _lazy_premises(lambda: [_dense_range_premise(E, m)] + _fuglede_premises(E), b_conditions)
    return [_part("B condition", idx, prem, lambda: [E.Q(m, m)])]


def sq_identity_qn(E: Eval, idx: ClassIndex):
    n, m = idx.n, idx.m
    op = E.op

    def conclude():
        M = op.sharp_power(m) @ op.power(n)
        X = op.sharp_power(2 * m) @ op.power(2 * n) - M @ M
        return [vanishes("(T#)^2m T^2n = ((T#)^m T^n)^2", X, E.t ** (2 * n) * E.s ** (2 * m), E.tol)]

    return [_part("squared", idx, [E.Q(n, m)], conclude)]


# ---------------------------------------------------------------- spec builders


def _seed(rng) -> int:
    return int(rng.integers(2**63))


def _dim(rng, dims) -> int:
    return int(rng.integers(dims[0], dims[1] + 1))


def _rank(rng, dim: int, full: bool = False, at_least: int = 1) -> int | None:
    if full or rng.uniform() < 0.4:
        return None
    return int(rng.integers(min(at_least, dim), dim + 1))


def _scalar(rng) -> complex:
    if rng.uniform() < 0.3:
        return 4.0 + 0j
    return complex(rng.uniform(0.5, 3.0) * np.exp(2j * np.pi * rng.uniform()))


def _pick(rng, values) -> int:
    values = sorted(set(values))
    return int(values[int(rng.integers(len(values)))])


Builder = Callable[..., GeneratorSpec]


def b_family(family: str, full: bool = False) -> Builder:
    def build(rng, idx, dims):
        d = _dim(rng, dims)
        return GeneratorSpec(family, d, _seed(rng), _rank(rng, d, full))
    return build


def b_paper(rng, idx, dims) -> GeneratorSpec:
    return GeneratorSpec("paper_example", 2, 0)


def b_scalar_power(powers: Callable[[ClassIndex], Iterable[int]], full: bool = False) -> Builder:
    def build(rng, idx, dims):
        d = _dim(rng, dims)
        return GeneratorSpec("scalar_power", d, _seed(rng), _rank(rng, d, full),
                             power=_pick(rng, powers(idx)), scalar=_scalar(rng))
    return build


def b_partial_isometry(nil: Callable[[ClassIndex], int], full: bool = False) -> Builder:
    def build(rng, idx, dims):
        d = _dim(rng, dims)
        return GeneratorSpec("partial_isometry", d, _seed(rng), _rank(rng, d, full),
                             power=int(rng.integers(0, nil(idx) + 1)))
    return build


def b_commuting(powers: Callable[[ClassIndex], Iterable[int]], kinds=("generic", "normal", "scalar_power"),
                full: bool = False) -> Builder:
    def build(rng, idx, dims):
        d = _dim(rng, dims)
        return GeneratorSpec("commuting_with_A", d, _seed(rng), _rank(rng, d, full),
                             power=_pick(rng, powers(idx)), scalar=_scalar(rng),
                             inner=str(kinds[int(rng.integers(len(kinds)))]))
    return build


def b_isometry(rng, idx, dims) -> GeneratorSpec:
    d = _dim(rng, dims)
    return GeneratorSpec("isometry_V", d, _seed(rng), _rank(rng, d),
                         power=_pick(rng, _divisors(idx.n)), scalar=_scalar(rng))


def b_pair(inner: str, square: bool) -> Builder:
    def build(rng, idx, dims):
        d = _dim(rng, (max(dims[0], 2), dims[1]))
        n = idx.n
        m = n if square else idx.m
        powers = set(_divisors(n)) | (set() if square else set(_divisors(m)))
        return GeneratorSpec("commuting_pair", d, _seed(rng), _rank(rng, d, at_least=2),
                             power=_pick(rng, powers), scalar=_scalar(rng), inner=inner)
    return build


def _div_nm(idx):
    return set(_divisors(idx.n)) | set(_divisors(idx.m))


def _div_n(idx):
    return _divisors(idx.n)


def _div_m(idx):
    return _divisors(idx.m)


def _generic_families(nil=lambda idx: idx.n, powers=_div_nm) -> dict:
    return {
        "a_normal": b_family("a_normal"),
        "scalar_power": b_scalar_power(powers),
        "partial_isometry": b_partial_isometry(nil),
        "commuting_with_A": b_commuting(powers),
        "paper_example": b_paper,
        "general_in_BA": b_family("general_in_BA"),
    }


def _injective_families(full_metric: bool, powers=_div_nm) -> dict:
    return {
        "a_normal": b_family("a_normal", full=True),
        "scalar_power": b_scalar_power(powers, full=full_metric),
        "partial_isometry": b_partial_isometry(lambda idx: 0, full=True),
        "commuting_with_A": b_commuting(powers, full=full_metric),
        "paper_example": b_paper,
    }


def _fuglede_families(powers) -> dict:
    return {"commuting_with_A": b_commuting(powers)}


@dataclass(frozen=True)
class Row:
    id: str
    statement: str
    evaluate: Callable[[Eval, ClassIndex], list[PartResult]]
    families: dict


def _rows() -> list[Row]:
    g = _generic_families
    return [
        Row("thm2_1_fwd", "(n,m)-A-normal => form equality and range condition", thm2_1_fwd, g()),
        Row("thm2_1_bwd", "form equality and range condition => (n,m)-A-normal", thm2_1_bwd, g()),
        Row("pro2_1_swap", "(I-P)TP = 0 => [(n,m) <=> (m,n)]", pro2_1_swap, g()),
        Row("th21_lcm", "(n,m)-A-normal => T^lcm(n,m) and T^nm A-normal", th21_lcm,
            {k: v for k, v in g().items() if k != "general_in_BA"}),
        Row("pro22_xyz", "X, Y, Z commutator characterisations", pro22_xyz, g()),
        Row("conj_isometry", "V A-isometry, PT=TP, PV=VP, T (n,m) => V T V# (n,m)", conj_isometry,
            {"isometry_V": b_isometry}),
        Row("prod_selfadj", "TS=ST, ST#=T#S, T (n,n), S A-selfadjoint => TS (n,n)", prod_selfadj,
            {"commuting_pair": b_pair("selfadjoint", True)}),
        Row("prod_normal", "TS=ST, ST#=T#S, T (n,n), S A-normal => TS (n,n)", prod_normal,
            {"commuting_pair": b_pair("normal", True)}),
        Row("pro24_induction", "(2,m) and (3,m) => (k,m) for 4 <= k <= 8", pro24_induction,
            g(nil=lambda idx: 2, powers=_div_m)),
        Row("pro25_step", "(n,m) and (n+1,m) => (n+2,m)", pro25_step, g()),
        Row("pro26_injective", "T injective, (n,m) and (n+1,m) => (1,m)", pro26_injective,
            _injective_families(False)),
        Row("pro27_dual", "(n,2),(n,3) => (n,k) for k <= 8; (n,m),(n,m+1) => (n,m+2)", pro27_dual,
            g(nil=lambda idx: idx.n, powers=_div_nm)),
        Row("pro29_sharp_injective", "T# injective, (n,m) and (n,m+1) => (n,1)", pro29_sharp_injective,
            _injective_families(True)),
        Row("th23_partial", "T^m a partial isometry in the A sense => (n+m,m); dual for m >= n",
            th23_partial, {"partial_isometry": b_partial_isometry(lambda idx: min(idx.n, idx.m))}),
        Row("sq_identity_normal", "(n,m)-A-normal => T^2n (T#)^2m = (T^n (T#)^m)^2",
            sq_identity_normal, g()),
        Row("proAA_fuglede", "AT=TA, PT=TP, T^n normal => (n,k) for k <= 8", proAA_fuglede,
            _fuglede_families(_div_n)),
        Row("corAA_lcm", "AT=TA, PT=TP, [T^n,(T*)^m]=0 => (lcm(n,m),r) for r <= 8", corAA_lcm,
            _fuglede_families(_div_nm)),
        Row("thm3_1_fwd", "(n,m)-QN => form equality and range condition", thm3_1_fwd, g()),
        Row("thm3_1_bwd", "form equality and range condition => (n,m)-QN", thm3_1_bwd, g()),
        Row("pro3_1_product", "pairwise commuting (n,m)-A-normal T, S => TS (n,m)-QN", pro3_1_product,
            {"commuting_pair": b_pair("class", False)}),
        Row("pro33_step", "(n,m)-QN and (n+1,m)-QN => (n+2,m)-QN", pro33_step, g()),
        Row("th31_partial", "(n,m)-QN, n >= m, T^m a partial isometry => (n+m,m)-QN", th31_partial,
            {"partial_isometry": b_partial_isometry(lambda idx: idx.n)}),
        Row("pro34_1", "T injective, (n,m)-QN and (n+1,m)-QN => (1,m)-QN", pro34_1,
            _injective_families(False)),
        Row("pro34_2", "T* injective, rank (T#)^m T = rank A, (n,m),(n,m+1)-QN => (n,1)-A-normal",
            pro34_2, _injective_families(True, powers=_div_n)),
        Row("pro35_induction", "(2,m)-QN and (3,m)-QN => (k,m)-QN for 4 <= k <= 8", pro35_induction,
            g(nil=lambda idx: 2, powers=_div_m)),
        Row("th37_equiv", "T^(m-1) full rank, AT=TA, PT=TP => [QN <=> C commutes with Re, Im]",
            th37_equiv, _fuglede_families(_div_nm)),
        Row("th2_2_bcond", "full rank, AT=TA, PT=TP, B conditions => (m,m)-QN", th2_2_bcond,
            _fuglede_families(_div_m)),
        Row("sq_identity_qn", "(n,m)-QN => (T#)^2m T^2n = ((T#)^m T^n)^2", sq_identity_qn, g()),
        Row("remark_inclusion", "(n,m)-A-normal => (n,m)-QN", remark_inclusion, g()),
    ]


REGISTRY: dict[str, Row] = {row.id: row for row in _rows()}


def get_row(check_id: str) -> Row:
    try:
        return REGISTRY[check_id]
    except KeyError:
        raise UnknownCheckError(f"unknown check id {check_id!r}") from None


def _as_indices(indices) -> list[ClassIndex]:
    if isinstance(indices, ClassIndex):
        return [indices]
    if isinstance(indices, tuple) and len(indices) == 2 and all(isinstance(v, int) for v in indices):
        return [ClassIndex(*indices)]
    return [i if isinstance(i, ClassIndex) else ClassIndex(*i) for i in indices]


def aggregate(check_id: str, parts: list[PartResult], witness: dict | None = None) -> CheckReport:
    """Combine parts: satisfied if any part is, conclusion the worst over satisfied parts."""
    statuses = [p.premise for p in parts]
    if PremiseStatus.SATISFIED in statuses:
        premise = PremiseStatus.SATISFIED
    elif PremiseStatus.INDETERMINATE in statuses:
        premise = PremiseStatus.INDETERMINATE
    else:
        premise = PremiseStatus.VACUOUS
    satisfied = [p for p in parts if p.premise is PremiseStatus.SATISFIED]
    conclusion = all_of(p.conclusion for p in satisfied) if satisfied else None
    residuals = [(f"{p.label}{p.index}:{name}", v) for p in parts for name, v in p.residuals()]
    failed = [p for p in satisfied if p.conclusion is Verdict.FAIL]
    wit = None
    if failed:
        wit = dict(witness or {})
        wit["check_id"] = check_id
        wit["failing_parts"] = [p.to_dict() for p in failed]
    return CheckReport(check_id, premise, conclusion, wit, residuals, tuple(parts))


def run_check(check_id: str, instance: Instance, indices, witness: dict | None = None) -> CheckReport:
    """Evaluate registry row ``check_id`` on ``instance`` for every index in ``indices``."""
    row = get_row(check_id)
    E = Eval(instance)
    parts = []
    for idx in _as_indices(indices):
        parts.extend(row.evaluate(E, idx))
    if witness is None:
        witness = {"spec": instance.spec.to_dict()}
    return aggregate(check_id, parts, witness)
