"""Randomised registry suite: premise-biased sampling of every row."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np

from ..classes import ClassIndex
from ..errors import InvalidInputError, NmNormalError, UnknownCheckError
from ..numerics import DEFAULT_TOLERANCE, Tolerance, Verdict
from .generators import FAMILIES, generate
from .registry import REGISTRY, PremiseStatus, run_check

CONFIG_KEYS = {"dims", "index_max", "trials", "max_attempts", "seed", "checks", "families", "tolerance"}
# Failures kept per row in the report.
MAX_WITNESSES = 10


@dataclass(frozen=True)
class SuiteConfig:
    """Suite parameters; ``trials`` is the number of premise-satisfied instances sought per row."""

    dims: tuple[int, int] = (2, 5)
    index_max: int = 4
    trials: int = 200
    max_attempts: int | None = None
    seed: int = 42
    checks: tuple[str, ...] | None = None
    families: tuple[str, ...] | None = None
    tolerance: Tolerance = DEFAULT_TOLERANCE

    def __post_init__(self):
        lo, hi = self.dims
        if not 2 <= lo <= hi <= 16:
            raise InvalidInputError(f"dims must satisfy 2 <= lo <= hi <= 16, got {list(self.dims)}")
        if not 1 <= self.index_max <= 8:
            raise InvalidInputError(f"index_max must lie in [1, 8], got {self.index_max}")
        if self.trials < 1:
            raise InvalidInputError(f"trials must be at least 1, got {self.trials}")
        if self.max_attempts is not None and self.max_attempts < self.trials:
            raise InvalidInputError("max_attempts must be at least trials")
        if not 0 <= self.seed < 2**63:
            raise InvalidInputError(f"seed must be a nonnegative 63-bit integer, got {self.seed}")
        for c in self.checks or ():
            if c not in REGISTRY:
                raise UnknownCheckError(f"unknown check id {c!r}")
        for f in self.families or ():
            if f not in FAMILIES:
                raise InvalidInputError(f"unknown family {f!r}")

    @property
    def attempts_cap(self) -> int:
        return self.max_attempts if self.max_attempts is not None else 10 * self.trials

    def selected_checks(self) -> list[str]:
        return sorted(self.checks) if self.checks else sorted(REGISTRY)

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "index_max": self.index_max,
            "trials": self.trials,
            "max_attempts": self.attempts_cap,
            "seed": self.seed,
            "checks": self.selected_checks(),
            "families": None if self.families is None else sorted(self.families),
            "tolerance": self.tolerance.to_dict(),
        }

    @classmethod
    def from_dict(cls, obj) -> "SuiteConfig":
        if not isinstance(obj, dict):
            raise InvalidInputError("config must be a JSON object")
        unknown = set(obj) - CONFIG_KEYS
        if unknown:
            raise InvalidInputError(f"unknown config keys: {sorted(unknown)}")

        def integer(name, value):
            if isinstance(value, bool) or not isinstance(value, int):
                raise InvalidInputError(f"{name} must be an integer, got {value!r}")
            return value

        kw = {}
        if "dims" in obj:
            d = obj["dims"]
            if not isinstance(d, list) or len(d) != 2:
                raise InvalidInputError("dims must be a list [lo, hi]")
            kw["dims"] = (integer("dims[0]", d[0]), integer("dims[1]", d[1]))
        for key in ("index_max", "trials", "seed"):
            if key in obj:
                kw[key] = integer(key, obj[key])
        if obj.get("max_attempts") is not None:
            kw["max_attempts"] = integer("max_attempts", obj["max_attempts"])
        for key in ("checks", "families"):
            if obj.get(key) is not None:
                v = obj[key]
                if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
                    raise InvalidInputError(f"{key} must be a list of strings")
                kw[key] = tuple(v)
        if "tolerance" in obj:
            t = obj["tolerance"]
            if not isinstance(t, dict) or set(t) - set(DEFAULT_TOLERANCE.to_dict()):
                raise InvalidInputError("tolerance must be an object with Tolerance fields")
            for k, v in t.items():
                if isinstance(v, bool) or not isinstance(v, (int, float)):
                    raise InvalidInputError(f"tolerance.{k} must be a number")
            kw["tolerance"] = Tolerance(**{**DEFAULT_TOLERANCE.to_dict(), **t})
        return cls(**kw)


@dataclass
class RowSummary:
    check_id: str
    families: list[str]
    attempts: int = 0
    satisfied: int = 0
    vacuous: int = 0
    indeterminate_premise: int = 0
    passed: int = 0
    failed: int = 0
    indeterminate: int = 0
    errors: int = 0
    max_pass_residual: float = 0.0
    witnesses: list = field(default_factory=list)
    error_messages: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if not self.families:
            return "not_applicable"
        if self.failed:
            return "fail"
        if self.satisfied == 0:
            return "vacuous_only"
        return "ok"

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "status": self.status,
            "families": self.families,
            "attempts": self.attempts,
            "premise": {
                "satisfied": self.satisfied,
                "vacuous": self.vacuous,
                "indeterminate": self.indeterminate_premise,
            },
            "conclusion": {
                "pass": self.passed,
                "fail": self.failed,
                "indeterminate": self.indeterminate,
            },
            "errors": self.errors,
            "max_pass_residual": self.max_pass_residual,
            "witnesses": self.witnesses,
            "error_messages": self.error_messages,
        }


@dataclass
class SuiteReport:
    config: SuiteConfig
    rows: list[RowSummary]

    @property
    def ok(self) -> bool:
        return all(r.status in ("ok", "not_applicable") for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "ok": self.ok,
            "rows": [r.to_dict() for r in self.rows],
        }

    def table(self) -> str:
        head = (f"{'check':24s} {'status':14s} {'tries':>6s} {'sat':>5s} {'vac':>5s} {'?prem':>5s} "
                f"{'pass':>5s} {'fail':>5s} {'?conc':>5s} {'err':>4s}")
        lines = [head, "-" * len(head)]
        for r in self.rows:
            lines.append(
                f"{r.check_id:24s} {r.status:14s} {r.attempts:6d} {r.satisfied:5d} {r.vacuous:5d} "
                f"{r.indeterminate_premise:5d} {r.passed:5d} {r.failed:5d} {r.indeterminate:5d} "
                f"{r.errors:4d}"
            )
        return "\n".join(lines)


def attempt_rng(seed: int, check_id: str, attempt: int) -> np.random.Generator:
    """Independent stream per (suite seed, row, attempt)."""
    return np.random.default_rng([seed, zlib.crc32(check_id.encode()), attempt])


def run_row(check_id: str, config: SuiteConfig) -> RowSummary:
    row = REGISTRY[check_id]
    allowed = sorted(f for f in row.families if config.families is None or f in config.families)
    summary = RowSummary(check_id, allowed)
    if not allowed:
        return summary
    for attempt in range(config.attempts_cap):
        if summary.satisfied >= config.trials:
            break
        rng = attempt_rng(config.seed, check_id, attempt)
        n, m = (int(v) for v in rng.integers(1, config.index_max + 1, size=2))
        idx = ClassIndex(n, m)
        family = allowed[int(rng.integers(len(allowed)))]
        spec = row.families[family](rng, idx, config.dims)
        summary.attempts += 1
        meta = {"attempt_seed": [config.seed, check_id, attempt], "family": family,
                "spec": spec.to_dict(), "index": [n, m]}
        try:
            report = run_check(check_id, generate(spec, config.tolerance), idx, witness=meta)
        except NmNormalError as exc:
            summary.errors += 1
            if len(summary.error_messages) < MAX_WITNESSES:
                summary.error_messages.append({**meta, "error": f"{type(exc).__name__}: {exc}"})
            continue
        if report.premise is PremiseStatus.VACUOUS:
            summary.vacuous += 1
            continue
        if report.premise is PremiseStatus.INDETERMINATE:
            summary.indeterminate_premise += 1
            continue
        summary.satisfied += 1
        if report.conclusion is Verdict.PASS:
            summary.passed += 1
            # equivalence residuals carry the failing side too, so they are left out
            worst = max((c.residual for p in report.parts if p.conclusion is Verdict.PASS
                         for c in p.conclusions if "<=>" not in c.predicate_name), default=0.0)
            summary.max_pass_residual = max(summary.max_pass_residual, float(worst))
        elif report.conclusion is Verdict.FAIL:
            summary.failed += 1
            if len(summary.witnesses) < MAX_WITNESSES:
                summary.witnesses.append(report.witness)
        else:
            summary.indeterminate += 1
    return summary


def run_suite(config: SuiteConfig) -> SuiteReport:
    return SuiteReport(config, [run_row(c, config) for c in config.selected_checks()])
