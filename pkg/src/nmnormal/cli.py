"""Command-line front end.

Exit codes: 0 success, 1 internal error (or a registry failure), 2 invalid
input or configuration, 3 search exhausted.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__, shiftcalc
from .classes import (
    ClassIndex,
    basic_class_predicates,
    nm_normal_residual,
    nm_quasinormal_residual,
)
from .errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvariantError,
    NmNormalError,
    NotInBAError,
    UnknownCheckError,
    UnknownTargetError,
)
from .io import dumps, matrix_from_json, matrix_to_json, read_json
from .lab.search import DOMAINS, search
from .lab.suite import SuiteConfig, run_suite
from .numerics import DEFAULT_TOLERANCE, Tolerance, Verdict
from .semihilbert import a_adjoint, make_context, membership, operator_seminorm

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3

# Default size of the finite section used for shift input without --exact.
DEFAULT_SECTION = 24


def build_parser() -> argparse.ArgumentParser:
    # argparse exits with status 2 on usage errors, matching EXIT_INVALID
    p = argparse.ArgumentParser(prog="nmnormal", description="(n,m)-A-normal and quasinormal operator toolkit")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def tolerance_flags(q):
        q.add_argument("--tol-residual", type=float, default=None, help="pass-zone threshold")
        q.add_argument("--tol-rank", type=float, default=None, help="relative singular value cutoff")
        q.add_argument("--margin", type=float, default=None, help="fail-zone threshold")

    c = sub.add_parser("classify", help="classify one operator")
    c.add_argument("--metric", help="metric A as matrix JSON")
    c.add_argument("--operator", help="operator T as matrix JSON")
    c.add_argument("--shift", help="weighted shift JSON (instead of --metric/--operator)")
    c.add_argument("--exact", action="store_true", help="decide shift input exactly")
    c.add_argument("--section", type=int, default=DEFAULT_SECTION,
                   help="finite-section size for shift input without --exact")
    c.add_argument("-n", type=int, default=1)
    c.add_argument("-m", type=int, default=1)
    c.add_argument("--force", action="store_true",
                   help="report a failed membership test instead of exiting with status 2")
    c.add_argument("--out", help="write the report here instead of stdout")
    tolerance_flags(c)

    v = sub.add_parser("verify", help="run the statement registry suite")
    v.add_argument("--config", help="suite configuration JSON (defaults apply when omitted)")
    v.add_argument("--out", help="write the report here instead of stdout")

    s = sub.add_parser("search", help="search for a class-separating witness")
    s.add_argument("target", help="not_normal(n,m) or qn_not_normal(n,m)")
    s.add_argument("--dim", type=int, default=2)
    s.add_argument("--budget", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--domain", choices=DOMAINS, default="dense")
    s.add_argument("--witness-out", help="write the witness here when one is found")
    s.add_argument("--out", help="write the report here instead of stdout")
    tolerance_flags(s)
    return p


def _tolerance(args) -> Tolerance:
    base = DEFAULT_TOLERANCE
    return Tolerance(
        rank_cutoff=base.rank_cutoff if args.tol_rank is None else args.tol_rank,
        residual_tol=base.residual_tol if args.tol_residual is None else args.tol_residual,
        distinctness_margin=base.distinctness_margin if args.margin is None else args.margin,
    )


def _report(command: str, inputs: dict, tol: Tolerance | None, results, status: int) -> dict:
    return {
        "tool": "nmnormal",
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "tolerance": None if tol is None else tol.to_dict(),
        "results": results,
        "exit_status": status,
    }


def _emit(report: dict, out: str | None) -> None:
    text = dumps(report)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- classify


def _classify_dense(A, T, idx: ClassIndex, tol: Tolerance, force: bool) -> tuple[dict, int]:
    ctx = make_context(A, tol)
    mem = membership(ctx, T)
    results = {"dim": ctx.dim, "metric_rank": ctx.rank, "membership": mem.to_dict()}
    if mem.in_B_A is not Verdict.PASS:
        if not force:
            raise NotInBAError(
                f"T is not in B_A: membership {mem.in_B_A.value} "
                f"(residual {mem.residuals['in_B_A']:.3g}); T must map N(A) into N(A). "
                "Use --force to report this as the result"
            )
        return results, EXIT_OK
    op = a_adjoint(ctx, T)
    results["a_adjoint"] = matrix_to_json(op.T_sharp)
    results["operator_seminorm"] = operator_seminorm(ctx, T)
    results["basic"] = {k: v.to_dict() for k, v in basic_class_predicates(op).items()}
    results["nm_normal"] = nm_normal_residual(op, idx).to_dict()
    results["nm_quasinormal"] = nm_quasinormal_residual(op, idx).to_dict()
    return results, EXIT_OK


def cmd_classify(args) -> tuple[dict, int]:
    tol = _tolerance(args)
    idx = ClassIndex(args.n, args.m)
    inputs = {}
    if args.shift:
        if args.metric or args.operator:
            raise InvalidInputError("give either --shift or --metric/--operator, not both")
        obj, digest = read_json(args.shift, "shift")
        inputs["shift"] = {"path": args.shift, "sha256": digest}
        S = shiftcalc.shift_from_json(obj)
        if args.exact:
            results = {
                "exact": True,
                "nm_normal": shiftcalc.shift_class_check(S, idx, "normal").to_dict(),
                "nm_quasinormal": shiftcalc.shift_class_check(S, idx, "quasinormal").to_dict(),
            }
            return _report("classify", inputs, tol, results, EXIT_OK), EXIT_OK
        if args.section < idx.n + 3:
            raise InvalidInputError(f"--section must be at least n + 3 = {idx.n + 3}")
        A, T = shiftcalc.finite_section(S, args.section)
        results, status = _classify_dense(A, T, idx, tol, args.force)
        results = {"exact": False, "section": args.section,
                   "note": "finite section: boundary columns see truncation effects", **results}
        return _report("classify", inputs, tol, results, status), status

    if not args.metric or not args.operator:
        raise InvalidInputError("classify needs --metric and --operator (or --shift)")
    a_obj, a_digest = read_json(args.metric, "metric")
    t_obj, t_digest = read_json(args.operator, "operator")
    inputs["metric"] = {"path": args.metric, "sha256": a_digest}
    inputs["operator"] = {"path": args.operator, "sha256": t_digest}
    A = matrix_from_json(a_obj, "metric")
    T = matrix_from_json(t_obj, "operator")
    if A.shape != T.shape:
        raise DimensionMismatchError(f"metric shape {A.shape} does not match operator shape {T.shape}")
    results, status = _classify_dense(A, T, idx, tol, args.force)
    return _report("classify", inputs, tol, results, status), status


# ---------------------------------------------------------------- verify


def cmd_verify(args) -> tuple[dict, int]:
    inputs = {}
    if args.config:
        obj, digest = read_json(args.config, "config")
        inputs["config"] = {"path": args.config, "sha256": digest}
        config = SuiteConfig.from_dict(obj)
    else:
        config = SuiteConfig()
    report = run_suite(config)
    sys.stderr.write(report.table() + "\n")
    status = EXIT_OK if report.ok else EXIT_INTERNAL
    return _report("verify", inputs, config.tolerance, report.to_dict(), status), status


# ---------------------------------------------------------------- search


def cmd_search(args) -> tuple[dict, int]:
    tol = _tolerance(args)
    if args.budget < 1:
        raise InvalidInputError(f"--budget must be at least 1, got {args.budget}")
    outcome = search(args.target, dim=args.dim, budget=args.budget, seed=args.seed,
                     domain=args.domain, tol=tol)
    status = EXIT_OK if outcome.found else EXIT_EXHAUSTED
    if outcome.found and args.witness_out:
        Path(args.witness_out).write_text(dumps(outcome.witness), encoding="utf-8")
    inputs = {"target": args.target, "dim": args.dim, "budget": args.budget, "seed": args.seed,
              "domain": args.domain}
    return _report("search", inputs, tol, outcome.to_dict(), status), status


COMMANDS = {"classify": cmd_classify, "verify": cmd_verify, "search": cmd_search}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        report, status = COMMANDS[args.command](args)
    except (InvalidInputError, NotInBAError, UnknownCheckError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except UnknownTargetError as exc:
        # a KeyError, whose str() would add quotes
        sys.stderr.write(f"error: {exc.args[0]}\n")
        return EXIT_INVALID
    except NmNormalError as exc:
        kind = "numerical invariant violated" if isinstance(exc, InvariantError) else "internal error"
        sys.stderr.write(f"{kind}: {exc}\n")
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort boundary
        sys.stderr.write(f"internal error: {type(exc).__name__}: {exc}\n")
        return EXIT_INTERNAL
    try:
        _emit(report, getattr(args, "out", None))
    except OSError as exc:
        sys.stderr.write(f"error: cannot write report: {exc}\n")
        return EXIT_INVALID
    return status


if __name__ == "__main__":
    sys.exit(main())
