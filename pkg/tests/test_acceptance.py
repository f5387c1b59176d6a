"""Acceptance criteria.

Each test prints one ``[acceptance k] PASS|FAIL`` line to the terminal
(outside pytest's capture) before asserting.
"""

import json
import time

import numpy as np
import pytest

from nmnormal.classes import ClassIndex, nm_normal_residual
from nmnormal.cli import main
from nmnormal.lab import generate
from nmnormal.lab.registry import REGISTRY, PremiseStatus, characterisation, run_check
from nmnormal.numerics import Verdict, penrose_residuals, pseudo_inverse, psd_sqrt
from nmnormal.semihilbert import a_adjoint, make_context
from nmnormal.shiftcalc import shift_class_check, unilateral_shift

from conftest import PAPER_A, PAPER_SHARP, PAPER_T, random_complex, random_in_BA, random_metric


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[acceptance {k}] {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return emit


@pytest.fixture(scope="module")
def default_verify(tmp_path_factory):
    out = tmp_path_factory.mktemp("verify") / "report.json"
    t0 = time.perf_counter()
    code = main(["verify", "--out", str(out)])
    elapsed = time.perf_counter() - t0
    return code, elapsed, json.loads(out.read_text())


def test_criterion_1_paper_example(report):
    t0 = time.perf_counter()
    op = a_adjoint(make_context(PAPER_A), PAPER_T)
    err = float(np.max(np.abs(op.T_sharp - PAPER_SHARP)))
    n11 = nm_normal_residual(op, ClassIndex(1, 1))
    n21 = nm_normal_residual(op, ClassIndex(2, 1))
    elapsed = time.perf_counter() - t0
    ok = (err <= 1e-12 and n11.verdict is Verdict.FAIL and n11.residual >= 1e-3
          and n21.verdict is Verdict.PASS and n21.residual <= 1e-12 and elapsed < 1.0)
    assert report(1, ok, f"paper example: max|T#-expected|={err:.1e}, (1,1) residual={n11.residual:.3g} "
                         f"{n11.verdict.value}, (2,1) residual={n21.residual:.1e} {n21.verdict.value}, "
                         f"{elapsed * 1e3:.1f} ms")


def test_criterion_2_shift_example(report):
    t0 = time.perf_counter()
    S = unilateral_shift()
    qn = shift_class_check(S, ClassIndex(2, 1), "quasinormal")
    nn = shift_class_check(S, ClassIndex(2, 1), "normal")
    elapsed = time.perf_counter() - t0
    ok = qn.passed and not nn.passed and nn.witness_k is not None and elapsed < 1.0
    assert report(2, ok, f"unilateral shift: (2,1)-QN exact {'pass' if qn.passed else 'fail'}, "
                         f"(2,1)-normal exact {'pass' if nn.passed else 'fail'} at k={nn.witness_k} "
                         f"({nn.lhs} != {nn.rhs}), {elapsed * 1e3:.1f} ms")


def test_criterion_3_characterisations(report):
    details, ok = [], True
    for quasi, row, seed in ((False, "thm2_1_fwd", 2024), (True, "thm3_1_fwd", 2025)):
        builders = REGISTRY[row].families
        families = sorted(builders)
        rng = np.random.default_rng(seed)
        agree = disagree = indeterminate = passes = 0
        trials = 1000
        for _ in range(trials):
            n, m = (int(v) for v in rng.integers(1, 4, size=2))
            idx = ClassIndex(n, m)
            family = families[int(rng.integers(len(families)))]
            inst = generate(builders[family](rng, idx, (2, 5)))
            direct, form = characterisation(inst, idx, quasi)
            if Verdict.INDETERMINATE in (direct.verdict, form.verdict):
                indeterminate += 1
            elif direct.verdict is form.verdict:
                agree += 1
                passes += direct.verdict is Verdict.PASS
            else:
                disagree += 1
        rate = indeterminate / trials
        ok = ok and disagree == 0 and rate < 0.01
        details.append(f"{'QN' if quasi else 'normal'}: {agree}/{trials - indeterminate} agree "
                       f"({passes} in class), indeterminate {rate:.1%}")
    assert report(3, ok, "characterisations over random B_A instances: " + "; ".join(details))


def test_criterion_4_default_verify(report, default_verify):
    code, elapsed, rep = default_verify
    rows = rep["results"]["rows"]
    applicable = [r for r in rows if r["status"] != "not_applicable"]
    fails = sum(r["conclusion"]["fail"] for r in rows)
    vacuous_only = [r["check_id"] for r in rows if r["status"] == "vacuous_only"]
    short = [r["check_id"] for r in applicable if r["premise"]["satisfied"] < 200]
    ok = code == 0 and fails == 0 and not vacuous_only and not short and elapsed < 60
    assert report(4, ok, f"default verify (seed {rep['results']['config']['seed']}): exit {code}, "
                         f"{len(applicable)} rows, {fails} conclusion failures, "
                         f"vacuous-only {vacuous_only or 'none'}, rows under 200 satisfied "
                         f"{short or 'none'}, {elapsed:.1f} s")


def test_criterion_5_lcm(report):
    builders = REGISTRY["th21_lcm"].families
    counts, worst = {}, 0.0
    for family in ("scalar_power", "a_normal"):
        rng = np.random.default_rng(5)
        counts[family] = 0
        attempts = 0
        while counts[family] < 100 and attempts < 2000:
            attempts += 1
            n, m = (int(v) for v in rng.integers(1, 5, size=2))
            idx = ClassIndex(n, m)
            rep = run_check("th21_lcm", generate(builders[family](rng, idx, (2, 5))), idx)
            if rep.premise is not PremiseStatus.SATISFIED:
                continue
            counts[family] += 1
            for part in rep.parts:
                for c in part.conclusions:
                    worst = max(worst, c.residual)
    ok = min(counts.values()) >= 100 and worst <= 1e-9
    assert report(5, ok, f"lcm powers A-normal: {counts} instances declared (n,m)-A-normal, "
                         f"max residual {worst:.2e}")


def test_criterion_6_squared_identities(report, default_verify):
    _, _, rep = default_verify
    rows = {r["check_id"]: r for r in rep["results"]["rows"]}
    details, ok = [], True
    for cid in ("sq_identity_normal", "sq_identity_qn"):
        r = rows[cid]
        ok = ok and (r["conclusion"]["fail"] == 0 and r["conclusion"]["indeterminate"] == 0
                     and r["max_pass_residual"] <= 1e-9 and r["premise"]["satisfied"] > 0)
        details.append(f"{cid}: {r['premise']['satisfied']} class members, "
                       f"max residual {r['max_pass_residual']:.2e}")
    assert report(6, ok, "; ".join(details))


def test_criterion_7_kernels(report):
    rng = np.random.default_rng(77)
    penrose = 0.0
    for _ in range(1000):
        rows, cols = (int(v) for v in rng.integers(1, 17, size=2))
        rank = int(rng.integers(0, min(rows, cols) + 1))
        M = random_complex(rng, rows, rank) @ random_complex(rng, rank, cols)
        M *= 10.0 ** rng.uniform(-3, 3)
        penrose = max(penrose, max(penrose_residuals(M, pseudo_inverse(M)).values()))

    sqrt_worst = 0.0
    for _ in range(1000):
        d = int(rng.integers(1, 17))
        k = int(rng.integers(0, d + 1))
        B = random_complex(rng, d, k)
        M = B @ B.conj().T
        R = psd_sqrt(M)
        nM = np.linalg.norm(M, 2)
        if nM:
            sqrt_worst = max(sqrt_worst, np.linalg.norm(R @ R - M, 2) / nM)

    product = 0.0
    for _ in range(500):
        d = int(rng.integers(2, 9))
        rank = int(rng.integers(1, d + 1))
        A, Q, r = random_metric(rng, d, rank)
        ctx = make_context(A)
        T, S = random_in_BA(rng, Q, r), random_in_BA(rng, Q, r)
        lhs = a_adjoint(ctx, T @ S).T_sharp
        rhs = a_adjoint(ctx, S).T_sharp @ a_adjoint(ctx, T).T_sharp
        bound = np.linalg.norm(ctx.A_dagger, 2) * ctx.norm * np.linalg.norm(T, 2) * np.linalg.norm(S, 2)
        product = max(product, np.linalg.norm(lhs - rhs, 2) / bound)

    ok = penrose <= 1e-10 and sqrt_worst <= 1e-9 and product <= 1e-9
    assert report(7, ok, f"kernels: Penrose max {penrose:.1e} (1000 matrices), psd_sqrt square-back "
                         f"max {sqrt_worst:.1e} (1000), (TS)# = S#T# max {product:.1e} (500 pairs)")
