import json
import subprocess
import sys

import numpy as np
import pytest

from nmnormal.cli import main
from nmnormal.io import dumps, matrix_to_json

from conftest import PAPER_A, PAPER_T


def write_matrix(path, M):
    path.write_text(dumps(matrix_to_json(np.asarray(M, dtype=complex))))
    return str(path)


@pytest.fixture
def paper_files(tmp_path):
    return write_matrix(tmp_path / "A.json", PAPER_A), write_matrix(tmp_path / "T.json", PAPER_T)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_paper_example(capsys, paper_files):
    A, T = paper_files
    code, out, _ = run(capsys, "classify", "--metric", A, "--operator", T, "-n", "2", "-m", "1")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["nm_normal"]["verdict"] == "pass"
    assert rep["results"]["nm_quasinormal"]["verdict"] == "pass"
    assert rep["results"]["basic"]["a_normal"]["verdict"] == "fail"
    assert rep["version"] and len(rep["inputs"]["metric"]["sha256"]) == 64
    assert rep["tolerance"]["residual_tol"] == 1e-9

    code, out, _ = run(capsys, "classify", "--metric", A, "--operator", T, "-n", "1", "-m", "1")
    assert json.loads(out)["results"]["nm_normal"]["verdict"] == "fail"


def test_classify_hermitian_identity_metric(capsys, tmp_path):
    A = write_matrix(tmp_path / "A.json", np.eye(2))
    # Hermitian and unitary, so the isometry predicates hold too
    T = write_matrix(tmp_path / "T.json", [[0, 1], [1, 0]])
    code, out, _ = run(capsys, "classify", "--metric", A, "--operator", T)
    res = json.loads(out)["results"]
    assert code == 0
    verdicts = [v["verdict"] for v in res["basic"].values()]
    verdicts += [res["nm_normal"]["verdict"], res["nm_quasinormal"]["verdict"]]
    assert set(verdicts) == {"pass"}


def test_classify_not_in_BA(capsys, tmp_path):
    A = write_matrix(tmp_path / "A.json", np.diag([1, 0]))
    T = write_matrix(tmp_path / "T.json", [[0, 1], [0, 0]])
    code, out, err = run(capsys, "classify", "--metric", A, "--operator", T)
    assert code == 2 and out == ""
    assert "not in B_A" in err and "N(A)" in err
    code, out, _ = run(capsys, "classify", "--metric", A, "--operator", T, "--force")
    assert code == 0
    assert json.loads(out)["results"]["membership"]["in_B_A"] == "fail"


def test_classify_input_errors_are_distinct(capsys, tmp_path, paper_files):
    A, T = paper_files
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    big = write_matrix(tmp_path / "big.json", np.eye(3))
    nan = tmp_path / "nan.json"
    nan.write_text('{"rows": 1, "cols": 1, "data": [[[NaN, 0]]]}')
    messages = []
    for metric, operator in [(str(tmp_path / "none.json"), T), (str(bad), T), (big, T), (str(nan), T)]:
        code, _, err = run(capsys, "classify", "--metric", metric, "--operator", operator)
        assert code == 2
        messages.append(err)
    assert "file not found" in messages[0]
    assert "malformed JSON" in messages[1]
    assert "does not match" in messages[2]
    assert "non-finite" in messages[3]


def test_classify_rejects_non_psd_metric(capsys, tmp_path, paper_files):
    _, T = paper_files
    A = write_matrix(tmp_path / "A.json", np.diag([1, -1]))
    code, _, err = run(capsys, "classify", "--metric", A, "--operator", T)
    assert code == 2 and "positive semidefinite" in err


def test_classify_tolerance_flags(capsys, paper_files):
    A, T = paper_files
    code, out, _ = run(capsys, "classify", "--metric", A, "--operator", T, "--tol-residual", "1e-8",
                       "--margin", "1e-5", "--tol-rank", "1e-12")
    tol = json.loads(out)["tolerance"]
    assert tol == {"rank_cutoff": 1e-12, "residual_tol": 1e-8, "distinctness_margin": 1e-5}
    code, _, err = run(capsys, "classify", "--metric", A, "--operator", T, "--tol-residual", "1e-3")
    assert code == 2 and "residual_tol" in err


def test_classify_shift(capsys, tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps({"weights": {"period": [1]}, "metric": {"period": [1]}}))
    code, out, _ = run(capsys, "classify", "--shift", str(p), "--exact", "-n", "2", "-m", "1")
    res = json.loads(out)["results"]
    assert code == 0
    assert res["nm_quasinormal"]["verdict"] == "pass"
    assert res["nm_normal"]["verdict"] == "fail" and res["nm_normal"]["witness_k"] == 1
    code, out, _ = run(capsys, "classify", "--shift", str(p), "--section", "12")
    assert code == 0 and json.loads(out)["results"]["exact"] is False


def test_reports_are_byte_identical(capsys, paper_files, tmp_path):
    A, T = paper_files
    outs = []
    for name in ("r1.json", "r2.json"):
        path = tmp_path / name
        assert main(["classify", "--metric", A, "--operator", T, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rep = json.loads(outs[0])
    assert json.loads(dumps(rep)) == rep


def test_verify_paper_example_only(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["thm2_1_fwd"], "families": ["paper_example"], "trials": 3}))
    code, out, err = run(capsys, "verify", "--config", str(cfg))
    assert code == 0
    assert "thm2_1_fwd" in err
    rep = json.loads(out)
    assert rep["results"]["ok"] and len(rep["inputs"]["config"]["sha256"]) == 64


@pytest.mark.parametrize("body", ['{"trials": 0}', '{"bogus": 1}', '{"checks": ["nope"]}', "[1"])
def test_verify_bad_config(capsys, tmp_path, body):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(body)
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 2 and out == ""


def test_verify_vacuous_row_fails(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"checks": ["remark_inclusion"], "families": ["general_in_BA"],
                               "trials": 2, "max_attempts": 3}))
    code, out, _ = run(capsys, "verify", "--config", str(cfg))
    assert code == 1
    assert json.loads(out)["results"]["rows"][0]["status"] == "vacuous_only"


def test_search_shift_witness(capsys, tmp_path):
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "search", "qn_not_normal(2,1)", "--domain", "shift", "--witness-out", str(w))
    assert code == 0
    assert json.loads(w.read_text())["shift"]["weights"]["period"] == [[1, 1]]


def test_search_not_normal_dense(capsys, tmp_path):
    w = tmp_path / "w.json"
    code, out, _ = run(capsys, "search", "not_normal(1,1)", "--dim", "2", "--budget", "10000",
                       "--witness-out", str(w))
    assert code == 0
    assert json.loads(w.read_text())["verdicts"][0]["verdict"] == "fail"


def test_search_exit_codes(capsys):
    code, out, _ = run(capsys, "search", "qn_not_normal(2,1)", "--budget", "50")
    assert code == 3 and json.loads(out)["results"]["status"] == "exhausted"
    code, _, err = run(capsys, "search", "qn_not_normal(2,1)", "--budget", "0")
    assert code == 2 and "budget" in err
    code, _, err = run(capsys, "search", "bogus(1,1)")
    assert code == 2 and "unknown search target" in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["classify", "-n", "x"])
    assert exc.value.code == 2


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "nmnormal", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "nmnormal" in proc.stdout
