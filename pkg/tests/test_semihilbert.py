import numpy as np
import pytest
import scipy.linalg

from nmnormal.errors import NegativeEigenvalueError, NotHermitianError, NotInBAError, NotInBUpperAError
from nmnormal.numerics import Verdict
from nmnormal.semihilbert import (
    a_adjoint,
    double_sharp,
    make_context,
    membership,
    operator_seminorm,
    re_im_parts,
    semi_inner_product,
    vector_seminorm,
)

from conftest import PAPER_SHARP, random_complex, random_in_BA, random_metric


def test_context_of_diagonal_metric(paper):
    A, _ = paper
    ctx = make_context(A)
    np.testing.assert_allclose(ctx.A_dagger, np.diag([1.0, 0.5]), atol=1e-15)
    np.testing.assert_allclose(ctx.P, np.eye(2), atol=1e-15)
    assert ctx.rank == 2 and ctx.invertible


def test_context_singular_metric():
    ctx = make_context(np.diag([3.0, 0.0, 0.0]))
    assert ctx.rank == 1
    np.testing.assert_allclose(ctx.P, np.diag([1.0, 0.0, 0.0]), atol=1e-15)
    np.testing.assert_allclose(ctx.A_half, np.diag([np.sqrt(3.0), 0, 0]), atol=1e-15)


def test_metric_validation():
    with pytest.raises(NotHermitianError):
        make_context(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(NegativeEigenvalueError):
        make_context(np.diag([1.0, -0.5]))


def test_semi_inner_product_matches_definition(rng):
    A, _, _ = random_metric(rng, 4, rank=2)
    ctx = make_context(A)
    h, k = random_complex(rng, 4, 1)[:, 0], random_complex(rng, 4, 1)[:, 0]
    assert np.isclose(semi_inner_product(ctx, h, k), np.vdot(k, A @ h))
    assert np.isclose(vector_seminorm(ctx, h) ** 2, np.vdot(h, A @ h).real)
    # a null vector of A has zero seminorm
    null = np.linalg.eigh(A)[1][:, 0]
    assert vector_seminorm(ctx, null) < 1e-7


def test_paper_a_adjoint(paper):
    A, T = paper
    op = a_adjoint(make_context(A), T)
    assert np.max(np.abs(op.T_sharp - PAPER_SHARP)) <= 1e-12


@pytest.mark.parametrize("rank", [None, 1, 3])
def test_a_adjoint_defining_property(rng, rank):
    # <T h | k>_A = <h | T# k>_A for all h, k, and R(T#) lies in R(A)
    A, Q, r = random_metric(rng, 5, rank)
    ctx = make_context(A)
    T = random_in_BA(rng, Q, r)
    op = a_adjoint(ctx, T)
    for _ in range(5):
        h, k = random_complex(rng, 5, 1)[:, 0], random_complex(rng, 5, 1)[:, 0]
        lhs = np.vdot(k, A @ (T @ h))
        rhs = np.vdot(op.T_sharp @ k, A @ h)
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(h) * np.linalg.norm(k) * 10
    np.testing.assert_allclose(ctx.P @ op.T_sharp, op.T_sharp, atol=1e-10)


def test_a_adjoint_is_minimal_norm_solution(rng):
    # oracle: column-wise least squares for A X = T* A gives the reduced solution
    A, Q, r = random_metric(rng, 4, 2)
    ctx = make_context(A)
    T = random_in_BA(rng, Q, r)
    X = np.linalg.lstsq(A, T.conj().T @ A, rcond=1e-10)[0]
    np.testing.assert_allclose(a_adjoint(ctx, T).T_sharp, X, atol=1e-9)


def test_identity_metric_gives_ordinary_adjoint(rng):
    T = random_complex(rng, 4)
    op = a_adjoint(make_context(np.eye(4)), T)
    np.testing.assert_allclose(op.T_sharp, T.conj().T, atol=1e-14)


def test_non_member_rejected():
    ctx = make_context(np.diag([1.0, 0.0]))
    T = np.array([[0.0, 1.0], [0.0, 0.0]])
    mem = membership(ctx, T)
    assert mem.in_B_A is Verdict.FAIL and mem.in_B_upper_A is Verdict.FAIL
    assert mem.bound_constant is None
    with pytest.raises(NotInBAError, match="N\\(A\\)"):
        a_adjoint(ctx, T)
    with pytest.raises(NotInBUpperAError):
        operator_seminorm(ctx, T)


def test_member_membership_record(rng):
    A, Q, r = random_metric(rng, 4, 2)
    ctx = make_context(A)
    mem = membership(ctx, random_in_BA(rng, Q, r))
    assert mem.in_B_A is Verdict.PASS and mem.in_B_upper_A is Verdict.PASS
    assert mem.bound_constant > 0
    assert "finite dimensions" in mem.note


def test_paper_seminorm(paper):
    A, T = paper
    assert abs(operator_seminorm(make_context(A), T) - 2 * np.sqrt(2)) <= 1e-12


def test_seminorm_against_generalised_eigenproblem(rng):
    # oracle: max of h* T* A T h / h* A h for invertible A
    A, Q, _ = random_metric(rng, 5)
    T = random_complex(rng, 5)
    w = scipy.linalg.eigh(T.conj().T @ A @ T, A, eigvals_only=True)
    assert np.isclose(operator_seminorm(make_context(A), T), np.sqrt(w[-1]), rtol=1e-10)


def test_double_sharp_is_PTP(rng):
    A, Q, r = random_metric(rng, 5, 3)
    ctx = make_context(A)
    T = random_in_BA(rng, Q, r)
    op = a_adjoint(ctx, T)
    np.testing.assert_allclose(double_sharp(ctx, op), ctx.P @ T @ ctx.P, atol=1e-10)


def test_paper_real_part(paper):
    A, T = paper
    re, im = re_im_parts(a_adjoint(make_context(A), T))
    np.testing.assert_allclose(re, [[2, 1], [0.5, -2]], atol=1e-14)
    np.testing.assert_allclose(re + 1j * im, T, atol=1e-14)


def test_product_rule(rng):
    A, Q, r = random_metric(rng, 6, 4)
    ctx = make_context(A)
    T, S = random_in_BA(rng, Q, r), random_in_BA(rng, Q, r)
    lhs = a_adjoint(ctx, T @ S).T_sharp
    rhs = a_adjoint(ctx, S).T_sharp @ a_adjoint(ctx, T).T_sharp
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


def test_zero_operator_has_zero_adjoint():
    ctx = make_context(np.diag([1.0, 0.0]))
    op = a_adjoint(ctx, np.zeros((2, 2)))
    assert np.all(op.T_sharp == 0)
    assert op.sharp_scale == 0.0
