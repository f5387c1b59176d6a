import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmnormal.errors import DimensionMismatchError, InvalidInputError, SpectrumNegativeError
from nmnormal.numerics import (
    DEFAULT_TOLERANCE,
    Tolerance,
    Verdict,
    all_of,
    commutator,
    iff,
    matrix_power,
    nonzero_zone,
    numerical_rank,
    orthogonal_projector_onto_range,
    penrose_residuals,
    pseudo_inverse,
    psd_sqrt,
    zero_zone,
)

from conftest import random_complex, random_unitary


def test_tolerance_defaults():
    t = DEFAULT_TOLERANCE
    assert (t.rank_cutoff, t.residual_tol, t.distinctness_margin) == (1e-10, 1e-9, 1e-6)


@pytest.mark.parametrize("kw", [
    {"residual_tol": 1e-5, "distinctness_margin": 1e-6},
    {"rank_cutoff": 0.0},
    {"rank_cutoff": float("nan")},
    {"residual_tol": -1.0},
])
def test_tolerance_rejects_bad_values(kw):
    with pytest.raises(InvalidInputError):
        Tolerance(**kw)


def test_three_zones():
    assert zero_zone(1e-12, DEFAULT_TOLERANCE) is Verdict.PASS
    assert zero_zone(1e-7, DEFAULT_TOLERANCE) is Verdict.INDETERMINATE
    assert zero_zone(1e-3, DEFAULT_TOLERANCE) is Verdict.FAIL
    assert nonzero_zone(0.5, DEFAULT_TOLERANCE) is Verdict.PASS
    assert nonzero_zone(1e-12, DEFAULT_TOLERANCE) is Verdict.FAIL
    assert nonzero_zone(1e-7, DEFAULT_TOLERANCE) is Verdict.INDETERMINATE


def test_verdict_combinators():
    P, F, I = Verdict.PASS, Verdict.FAIL, Verdict.INDETERMINATE
    assert all_of([P, P]) is P
    assert all_of([P, I, F]) is F
    assert all_of([P, I]) is I
    assert iff(P, P) is P and iff(F, F) is P
    assert iff(P, F) is F
    assert iff(P, I) is I


def test_pinv_of_diagonal():
    Mp = pseudo_inverse(np.diag([1.0, 2.0]))
    np.testing.assert_allclose(Mp, np.diag([1.0, 0.5]), atol=1e-15)


def test_pinv_of_zero_matrix():
    assert np.all(pseudo_inverse(np.zeros((3, 2))) == 0)
    assert pseudo_inverse(np.zeros((3, 2))).shape == (2, 3)


def test_pinv_drops_tiny_singular_values():
    M = np.diag([1.0, 1e-13])
    np.testing.assert_allclose(pseudo_inverse(M), np.diag([1.0, 0.0]))
    assert numerical_rank(M) == 1


def test_pinv_matches_numpy_full_rank(rng):
    M = random_complex(rng, 6)
    np.testing.assert_allclose(pseudo_inverse(M), np.linalg.pinv(M), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(rows=st.integers(1, 9), cols=st.integers(1, 9), rank=st.integers(0, 9),
       seed=st.integers(0, 2**32 - 1))
def test_penrose_identities(rows, cols, rank, seed):
    rng = np.random.default_rng(seed)
    rank = min(rank, rows, cols)
    M = random_complex(rng, rows, rank) @ random_complex(rng, rank, cols)
    res = penrose_residuals(M, pseudo_inverse(M))
    assert max(res.values()) <= 1e-10


def test_psd_sqrt_diagonal():
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 9.0, 0.0])), np.diag([2.0, 3.0, 0.0]))


def test_psd_sqrt_hermitian_square_back(rng):
    U = random_unitary(rng, 5)
    M = (U * np.array([3.0, 1.0, 0.2, 0.0, 0.0])) @ U.conj().T
    R = psd_sqrt(M)
    assert np.linalg.norm(R @ R - M, 2) <= 1e-12 * np.linalg.norm(M, 2)
    np.testing.assert_allclose(R, R.conj().T, atol=1e-14)
    assert np.linalg.eigvalsh(R).min() >= -1e-12


def test_psd_sqrt_non_hermitian_positive_spectrum(rng):
    G = np.eye(3) + 0.3 * random_complex(rng, 3)
    M = G @ np.diag([1.0, 2.0, 5.0]) @ np.linalg.inv(G)
    R = psd_sqrt(M)
    assert np.linalg.norm(R @ R - M, 2) <= 1e-9 * np.linalg.norm(M, 2)


def test_psd_sqrt_rejects_negative():
    with pytest.raises(SpectrumNegativeError) as err:
        psd_sqrt(np.diag([1.0, -1.0]))
    assert err.value.eigenvalues is not None


def test_psd_sqrt_rejects_complex_spectrum():
    with pytest.raises(SpectrumNegativeError):
        psd_sqrt(np.array([[0.0, -1.0], [1.0, 0.0]]))


def test_projector_properties(rng):
    M = random_complex(rng, 6, 2) @ random_complex(rng, 2, 4)
    P = orthogonal_projector_onto_range(M)
    np.testing.assert_allclose(P @ P, P, atol=1e-12)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-14)
    np.testing.assert_allclose(P @ M, M, atol=1e-12)
    assert round(np.trace(P).real) == 2


def test_commutator_shapes():
    with pytest.raises(DimensionMismatchError):
        commutator(np.eye(2), np.eye(3))
    assert np.all(commutator(np.eye(3), np.ones((3, 3))) == 0)


def test_matrix_power_rejects_negative():
    with pytest.raises(InvalidInputError):
        matrix_power(np.eye(2), -1)
    np.testing.assert_array_equal(matrix_power(np.diag([2.0, 3.0]), 0), np.eye(2))


def test_non_finite_input_rejected():
    with pytest.raises(InvalidInputError):
        pseudo_inverse(np.array([[np.nan, 0.0], [0.0, 1.0]]))
