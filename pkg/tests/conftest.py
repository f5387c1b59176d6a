import numpy as np
import pytest

PAPER_A = np.diag([1.0, 2.0]).astype(complex)
PAPER_T = np.array([[2, 0], [1, -2]], dtype=complex)
PAPER_SHARP = np.array([[2, 2], [0, -2]], dtype=complex)


def random_unitary(rng, dim):
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_complex(rng, rows, cols=None):
    cols = rows if cols is None else cols
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_metric(rng, dim, rank=None):
    """``(A, Q, r)``: PSD metric ``Q diag(a, 0) Q*`` with positive block first."""
    r = dim if rank is None else rank
    a = np.zeros(dim)
    a[:r] = rng.uniform(0.5, 2.0, size=r)
    Q = random_unitary(rng, dim)
    return (Q * a) @ Q.conj().T, Q, r


def random_in_BA(rng, Q, r):
    """A generic operator mapping ``N(A)`` into itself, written in the frame ``Q``."""
    dim = Q.shape[0]
    M = random_complex(rng, dim)
    M[:r, r:] = 0.0
    return Q @ M @ Q.conj().T


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def paper():
    return PAPER_A.copy(), PAPER_T.copy()
