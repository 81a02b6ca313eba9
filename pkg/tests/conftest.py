import math

import numpy as np
import pytest
from scipy.linalg import subspace_angles

from bnst.channel import ChannelProcess


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2)


def random_hermitian(rng, n):
    A = crandn(rng, n, n)
    return (A + A.conj().T) / 2


def random_unitary(rng, n):
    Q, R = np.linalg.qr(crandn(rng, n, n))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def principal_angle(A, B):
    """Largest principal angle between the column spans of A and B."""
    return float(np.max(subspace_angles(A, B)))


def exact_null_space(H):
    """Null space from numpy's SVD, independent of the package kernel."""
    _, s, vh = np.linalg.svd(np.atleast_2d(H))
    rank = int(np.sum(s > 1e-12 * s.max()))
    return vh[rank:].conj().T


def static_channel(rows, cols, seed):
    """Zero-Doppler process: a fixed random matrix sampled through the API."""
    return ChannelProcess(rows, cols, 0.0, seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


# acceptance results, filled by test_acceptance.py and printed at the end
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE):
        terminalreporter.write_line(line[1])
