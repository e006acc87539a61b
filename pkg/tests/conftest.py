import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_psd(rng, n, rank=None, complex_=True):
    rank = n if rank is None else rank
    A = rng.standard_normal((n, rank))
    if complex_:
        A = A + 1j * rng.standard_normal((n, rank))
    return A @ A.conj().T / rank
