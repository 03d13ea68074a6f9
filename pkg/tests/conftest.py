import numpy as np
import pytest

import freedim as fd

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def embed_c_m2(c, m):
    """c (+) m inside the 3x3 carrier of C (+) M2."""
    out = np.zeros((3, 3), dtype=complex)
    out[0, 0] = c
    out[1:, 1:] = m
    return out


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + m.conj().T) / 2.0


def make_c2():
    return fd.build_algebra([1, 1], [0.5, 0.5], [np.diag([0.0, 1.0]).astype(complex)])


def make_m2():
    return fd.build_algebra([2], [1.0], [SX.copy(), SZ.copy()])


def make_c1m2():
    return fd.build_algebra(
        [1, 2], [1 / 3, 2 / 3], [embed_c_m2(1.0, SX), embed_c_m2(0.0, SZ)]
    )


def invariant_complement(gns, K_small, K_big, n):
    """Orthogonal complement of K_small inside K_big (drops noise rows)."""
    rows = K_big.flat() - (K_big.flat() @ K_small.flat().conj().T) @ K_small.flat()
    norms = np.linalg.norm(rows, axis=1)
    rows = rows[norms > 1e-8]
    if rows.shape[0] == 0:
        return fd.hs_subspace(gns, np.zeros((0,)), n=n)
    flat = fd.numerical_span(rows, dim=K_big.ambient_dim)
    return fd.hs_subspace(gns, flat.reshape(-1, n, gns.dim, gns.dim))


@pytest.fixture
def c2():
    return make_c2()


@pytest.fixture
def m2():
    return make_m2()


@pytest.fixture
def c1m2():
    return make_c1m2()
