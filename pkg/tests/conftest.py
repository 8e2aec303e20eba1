"""Shared independent oracles.

The dense oracle builds matrices from 2x2 blocks with ``np.kron`` and knows
nothing about masks.  Local basis order is (down, up) and the highest site is
the leftmost Kronecker factor, matching integer bit-pattern indexing.
"""

from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, 1j], [-1j, 0]], dtype=complex)
Z2 = np.diag([-1.0, 1.0]).astype(complex)
LETTERS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def kron_oracle(letters: str) -> np.ndarray:
    """Dense matrix of a letter word; ``letters[a]`` acts on site ``a``."""
    return reduce(np.kron, [LETTERS[c] for c in reversed(letters)])


def site_op(mat: np.ndarray, site: int, n: int) -> np.ndarray:
    mats = [I2] * n
    mats[site] = mat
    return reduce(np.kron, list(reversed(mats)))


def heisenberg_oracle(n: int, J: float, B: float, periodic: bool = True) -> np.ndarray:
    """Dense H built directly from 2x2 spin matrices with sigma = P/2."""
    sx = [site_op(X2 / 2, a, n) for a in range(n)]
    sy = [site_op(Y2 / 2, a, n) for a in range(n)]
    sz = [site_op(Z2 / 2, a, n) for a in range(n)]
    bonds = [(a, (a + 1) % n) for a in range(n)] if periodic else [(a, a + 1) for a in range(n - 1)]
    dim = 2**n
    h = np.eye(dim, dtype=complex) * (J * len(bonds) / 4 + B * n / 2)
    for a, b in bonds:
        h -= J * (sx[a] @ sx[b] + sy[a] @ sy[b] + sz[a] @ sz[b])
    for a in range(n):
        h += B * sz[a]
    return h


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
