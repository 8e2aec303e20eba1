"""Rank of binary matrices by Gaussian elimination over GF(2).

Rows are packed into Python ints, so elimination is one XOR per row pair.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np


def pack_rows(matrix: np.ndarray) -> list[int]:
    """Pack each 0/1 row into an int, column j -> bit j."""
    m = np.asarray(matrix, dtype=np.uint8) & 1
    weights = [1 << j for j in range(m.shape[1])]
    return [sum(w for w, bit in zip(weights, row) if bit) for row in m.tolist()]


def gf2_rank(rows: Iterable[int] | np.ndarray) -> int:
    """Rank over GF(2) of packed integer rows (or a 0/1 matrix)."""
    if isinstance(rows, np.ndarray):
        rows = pack_rows(rows)
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    for r in rows:
        while r:
            lead = r.bit_length() - 1
            if lead not in pivots:
                pivots[lead] = r
                break
            r ^= pivots[lead]
    return len(pivots)
