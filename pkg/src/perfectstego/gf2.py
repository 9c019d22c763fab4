"""Small dense linear algebra over GF(2)."""
from __future__ import annotations

import numpy as np


def _reduce(mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    a = np.array(mat, dtype=np.uint8) & 1
    pivots = []
    row = 0
    for col in range(a.shape[1]):
        hits = np.nonzero(a[row:, col])[0]
        if hits.size == 0:
            continue
        pr = row + hits[0]
        a[[row, pr]] = a[[pr, row]]
        mask = a[:, col].astype(bool)
        mask[row] = False
        a[mask] ^= a[row]
        pivots.append(col)
        row += 1
        if row == a.shape[0]:
            break
    return a, pivots


def gf2_rank(mat: np.ndarray) -> int:
    return len(_reduce(mat)[1])


def gf2_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """One solution ``x`` of ``a @ x = b (mod 2)``; free variables set to 0."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8).reshape(-1, 1)
    reduced, pivots = _reduce(np.hstack([a, b]))
    n = a.shape[1]
    if n in pivots:
        raise np.linalg.LinAlgError("inconsistent GF(2) system")
    x = np.zeros(n, dtype=np.uint8)
    for r, col in enumerate(pivots):
        x[col] = reduced[r, -1]
    return x


def gf2_inv(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=np.uint8)
    n = mat.shape[0]
    reduced, pivots = _reduce(np.hstack([mat, np.eye(n, dtype=np.uint8)]))
    if pivots[:n] != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular over GF(2)")
    return reduced[:, n:]
