"""Dense linear algebra over F_p on numpy integer arrays.

Matrices act on column vectors.  Entries are kept in ``[0, p)``; with
``p < 2**31`` every intermediate product fits in int64.
"""

from __future__ import annotations

import numpy as np


def as_matrix(rows, ncols: int, p: int) -> np.ndarray:
    m = np.zeros((len(rows), ncols), dtype=np.int64)
    for i, row in enumerate(rows):
        for j, c in row.items():
            m[i, j] = c % p
    return m


def rref(m: np.ndarray, p: int):
    """Reduced row echelon form and the list of pivot columns."""
    a = np.array(m, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            a[rows] = (a[rows] - np.outer(col[rows], a[r])) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: np.ndarray, p: int) -> int:
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(m: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of ``{v : m v = 0}``."""
    ncols = m.shape[1]
    if m.shape[0] == 0 or m.size == 0:
        return np.eye(ncols, dtype=np.int64)
    red, pivots = rref(m, p)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = np.zeros((ncols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for i, pc in enumerate(pivots):
            basis[pc, k] = (-red[i, f]) % p
    return basis


def column_basis(m: np.ndarray, p: int) -> np.ndarray:
    """Independent columns of ``m`` spanning its column space."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0), dtype=np.int64)
    _, pivots = rref(m, p)
    return m[:, pivots] % p


def hstack(*blocks, rows: int) -> np.ndarray:
    parts = [b for b in blocks if b is not None and b.shape[1]]
    if not parts:
        return np.zeros((rows, 0), dtype=np.int64)
    return np.hstack(parts)


def relative_rank(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """Rank of the columns of ``a`` modulo the column space of ``b``."""
    rows = a.shape[0]
    return rank(hstack(b, a, rows=rows), p) - rank(b, p) if rows else 0


def preimage_dimension(a: np.ndarray, b: np.ndarray, p: int) -> int:
    """``dim {v : a v ∈ colspace(b)}``."""
    return a.shape[1] - relative_rank(a, b, p)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[1] == 0 or a.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    if p < 2**20 and a.shape[1] < 2**20:
        return (a @ b) % p
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for k in range(a.shape[1]):
        out = (out + np.outer(a[:, k], b[k, :]) % p) % p
    return out
