"""Dense linear algebra over F_p on numpy integer arrays.

Used for truncated-behavior solution spaces, constant-matrix rank conditions
of the first-order representations, and sampling invertible transforms.
"""

from __future__ import annotations

import numpy as np


def as_modp(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def rref(a, p: int):
    """Reduced row echelon form mod p. Returns (R, pivot_columns)."""
    r = as_modp(a, p).copy()
    rows, cols = r.shape
    pivots = []
    rank = 0
    for c in range(cols):
        if rank >= rows:
            break
        nz = np.nonzero(r[rank:, c])[0]
        if nz.size == 0:
            continue
        pr = rank + nz[0]
        if pr != rank:
            r[[rank, pr]] = r[[pr, rank]]
        inv = pow(int(r[rank, c]), p - 2, p)
        r[rank] = (r[rank] * inv) % p
        col = r[:, c].copy()
        col[rank] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            r[hit] = (r[hit] - np.outer(col[hit], r[rank])) % p
        pivots.append(c)
        rank += 1
    return r, pivots


def rank(a, p: int) -> int:
    m = as_modp(a, p)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def nullspace(a, p: int) -> np.ndarray:
    """Basis of the right kernel as columns; shape (cols, dim)."""
    m = as_modp(a, p)
    rows, cols = m.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, pivots = rref(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((cols, len(free)), dtype=np.int64)
    for idx, fc in enumerate(free):
        basis[fc, idx] = 1
        for prow, pc in enumerate(pivots):
            basis[pc, idx] = (-r[prow, fc]) % p
    return basis


def solve(a, b, p: int):
    """One solution x of a @ x = b mod p, or None if inconsistent.
    b may be a vector or a matrix of stacked right-hand sides."""
    m = as_modp(a, p)
    rhs = as_modp(b, p)
    vec = rhs.ndim == 1
    if vec:
        rhs = rhs[:, None]
    aug = np.concatenate([m, rhs], axis=1)
    r, pivots = rref(aug, p)
    cols = m.shape[1]
    if any(c >= cols for c in pivots):
        return None
    x = np.zeros((cols, rhs.shape[1]), dtype=np.int64)
    for prow, pc in enumerate(pivots):
        x[pc] = r[prow, cols:]
    return x[:, 0] if vec else x


def is_invertible(a, p: int) -> bool:
    m = as_modp(a, p)
    return m.shape[0] == m.shape[1] and rank(m, p) == m.shape[0]


def inverse(a, p: int) -> np.ndarray:
    m = as_modp(a, p)
    n = m.shape[0]
    x = solve(m, np.eye(n, dtype=np.int64), p)
    if x is None or m.shape[0] != m.shape[1]:
        raise ValueError("matrix is not invertible mod p")
    return x


def span_le(a, b, p: int) -> bool:
    """Column span of a contained in column span of b (mod p)."""
    if a.shape[1] == 0:
        return True
    return solve(b, a, p) is not None


def span_equal(a, b, p: int) -> bool:
    return span_le(a, b, p) and span_le(b, a, p)


def matmul(a, b, p: int) -> np.ndarray:
    return (as_modp(a, p) @ as_modp(b, p)) % p
