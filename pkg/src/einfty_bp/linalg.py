"""Dense Gaussian elimination over F_p.

Matrices are integer numpy arrays whose columns are the images of the
source basis vectors (so ``M @ x`` applies the map).
"""
from __future__ import annotations

import numpy as np


def as_matrix(rows, p: int, shape=None) -> np.ndarray:
    M = np.array(rows, dtype=np.int64) if shape is None else np.zeros(shape, dtype=np.int64)
    if shape is None and M.ndim == 1:
        M = M.reshape(0 if M.size == 0 else 1, -1)
    return M % p


def rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            A[[r, k]] = A[[k, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = (A[hit] - np.outer(col[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def rank(M: np.ndarray, p: int) -> int:
    if M.size == 0:
        return 0
    return len(rref(M, p)[1])


def nullspace(M: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {x : M x = 0} mod p."""
    rows, cols = M.shape
    if cols == 0:
        return []
    if rows == 0:
        return [np.eye(cols, dtype=np.int64)[i] for i in range(cols)]
    R, pivots = rref(M, p)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = np.zeros(cols, dtype=np.int64)
        v[f] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-R[i, f]) % p
        basis.append(v)
    return basis


def solve(M: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of M x = b mod p, or None."""
    rows, cols = M.shape
    b = np.asarray(b, dtype=np.int64).reshape(rows) % p
    if cols == 0:
        return np.zeros(0, dtype=np.int64) if not b.any() else None
    aug = np.concatenate([M % p, b.reshape(rows, 1)], axis=1)
    R, pivots = rref(aug, p)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = R[i, cols]
    return x


def independent_modulo(vectors: list[np.ndarray], subspace: list[np.ndarray], p: int) -> list[int]:
    """Indices of ``vectors`` forming a basis of their span modulo ``subspace``."""
    chosen = []
    current = [np.asarray(v) % p for v in subspace]
    r = rank(np.array(current), p) if current else 0
    for i, v in enumerate(vectors):
        trial = current + [np.asarray(v) % p]
        r2 = rank(np.array(trial), p)
        if r2 > r:
            chosen.append(i)
            current = trial
            r = r2
    return chosen


def sparse_rank(columns, p: int) -> int:
    """Rank mod p of vectors given as dicts {row: value}.

    Plain elimination keyed by pivot row; fast when the vectors are sparse.
    """
    pivots: dict = {}
    rank = 0
    for col in columns:
        v = {k: c % p for k, c in col.items() if c % p}
        while v:
            lead = min(v)
            piv = pivots.get(lead)
            if piv is None:
                inv = pow(v[lead], -1, p)
                pivots[lead] = {k: (c * inv) % p for k, c in v.items()}
                rank += 1
                break
            f = v[lead]
            for k, c in piv.items():
                nv = (v.get(k, 0) - f * c) % p
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
    return rank
