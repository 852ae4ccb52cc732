"""Exact Gaussian elimination over F_q.

Matrices are numpy int64 arrays of element codes.  The prime-field case
runs on vectorised modular arithmetic; extensions fall back to the
context's lookup tables.  Everything returns plain integers or code
arrays, no floating point anywhere.
"""

from __future__ import annotations

import numpy as np

from .fields import Fq


def _rref(ctx: Fq, mat: np.ndarray) -> tuple[np.ndarray, list[int]]:
    a = np.array(mat, dtype=np.int64) % (ctx.p if ctx.k == 1 else ctx.q)
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = ctx.inv(int(a[r, c]))
        if ctx.k == 1:
            a[r] = (a[r] * inv) % ctx.p
            col = a[:, c].copy()
            col[r] = 0
            a = (a - np.outer(col, a[r])) % ctx.p
        else:
            a[r] = ctx.mul_t[a[r], inv]
            for i in range(rows):
                if i != r and a[i, c]:
                    factor = int(a[i, c])
                    a[i] = ctx.add_t[a[i], ctx.neg_t[ctx.mul_t[a[r], factor]]]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(ctx: Fq, mat: np.ndarray) -> int:
    if mat.size == 0:
        return 0
    return len(_rref(ctx, mat)[1])


def kernel_dim(ctx: Fq, mat: np.ndarray) -> int:
    """Dimension of the right kernel."""
    if mat.size == 0:
        return mat.shape[1] if mat.ndim == 2 else 0
    return mat.shape[1] - rank(ctx, mat)


def kernel_basis(ctx: Fq, mat: np.ndarray) -> np.ndarray:
    """Rows span the right kernel of mat."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    rows, cols = mat.shape
    if rows == 0 or mat.size == 0:
        return np.eye(cols, dtype=np.int64)
    red, pivots = _rref(ctx, mat)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, fc in enumerate(free):
        basis[i, fc] = 1
        for r, pc in enumerate(pivots):
            val = int(red[r, fc])
            if val:
                basis[i, pc] = ctx.neg(val)
    return basis


def row_space_basis(ctx: Fq, mat: np.ndarray) -> np.ndarray:
    red, pivots = _rref(ctx, np.atleast_2d(mat))
    return red[: len(pivots)]


def solve_particular(ctx: Fq, mat: np.ndarray, rhs: np.ndarray) -> np.ndarray | None:
    """One solution of mat @ x = rhs, or None."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.int64))
    rows, cols = mat.shape
    aug = np.concatenate([mat, np.asarray(rhs, dtype=np.int64).reshape(rows, 1)], axis=1)
    red, pivots = _rref(ctx, aug)
    if cols in pivots:
        return None
    x = np.zeros(cols, dtype=np.int64)
    for r, pc in enumerate(pivots):
        x[pc] = red[r, cols]
    return x


def matmul(ctx: Fq, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if ctx.k == 1:
        return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % ctx.p
    a = np.atleast_2d(a)
    b = np.atleast_2d(b)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = 0
            for t in range(a.shape[1]):
                acc = ctx.add(acc, ctx.mul(int(a[i, t]), int(b[t, j])))
            out[i, j] = acc
    return out
