"""Pure-Python/numpy versions of the compiled kernels.

Selected automatically when :mod:`symdet._ckernels` is not built, or when
``SYMDET_PURE_PYTHON=1`` is set. Same signatures, same conventions.
"""
from __future__ import annotations

import itertools

import numpy as np

PIVOT_FLOOR = 1e-300


def det(M) -> float:
    """Determinant by Gaussian elimination with partial pivoting.

    Returns exactly ``0.0`` as soon as a pivot column is numerically null.
    """
    a = np.array(M, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("determinant needs a square matrix")
    n = a.shape[0]
    result = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[p, k]) < PIVOT_FLOOR:
            return 0.0
        if p != k:
            a[[k, p]] = a[[p, k]]
            result = -result
        piv = a[k, k]
        result *= piv
        if k + 1 < n:
            f = a[k + 1 :, k] / piv
            a[k + 1 :, k + 1 :] -= np.outer(f, a[k, k + 1 :])
    return float(result)


def det_batch(stack) -> np.ndarray:
    """Determinants of a stack ``(S, n, n)``, vectorized over the stack."""
    a = np.array(stack, dtype=np.float64, copy=True)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("det_batch needs a stack of square matrices")
    S, n, _ = a.shape
    out = np.ones(S)
    dead = np.zeros(S, dtype=bool)
    rows = np.arange(S)
    for k in range(n):
        p = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        piv_abs = np.abs(a[rows, p, k])
        dead |= piv_abs < PIVOT_FLOOR
        swap = p != k
        if swap.any():
            idx = rows[swap]
            top = a[idx, k, :].copy()
            a[idx, k, :] = a[idx, p[swap], :]
            a[idx, p[swap], :] = top
            out[swap] = -out[swap]
        piv = a[:, k, k].copy()
        piv[dead] = 1.0
        out *= piv
        if k + 1 < n:
            f = a[:, k + 1 :, k] / piv[:, None]
            a[:, k + 1 :, k + 1 :] -= f[:, :, None] * a[:, k, None, k + 1 :]
    out[dead] = 0.0
    return out


def permanent_ryser(M) -> float:
    """Ryser's formula; Gray code over the high columns, vectorized low block.

    Row sums and products use extended precision (``np.longdouble``) because
    the alternating sum cancels heavily for positive matrices.
    """
    a = np.ascontiguousarray(M, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return 1.0
    ext = a.astype(np.longdouble)
    low = min(n, 12)
    masks = np.arange(1 << low)
    bits = ((masks[:, None] >> np.arange(low)) & 1).astype(np.longdouble)
    low_sums = bits @ ext[:, :low].T
    low_signs = np.where(bits.sum(axis=1) % 2 == 0, 1.0, -1.0).astype(np.longdouble)

    high = n - low
    rs = np.zeros(n, dtype=np.longdouble)
    size = 0
    g = 0
    total = np.longdouble(0.0)
    for k in range(1 << high):
        if k:
            j = (k & -k).bit_length() - 1
            g ^= 1 << j
            col = low + j
            if (g >> j) & 1:
                rs = rs + ext[:, col]
                size += 1
            else:
                rs = rs - ext[:, col]
                size -= 1
        s = np.prod(low_sums + rs, axis=1) @ low_signs
        total += -s if size % 2 else s
    return float(-total if n % 2 else total)


def permanent_naive(M) -> float:
    a = np.ascontiguousarray(M, dtype=np.float64)
    n = a.shape[0]
    if n == 0:
        return 1.0
    rows = np.arange(n)
    perms = itertools.permutations(range(n))
    total = 0.0
    while True:
        chunk = np.array(list(itertools.islice(perms, 50_000)), dtype=np.intp)
        if chunk.size == 0:
            break
        total += float(np.prod(a[rows, chunk], axis=1).sum())
    return total
