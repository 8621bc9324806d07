"""Scalar determinants, exact permanents and mixed discriminants."""
from __future__ import annotations

import itertools
import math
from typing import Iterator, Sequence

import numpy as np

from . import kernels

NAIVE_PERMANENT_MAX_N = 10
RYSER_MAX_N = 30
BRUTE_DISCRIMINANT_MAX_N = 6


class SizeGuardError(ValueError):
    """Input exceeds the size limit of a factorial/exponential-time routine."""


def as_square(M, what: str = "matrix") -> np.ndarray:
    a = np.asarray(M, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{what} must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError(f"{what} is empty")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{what} has non-finite entries")
    return a


def _guard(n: int, limit: int, name: str) -> None:
    if n > limit:
        raise SizeGuardError(f"{name} is limited to n <= {limit} (got n = {n})")


def determinant(M) -> float:
    """det M by LU with partial pivoting; exactly 0.0 for a null pivot column."""
    return float(kernels.det(as_square(M)))


def permanent_naive(M) -> float:
    a = as_square(M)
    _guard(a.shape[0], NAIVE_PERMANENT_MAX_N, "permanent_naive")
    return float(kernels.permanent_naive(a))


def permanent_ryser(M) -> float:
    """Ryser inclusion-exclusion with Gray-code subset updates, O(2^n n)."""
    a = as_square(M)
    _guard(a.shape[0], RYSER_MAX_N, "permanent_ryser")
    return float(kernels.permanent_ryser(a))


def permutation_signs(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All permutations of ``range(n)`` (lexicographic) with their signs."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)
    # sign from inversion count
    inv = np.zeros(len(perms), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            inv += perms[:, i] > perms[:, j]
    return perms, np.where(inv % 2 == 0, 1.0, -1.0)


def mixed_discriminant_bruteforce(A_list: Sequence) -> float:
    """Double sum over (sigma, tau) in S_n x S_n, normalized by n!."""
    mats = [as_square(A, "mixed discriminant argument") for A in A_list]
    n = len(mats)
    if n == 0:
        raise ValueError("need at least one matrix")
    if any(A.shape != (n, n) for A in mats):
        raise ValueError(f"mixed discriminant needs {n} matrices of size {n}x{n}")
    _guard(n, BRUTE_DISCRIMINANT_MAX_N, "mixed_discriminant_bruteforce")
    T = np.stack(mats)
    perms, signs = permutation_signs(n)
    slots = np.arange(n)
    total = 0.0
    for sigma, s_sign in zip(perms, signs):
        # rows fixed by sigma, every tau at once
        terms = np.prod(T[slots, sigma[None, :], perms], axis=1)
        total += s_sign * float(terms @ signs)
    return total / math.factorial(n)


def compositions(n: int, r: int) -> list[tuple[int, ...]]:
    """Compositions of ``n`` into ``r`` non-negative parts, colexicographic order."""
    if r < 1 or n < 0:
        raise ValueError("need r >= 1 and n >= 0")
    out = [c for c in _compositions(n, r)]
    out.sort(key=lambda c: c[::-1])
    return out


def _compositions(n: int, r: int) -> Iterator[tuple[int, ...]]:
    if r == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, r - 1):
            yield (first,) + rest


def discriminant_terms(k: Sequence[int]) -> list[tuple[tuple[int, ...], float]]:
    """Points ``m`` and weights with ``D(k) = sum_m weight * det(sum_i m_i A_i)``.

    Inclusion-exclusion over ``0 <= m_i <= k_i``; a composition with a single
    non-zero part collapses to ``det A_i`` (weight 1 at the unit point).
    """
    k = tuple(int(x) for x in k)
    n = sum(k)
    support = [i for i, x in enumerate(k) if x > 0]
    if len(support) == 1:
        unit = tuple(1 if i == support[0] else 0 for i in range(len(k)))
        return [(unit, 1.0)]
    return _inclusion_exclusion_terms(k)


def _inclusion_exclusion_terms(k: tuple[int, ...]) -> list[tuple[tuple[int, ...], float]]:
    n = sum(k)
    scale = (-1) ** n / math.factorial(n)
    terms = []
    for m in itertools.product(*(range(x + 1) for x in k)):
        c = (-1) ** sum(m)
        for ki, mi in zip(k, m):
            c *= math.comb(ki, mi)
        terms.append((m, c * scale))
    return terms


def mixed_discriminant(A_distinct: Sequence, k: Sequence[int], collapse: bool = True) -> float:
    """D(A_1 x k_1, ..., A_r x k_r) via the alternating determinant sum.

    ``collapse=False`` forces the inclusion-exclusion sum even when only one
    part is non-zero (where the sum reduces to ``det A_i`` exactly in exact
    arithmetic but loses digits in floating point).
    """
    mats = [np.asarray(A, dtype=np.float64) for A in A_distinct]
    k = tuple(int(x) for x in k)
    if len(mats) == 0:
        raise ValueError("need r >= 1 matrices")
    if len(mats) != len(k):
        raise ValueError(f"{len(mats)} matrices but composition has {len(k)} parts")
    if any(x < 0 for x in k):
        raise ValueError("composition parts must be non-negative")
    n = sum(k)
    for A in mats:
        as_square(A)
        if A.shape != (n, n):
            raise ValueError(f"composition sums to {n} but a matrix has shape {A.shape}")
    terms = discriminant_terms(k) if collapse else _inclusion_exclusion_terms(k)
    stack = np.stack(mats)
    parts = []
    for m, w in terms:
        M = np.tensordot(np.asarray(m, dtype=np.float64), stack, axes=1)
        parts.append(w * kernels.det(M))
    return math.fsum(parts)
