"""Symmetrized determinant of a matrix over an algebra.

``sdet B`` expands into mixed discriminants of the real layers ``B_1..B_r``
weighted by the algebra elements

    u(k) = sum of e_{phi(1)} ... e_{phi(n)} over words with letter counts k,

and ``u`` obeys ``u(k) = sum_{i: k_i > 0} u(k - delta_i) e_i``. Everything
that depends only on ``(algebra, n)`` is collected in an :class:`SdetPlan`
and cached, so repeated evaluations (Monte Carlo) only pay for the
determinants.
"""
from __future__ import annotations

import math
import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .algebra import AlgebraMatrix, AlgebraSpec, multiply_batch
from .multilinear import SizeGuardError, compositions, discriminant_terms, permutation_signs

BRUTE_SDET_MAX_N = 5
BRUTE_CDET_MAX_N = 8
MAX_COMPOSITIONS = 200_000
MAX_POINTS = 1_000_000


@dataclass
class UTable:
    n: int
    r: int
    entries: dict = field(default_factory=dict)

    def __getitem__(self, k) -> np.ndarray:
        return self.entries[tuple(k)]

    def level(self, m: int) -> dict:
        return {k: v for k, v in self.entries.items() if sum(k) == m}


def u_table(spec: AlgebraSpec, n: int) -> UTable:
    """All ``u(k)`` with ``1 <= sum(k) <= n``, built level by level."""
    if n < 1:
        raise ValueError("n must be >= 1")
    r = spec.r
    _check_size(r, n)
    table = UTable(n, r)
    prev = {}
    for i in range(r):
        k = tuple(1 if j == i else 0 for j in range(r))
        prev[k] = spec.basis(i)
    table.entries.update(prev)
    # right multiplication by e_i: (x e_i)_c = sum_a x_a beta[a, i, c]
    right = [spec.beta[:, i, :] for i in range(r)]
    for m in range(2, n + 1):
        cur = {}
        for k in compositions(m, r):
            acc = np.zeros(r)
            for i in range(r):
                if k[i] > 0:
                    km = k[:i] + (k[i] - 1,) + k[i + 1 :]
                    acc += prev[km] @ right[i]
            cur[k] = acc
        table.entries.update(cur)
        prev = cur
    return table


def _check_size(r: int, n: int) -> None:
    if math.comb(n + r - 1, r - 1) > MAX_COMPOSITIONS:
        raise SizeGuardError(
            f"sdet over an algebra of dimension {r} at n = {n} needs "
            f"{math.comb(n + r - 1, r - 1)} compositions (limit {MAX_COMPOSITIONS})"
        )


@dataclass
class SdetPlan:
    """Matrix-independent part of the computation for one ``(algebra, n)``.

    ``sdet = (dets @ weights.T) @ u`` where ``dets[p] = det(sum_i points[p, i] B_i)``.
    """

    n: int
    r: int
    compositions: list
    u: np.ndarray  # (K, r)
    points: np.ndarray  # (P, r)
    weights: np.ndarray  # (K, P)
    terms: list  # per composition: list of (point index, weight)
    u_seconds: float = 0.0
    skipped: int = 0

    def stage_counts(self) -> dict:
        return {"compositions": len(self.compositions), "skipped_zero_u": self.skipped, "points": len(self.points)}


_plans: dict = {}
_plans_lock = threading.Lock()


def sdet_plan(spec: AlgebraSpec, n: int) -> SdetPlan:
    key = (spec.key, n)
    plan = _plans.get(key)
    if plan is not None:
        return plan
    with _plans_lock:
        plan = _plans.get(key)
        if plan is None:
            plan = _build_plan(spec, n)
            _plans[key] = plan
    return plan


def _build_plan(spec: AlgebraSpec, n: int) -> SdetPlan:
    r = spec.r
    _check_size(r, n)
    t0 = time.perf_counter()
    table = u_table(spec, n)
    u_seconds = time.perf_counter() - t0

    comps, us, per_comp = [], [], []
    point_index: dict = {}
    skipped = 0
    for k in compositions(n, r):
        u = table[k]
        if not np.any(u):
            skipped += 1
            continue
        entry = []
        for m, w in discriminant_terms(k):
            if m not in point_index:
                if len(point_index) >= MAX_POINTS:
                    raise SizeGuardError(f"sdet at n = {n}, r = {r} needs more than {MAX_POINTS} determinants")
                point_index[m] = len(point_index)
            entry.append((point_index[m], w))
        comps.append(k)
        us.append(u)
        per_comp.append(entry)

    P = len(point_index)
    points = np.zeros((P, r))
    for m, idx in point_index.items():
        points[idx] = m
    weights = np.zeros((len(comps), P))
    for row, entry in enumerate(per_comp):
        for idx, w in entry:
            weights[row, idx] = w
    u = np.array(us).reshape(len(comps), r)
    return SdetPlan(n, r, comps, u, points, weights, per_comp, u_seconds, skipped)


def _layers(spec: AlgebraSpec, B) -> np.ndarray:
    if not isinstance(B, AlgebraMatrix):
        B = AlgebraMatrix(B)
    B.conforms(spec)
    return B.layers


def sdet(spec: AlgebraSpec, B, timings: dict | None = None) -> np.ndarray:
    """Coefficient vector of ``sdet B`` in the basis of ``spec``.

    ``B`` is an :class:`AlgebraMatrix` or an ``(r, n, n)`` layer array.
    Pass a dict as ``timings`` to receive the per-stage wall-clock split.
    """
    L = _layers(spec, B)
    n = L.shape[1]
    plan = sdet_plan(spec, n)
    t0 = time.perf_counter()
    dets = np.array([kernels.det(np.tensordot(p, L, axes=1)) for p in plan.points])
    out = np.zeros(spec.r)
    if plan.compositions:
        D = np.array([math.fsum(w * dets[i] for i, w in entry) for entry in plan.terms])
        out = np.array([math.fsum(D * plan.u[:, c]) for c in range(spec.r)])
    if timings is not None:
        timings["u_table"] = plan.u_seconds
        timings["discriminants"] = time.perf_counter() - t0
    return out


def sdet_batch(spec: AlgebraSpec, layers: np.ndarray, chunk_floats: int = 4_000_000) -> np.ndarray:
    """``sdet`` of a stack of matrices, ``layers`` shaped ``(S, r, n, n)``.

    Returns ``(S, r)``. Values agree with ``sdet`` to rounding; bitwise
    reproducibility needs the same stack height, since BLAS may pick a
    different kernel for a different block size.
    """
    L = np.asarray(layers, dtype=np.float64)
    if L.ndim != 4 or L.shape[1] != spec.r or L.shape[2] != L.shape[3]:
        raise ValueError(f"layers must be (S, {spec.r}, n, n), got {L.shape}")
    S, r, n, _ = L.shape
    plan = sdet_plan(spec, n)
    out = np.zeros((S, r))
    if not plan.compositions or S == 0:
        return out
    P = len(plan.points)
    step = max(1, chunk_floats // max(1, P * n * n))
    for s0 in range(0, S, step):
        block = L[s0 : s0 + step]
        mats = np.einsum("pr,srij->spij", plan.points, block)
        dets = kernels.det_batch(mats.reshape(-1, n, n)).reshape(len(block), P)
        out[s0 : s0 + step] = (dets @ plan.weights.T) @ plan.u
    return out


def _entries(L: np.ndarray) -> np.ndarray:
    # (r, n, n) -> (n, n, r)
    return np.moveaxis(L, 0, 2)


def sdet_bruteforce(spec: AlgebraSpec, B) -> np.ndarray:
    """Average over all (sigma, tau) pairs, products associated left to right."""
    L = _layers(spec, B)
    n = L.shape[1]
    if n > BRUTE_SDET_MAX_N:
        raise SizeGuardError(f"sdet_bruteforce is limited to n <= {BRUTE_SDET_MAX_N} (got n = {n})")
    E = _entries(L)
    perms, signs = permutation_signs(n)
    total = np.zeros(spec.r)
    for sigma, s_sign in zip(perms, signs):
        acc = E[sigma[0], perms[:, 0]]
        for t in range(1, n):
            acc = multiply_batch(spec, acc, E[sigma[t], perms[:, t]])
        total += s_sign * (signs @ acc)
    return total / math.factorial(n)


def cdet_bruteforce(spec: AlgebraSpec, B) -> np.ndarray:
    """Row-ordered (Cayley) determinant ``sum_sigma sgn(sigma) b_{1 sigma(1)} ... b_{n sigma(n)}``."""
    L = _layers(spec, B)
    n = L.shape[1]
    if n > BRUTE_CDET_MAX_N:
        raise SizeGuardError(f"cdet_bruteforce is limited to n <= {BRUTE_CDET_MAX_N} (got n = {n})")
    E = _entries(L)
    perms, signs = permutation_signs(n)
    acc = E[0, perms[:, 0]]
    for t in range(1, n):
        acc = multiply_batch(spec, acc, E[t, perms[:, t]])
    return signs @ acc


def cdet_batch(spec: AlgebraSpec, layers: np.ndarray) -> np.ndarray:
    """Cayley determinants of a stack ``(S, r, n, n)``; returns ``(S, r)``."""
    L = np.asarray(layers, dtype=np.float64)
    S, r, n, _ = L.shape
    if n > BRUTE_CDET_MAX_N:
        raise SizeGuardError(f"Cayley determinant is limited to n <= {BRUTE_CDET_MAX_N} (got n = {n})")
    E = np.moveaxis(L, 1, 3)  # (S, n, n, r)
    perms, signs = permutation_signs(n)
    out = np.zeros((S, r))
    for sigma, sg in zip(perms, signs):
        acc = E[:, 0, sigma[0]]
        for t in range(1, n):
            acc = multiply_batch(spec, acc, E[:, t, sigma[t]])
        out += sg * acc
    return out
