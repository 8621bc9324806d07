"""Finite-dimensional associative real algebras given by structure constants.

An algebra of dimension ``r`` is fixed by a basis ``e_1..e_r`` and the table
``beta[i, j, k]`` with ``e_i e_j = sum_k beta[i, j, k] e_k``. Elements are
plain length-``r`` float arrays of coordinates; matrices over an algebra are
stored as ``r`` stacked real layers (see :class:`AlgebraMatrix`).

The scalar product is the coordinate one, ``<a, b> = sum_k a_k b_k``. For
``mat<d>`` (elementary-matrix basis, row-major) it coincides with
``Tr(a b^T)``.
"""
from __future__ import annotations

import functools
import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ASSOC_TOL = 1e-9


class AlgebraError(ValueError):
    """Invalid structure constants or non-conforming elements."""


@dataclass(frozen=True, eq=False)
class AssociativityReport:
    max_violation: float
    worst_triple: tuple[int, int, int]
    tol: float = ASSOC_TOL

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tol


@dataclass(frozen=True, eq=False)
class AlgebraSpec:
    """Immutable algebra description. Build through :func:`make_algebra`."""

    r: int
    beta: np.ndarray
    name: str = "algebra"
    _key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        beta = np.array(self.beta, dtype=np.float64, copy=True)
        beta.setflags(write=False)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "_key", (self.name, self.r, beta.tobytes()))

    @property
    def key(self) -> tuple:
        """Value identity, used for caching derived tables."""
        return self._key

    def __eq__(self, other):
        return isinstance(other, AlgebraSpec) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.r)
        e[i] = 1.0
        return e

    def element(self, coeffs) -> np.ndarray:
        a = np.asarray(coeffs, dtype=np.float64)
        if a.shape != (self.r,):
            raise AlgebraError(f"element of {self.name} needs {self.r} coefficients, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise AlgebraError("element coefficients must be finite")
        return a


@dataclass(frozen=True, eq=False)
class AlgebraMatrix:
    """n x n matrix over an algebra: entry (i, j) is ``sum_k layers[k, i, j] e_k``."""

    layers: np.ndarray

    def __post_init__(self):
        L = np.asarray(self.layers, dtype=np.float64)
        if L.ndim != 3 or L.shape[1] != L.shape[2]:
            raise AlgebraError(f"layers must have shape (r, n, n), got {L.shape}")
        if L.shape[1] == 0:
            raise AlgebraError("empty matrix")
        if not np.all(np.isfinite(L)):
            raise AlgebraError("matrix entries must be finite")
        object.__setattr__(self, "layers", L)

    @property
    def n(self) -> int:
        return self.layers.shape[1]

    @property
    def r(self) -> int:
        return self.layers.shape[0]

    def entry(self, i: int, j: int) -> np.ndarray:
        return self.layers[:, i, j].copy()

    @classmethod
    def from_entries(cls, entries) -> "AlgebraMatrix":
        """Build from an ``(n, n, r)`` array of element coefficient vectors."""
        E = np.asarray(entries, dtype=np.float64)
        if E.ndim != 3:
            raise AlgebraError("entries must have shape (n, n, r)")
        return cls(np.moveaxis(E, 2, 0))

    def conforms(self, spec: AlgebraSpec) -> None:
        if self.r != spec.r:
            raise AlgebraError(f"matrix has {self.r} layers but {spec.name} has dimension {spec.r}")


def check_associativity(spec: AlgebraSpec, tol: float = ASSOC_TOL) -> AssociativityReport:
    """Largest coefficient gap between ``(e_a e_b) e_c`` and ``e_a (e_b e_c)``."""
    beta = spec.beta
    # (e_a e_b) e_c = sum_m beta[a,b,m] beta[m,c,:]
    left = np.einsum("abm,mck->abck", beta, beta)
    # e_a (e_b e_c) = sum_m beta[b,c,m] beta[a,m,:]
    right = np.einsum("bcm,amk->abck", beta, beta)
    gap = np.abs(left - right).max(axis=3)
    worst = np.unravel_index(int(np.argmax(gap)), gap.shape)
    return AssociativityReport(float(gap[worst]), tuple(int(i) for i in worst), tol)


def make_algebra(r: int, beta, name: str = "algebra") -> AlgebraSpec:
    if not isinstance(r, (int, np.integer)) or r < 1:
        raise AlgebraError(f"dimension r must be a positive integer, got {r!r}")
    b = np.asarray(beta, dtype=np.float64)
    if b.shape != (r, r, r):
        raise AlgebraError(f"structure constants must have shape ({r}, {r}, {r}), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise AlgebraError("structure constants must be finite")
    spec = AlgebraSpec(int(r), b, name)
    report = check_associativity(spec)
    if not report.ok:
        raise AlgebraError(
            f"{name} is not associative: violation {report.max_violation:.3g} at basis triple {report.worst_triple}"
        )
    return spec


def _reals():
    return make_algebra(1, np.ones((1, 1, 1)), "reals")


def _complexes():
    b = np.zeros((2, 2, 2))
    b[0, 0, 0] = 1.0
    b[0, 1, 1] = 1.0
    b[1, 0, 1] = 1.0
    b[1, 1, 0] = -1.0
    return make_algebra(2, b, "complexes")


def _quaternions():
    # basis 1, i, j, k
    table = {
        (1, 1): (0, -1), (2, 2): (0, -1), (3, 3): (0, -1),
        (1, 2): (3, 1), (2, 1): (3, -1),
        (2, 3): (1, 1), (3, 2): (1, -1),
        (3, 1): (2, 1), (1, 3): (2, -1),
    }
    b = np.zeros((4, 4, 4))
    for i in range(4):
        b[0, i, i] = 1.0
        b[i, 0, i] = 1.0
    for (i, j), (k, s) in table.items():
        b[i, j, k] = s
    return make_algebra(4, b, "quaternions")


def _matrix_algebra(d: int):
    if d < 1:
        raise AlgebraError(f"matrix algebra size must be >= 1, got {d}")
    r = d * d
    b = np.zeros((r, r, r))
    # E_pq E_st = [q == s] E_pt, basis index p*d + q
    for p in range(d):
        for q in range(d):
            for t in range(d):
                b[p * d + q, q * d + t, p * d + t] = 1.0
    return make_algebra(r, b, f"mat{d}")


@functools.lru_cache(maxsize=None)
def builtin_algebra(kind: str) -> AlgebraSpec:
    """``reals``, ``complexes``, ``quaternions`` or ``mat<d>`` (e.g. ``mat2``)."""
    if kind == "reals":
        return _reals()
    if kind == "complexes":
        return _complexes()
    if kind == "quaternions":
        return _quaternions()
    m = re.fullmatch(r"mat(\d+)", kind)
    if m:
        return _matrix_algebra(int(m.group(1)))
    raise AlgebraError(f"unknown builtin algebra {kind!r}")


def matrix_algebra(d: int) -> AlgebraSpec:
    return builtin_algebra(f"mat{d}")


def load_algebra(source) -> AlgebraSpec:
    """Builtin name, JSON file path, or an already parsed ``{"r", "beta", "name"}`` dict."""
    if isinstance(source, AlgebraSpec):
        return source
    if isinstance(source, dict):
        return make_algebra(int(source["r"]), source["beta"], source.get("name", "algebra"))
    try:
        return builtin_algebra(str(source))
    except AlgebraError:
        path = Path(source)
        if not path.exists():
            raise
        return load_algebra(json.loads(path.read_text()))


def multiply(spec: AlgebraSpec, a, b) -> np.ndarray:
    a = spec.element(a)
    b = spec.element(b)
    return np.einsum("i,j,ijk->k", a, b, spec.beta)


def multiply_batch(spec: AlgebraSpec, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Row-wise products of two ``(..., r)`` arrays of elements."""
    return np.einsum("...i,...j,ijk->...k", a, b, spec.beta)


def norm_sq(spec: AlgebraSpec, a) -> float:
    a = spec.element(a)
    return float(a @ a)


def is_commutative(spec: AlgebraSpec, tol: float = ASSOC_TOL) -> bool:
    return bool(np.abs(spec.beta - spec.beta.transpose(1, 0, 2)).max() <= tol)
