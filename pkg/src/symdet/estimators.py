"""Randomized permanent estimators.

Classical determinant estimators draw ``u_ij`` from a zero-mean unit-variance
distribution, set ``b_ij = u_ij sqrt(a_ij)`` and report ``(det B)^2``
(``|det B|^2`` for complex entries, the Study determinant for quaternion
entries); each has expectation ``per A``.

The symmetrized-determinant estimator of order ``d`` works in ``Mat(d, R)``
with standard Gaussian entries and reports ``||sdet B||^2 / ||sdet E||^2``,
where ``E`` is diagonal with the same ``u_ii``. Numerator and denominator
are unbiased for ``c(n) per A`` and ``c(n)`` separately, so aggregate with
:func:`pooled` rather than averaging the per-sample ratios.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import digamma

from . import kernels
from .algebra import matrix_algebra
from .multilinear import SizeGuardError, as_square, permutation_signs
from .sampling import DistributionKind, distribution, draw_matrices, sample_seeds, stream
from .sdet import BRUTE_CDET_MAX_N, cdet_batch, sdet_batch

NEG_TOL = 1e-9

CLASSICAL = {
    "gg-rademacher": "rademacher",
    "gg-real-gauss": "real_gaussian",
    "gg-cube-roots": "cube_roots",
    "gg-complex-gauss": "complex_gaussian",
    "gg-quaternion": "quaternion_gaussian",
}
ESTIMATORS = tuple(CLASSICAL) + ("sdet", "cdet")


@dataclass(frozen=True)
class EstimatorSample:
    numerator: float
    denominator: float
    alpha: float
    seed: int


@dataclass
class SampleBatch:
    numerators: np.ndarray
    denominators: np.ndarray
    seeds: np.ndarray

    @property
    def alphas(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.denominators > 0, self.numerators / self.denominators, np.nan)

    def __len__(self) -> int:
        return len(self.numerators)

    def __getitem__(self, i: int) -> EstimatorSample:
        return EstimatorSample(float(self.numerators[i]), float(self.denominators[i]),
                               float(self.alphas[i]), int(self.seeds[i]))

    @classmethod
    def concat(cls, parts) -> "SampleBatch":
        parts = list(parts)
        return cls(np.concatenate([p.numerators for p in parts]),
                   np.concatenate([p.denominators for p in parts]),
                   np.concatenate([p.seeds for p in parts]))


def check_nonnegative(A) -> np.ndarray:
    a = as_square(A)
    if np.any(a < 0):
        raise ValueError("permanent estimators need a non-negative matrix")
    return a


def _clamp(values: np.ndarray, scale: np.ndarray, what: str) -> np.ndarray:
    tol = NEG_TOL * np.maximum(1.0, scale)
    if np.any(values < -tol):
        worst = float(values.min())
        raise ArithmeticError(f"{what} came out negative ({worst:.3g}) beyond round-off")
    return np.where(values < 0, 0.0, values)


def study_determinant_batch(Q: np.ndarray) -> np.ndarray:
    """Study determinants of quaternion matrices ``(S, n, n, 4)``.

    Uses the complex adjoint ``[[X, Y], [-conj(Y), conj(X)]]`` of ``Q = X + Y j``.
    """
    Q = np.asarray(Q, dtype=np.float64)
    X = Q[..., 0] + 1j * Q[..., 1]
    Y = Q[..., 2] + 1j * Q[..., 3]
    C = np.block([[X, Y], [-np.conj(Y), np.conj(X)]])
    dets = np.linalg.det(C)
    # Hadamard bound of C as the magnitude scale
    scale = np.prod(np.linalg.norm(C, axis=-1), axis=-1)
    if np.any(np.abs(dets.imag) > NEG_TOL * np.maximum(1.0, scale)):
        raise ArithmeticError("complexified determinant is not real; quaternion layout is wrong")
    return _clamp(dets.real, scale, "Study determinant")


def study_determinant(Q) -> float:
    Q = np.asarray(Q, dtype=np.float64)
    if Q.ndim != 3 or Q.shape[0] != Q.shape[1] or Q.shape[2] != 4:
        raise ValueError(f"quaternion matrix must have shape (n, n, 4), got {Q.shape}")
    return float(study_determinant_batch(Q[None])[0])


def gg_batch(A, kind: str | DistributionKind, seeds) -> SampleBatch:
    """Classical (Godsil-Gutman family) estimator for each sample seed."""
    a = check_nonnegative(A)
    kind = distribution(kind) if isinstance(kind, str) else kind
    if kind.tag == "matrix_gaussian":
        raise ValueError("matrix_gaussian belongs to the sdet/cdet estimators")
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    U, _ = draw_matrices(kind, seeds, a.shape[0])
    return SampleBatch(gg_from_draws(a, U), np.ones(len(seeds)), seeds)


def gg_from_draws(A, U: np.ndarray) -> np.ndarray:
    """Classical estimator values for given entries ``U`` of shape ``(S, n, n, c)``.

    ``c`` = 1 (real), 2 (complex) or 4 (quaternion) selects the determinant.
    """
    a = np.asarray(A, dtype=np.float64)
    Bc = U * np.sqrt(a)[None, :, :, None]
    c = Bc.shape[-1]
    if c == 1:
        return kernels.det_batch(Bc[..., 0]) ** 2
    if c == 2:
        return np.abs(np.linalg.det(Bc[..., 0] + 1j * Bc[..., 1])) ** 2
    if c == 4:
        return study_determinant_batch(Bc)
    raise ValueError(f"entries must have 1, 2 or 4 components, got {c}")


def gg_estimate(A, kind: str | DistributionKind, seed: int) -> EstimatorSample:
    return gg_batch(A, kind, [seed])[0]


def _mat_layers(U: np.ndarray) -> np.ndarray:
    # (S, n, n, r) -> (S, r, n, n)
    return np.moveaxis(U, 3, 1)


def _check_order(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")


def sdet_batch_estimate(A, d: int, seeds, independent_denominator: bool = False) -> SampleBatch:
    """``||sdet B||^2`` and ``||sdet E||^2`` over ``Mat(d, R)`` for each seed."""
    a = check_nonnegative(A)
    _check_order(d)
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    n = a.shape[0]
    U, fresh = draw_matrices(distribution("matrix_gaussian", d), seeds, n,
                             extra=n if independent_denominator else 0)
    num, den = sdet_from_draws(a, d, U, fresh)
    return SampleBatch(num, den, seeds)


def sdet_from_draws(A, d: int, U: np.ndarray, diagonal: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators for given ``u`` of shape ``(S, n, n, d*d)``.

    ``diagonal`` ``(S, n, d*d)`` replaces ``u_ii`` in ``E`` (independent denominator).
    """
    a = np.asarray(A, dtype=np.float64)
    spec = matrix_algebra(d)
    n = a.shape[0]
    idx = np.arange(n)
    B = _mat_layers(U * np.sqrt(a)[None, :, :, None])
    diag = U[:, idx, idx] if diagonal is None else diagonal
    E = np.zeros_like(B)
    E[:, :, idx, idx] = np.moveaxis(diag, 2, 1)
    sb = sdet_batch(spec, B)
    se = sdet_batch(spec, E)
    return np.einsum("sk,sk->s", sb, sb), np.einsum("sk,sk->s", se, se)


def sdet_estimate(A, d: int, seed: int, independent_denominator: bool = False) -> EstimatorSample:
    return sdet_batch_estimate(A, d, [seed], independent_denominator)[0]


def cdet_batch_estimate(A, d: int, seeds, exact_normalization: bool = False) -> SampleBatch:
    """``||Cdet B||^2`` over ``Mat(d, R)`` divided by ``d^n``.

    For standard Gaussian entries ``E ||Cdet B||^2 = d^(n+1) per A``;
    ``exact_normalization=True`` divides by that instead, making the
    estimator unbiased.
    """
    a = check_nonnegative(A)
    _check_order(d)
    n = a.shape[0]
    if n > BRUTE_CDET_MAX_N:
        raise SizeGuardError(f"Cayley estimator is limited to n <= {BRUTE_CDET_MAX_N} (got n = {n})")
    spec = matrix_algebra(d)
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    U, _ = draw_matrices(distribution("matrix_gaussian", d), seeds, n)
    C = cdet_batch(spec, _mat_layers(U * np.sqrt(a)[None, :, :, None]))
    den = float(d) ** (n + 1 if exact_normalization else n)
    return SampleBatch(np.einsum("sk,sk->s", C, C), np.full(len(seeds), den), seeds)


def cdet_estimate(A, d: int, seed: int, exact_normalization: bool = False) -> EstimatorSample:
    return cdet_batch_estimate(A, d, [seed], exact_normalization)[0]


def run_estimator(name: str, A, seeds, d: int = 1, independent_denominator: bool = False) -> SampleBatch:
    """Dispatch by CLI/config estimator name."""
    if name in CLASSICAL:
        return gg_batch(A, CLASSICAL[name], seeds)
    if name == "sdet":
        return sdet_batch_estimate(A, d, seeds, independent_denominator)
    if name == "cdet":
        return cdet_batch_estimate(A, d, seeds)
    raise ValueError(f"unknown estimator {name!r}; choose from {', '.join(ESTIMATORS)}")


@dataclass(frozen=True)
class Pooled:
    estimate: float
    stderr: float
    samples: int


def pooled(numerators, denominators) -> Pooled:
    """Ratio of sums with a delta-method standard error.

    With constant denominators this is the plain sample mean and its
    standard error.
    """
    num = np.asarray(numerators, dtype=np.float64)
    den = np.asarray(denominators, dtype=np.float64)
    N = len(num)
    sd = math.fsum(den)
    if N == 0 or sd <= 0:
        return Pooled(float("nan"), float("nan"), N)
    R = math.fsum(num) / sd
    if N < 2:
        return Pooled(R, float("nan"), N)
    resid = num - R * den
    se = math.sqrt(math.fsum(resid * resid) / (N * (N - 1))) / (sd / N)
    return Pooled(R, se, N)


def concentration_constant(d: int) -> float:
    """``exp E ln(chi2_d / d) = (2/d) exp(digamma(d/2))``."""
    _check_order(d)
    return float(2.0 / d * math.exp(digamma(d / 2.0)))


def log_concentration_mc(d: int, samples: int, seed: int = 0, chunk: int = 1_000_000) -> tuple[float, float]:
    """Monte Carlo mean of ``ln(chi2_d / d)`` and its standard error."""
    rng = stream(seed)
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < samples:
        m = min(chunk, samples - done)
        x = np.log(rng.chisquare(d, size=m) / d)
        total += float(x.sum())
        total_sq += float((x * x).sum())
        done += m
    mean = total / samples
    var = (total_sq - samples * mean * mean) / (samples - 1)
    return mean, math.sqrt(var / samples)


@dataclass(frozen=True)
class ConstantEstimate:
    mean: float
    stderr: float
    mode: str
    samples: int


DIRECT_CONSTANT_MAX_N = 6


def c_constant_estimate(d: int, n: int, seed: int, samples: int, mode: str = "direct") -> ConstantEstimate:
    """Monte Carlo estimate of ``E ||(1/n!) sum_sigma Y_sigma(1) ... Y_sigma(n)||^2``.

    ``direct`` multiplies the ``d x d`` Gaussian matrices in every order;
    ``diagonal`` evaluates ``||sdet diag(Y_1..Y_n)||^2`` with the sdet engine.
    """
    _check_order(d)
    if n < 1:
        raise ValueError("n must be >= 1")
    seeds = sample_seeds(seed, 0, samples)
    kind = distribution("matrix_gaussian", d)
    Y = np.empty((samples, n, d, d))
    for s, sd in enumerate(seeds):
        Y[s] = kind.draw(stream(int(sd)), n).reshape(n, d, d)
    if mode == "direct":
        if n > DIRECT_CONSTANT_MAX_N:
            raise SizeGuardError(f"direct mode is limited to n <= {DIRECT_CONSTANT_MAX_N}; use mode='diagonal'")
        perms, _ = permutation_signs(n)
        Z = np.zeros((samples, d, d))
        for p in perms:
            acc = Y[:, p[0]]
            for t in p[1:]:
                acc = acc @ Y[:, t]
            Z += acc
        Z /= math.factorial(n)
        vals = np.einsum("sij,sij->s", Z, Z)
    elif mode == "diagonal":
        E = np.zeros((samples, d * d, n, n))
        idx = np.arange(n)
        E[:, :, idx, idx] = np.moveaxis(Y.reshape(samples, n, d * d), 2, 1)
        z = sdet_batch(matrix_algebra(d), E)
        vals = np.einsum("sk,sk->s", z, z)
    else:
        raise ValueError(f"mode must be 'direct' or 'diagonal', got {mode!r}")
    se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else float("nan")
    return ConstantEstimate(float(vals.mean()), se, mode, samples)
