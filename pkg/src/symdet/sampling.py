"""Per-sample random streams and the entry distributions.

Sample ``s`` of a run with master seed ``m`` draws from its own Philox
stream keyed by ``sample_seed(m, s)``, entries in row-major order. Nothing
depends on how samples are grouped into batches or workers.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def sample_seed(master_seed: int, index: int) -> int:
    """64-bit seed of sample ``index``; reproduces that sample on its own."""
    return _splitmix64(_splitmix64(master_seed & MASK64) ^ (index & MASK64))


def sample_seeds(master_seed: int, start: int, stop: int) -> np.ndarray:
    return np.array([sample_seed(master_seed, s) for s in range(start, stop)], dtype=np.uint64)


def stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


@dataclass(frozen=True)
class DistributionKind:
    """Entry distribution for the random matrix ``u``.

    ``components`` is the number of real coordinates per entry (1, 2, 4 or
    d^2). Scalar, complex and quaternion kinds have ``E|x|^2 = 1``; the
    matrix kind is the standard Gaussian on ``Mat(d)`` (``E|x|^2 = d^2``).
    """

    tag: str
    d: int = 1

    @property
    def components(self) -> int:
        return {"rademacher": 1, "real_gaussian": 1, "cube_roots": 2,
                "complex_gaussian": 2, "quaternion_gaussian": 4}.get(self.tag, self.d * self.d)

    @property
    def second_moment(self) -> float:
        return float(self.d * self.d) if self.tag == "matrix_gaussian" else 1.0

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """``count`` entries, shape ``(count, components)``."""
        if self.tag == "rademacher":
            return (2.0 * rng.integers(0, 2, size=count) - 1.0)[:, None]
        if self.tag == "real_gaussian":
            return rng.standard_normal(count)[:, None]
        if self.tag == "cube_roots":
            ang = 2.0 * np.pi * rng.integers(0, 3, size=count) / 3.0
            return np.stack([np.cos(ang), np.sin(ang)], axis=1)
        if self.tag == "complex_gaussian":
            return rng.standard_normal((count, 2)) * np.sqrt(0.5)
        if self.tag == "quaternion_gaussian":
            return rng.standard_normal((count, 4)) * 0.5
        if self.tag == "matrix_gaussian":
            return rng.standard_normal((count, self.d * self.d))
        raise ValueError(f"unknown distribution {self.tag!r}")


KINDS = ("rademacher", "real_gaussian", "cube_roots", "complex_gaussian", "quaternion_gaussian", "matrix_gaussian")


def distribution(tag: str, d: int = 1) -> DistributionKind:
    if tag not in KINDS:
        raise ValueError(f"unknown distribution {tag!r}; choose from {', '.join(KINDS)}")
    if tag == "matrix_gaussian" and d < 1:
        raise ValueError("matrix_gaussian needs d >= 1")
    return DistributionKind(tag, d if tag == "matrix_gaussian" else 1)


def draw_matrices(kind: DistributionKind, seeds, n: int, extra: int = 0) -> tuple[np.ndarray, np.ndarray | None]:
    """Entries for every seed: ``(S, n, n, c)`` plus optional ``(S, extra, c)`` tail.

    The tail is drawn after the n^2 matrix entries of the same stream.
    """
    seeds = np.atleast_1d(np.asarray(seeds, dtype=np.uint64))
    c = kind.components
    U = np.empty((len(seeds), n, n, c))
    tail = np.empty((len(seeds), extra, c)) if extra else None
    for s, seed in enumerate(seeds):
        rng = stream(int(seed))
        U[s] = kind.draw(rng, n * n).reshape(n, n, c)
        if extra:
            tail[s] = kind.draw(rng, extra)
    return U, tail


def mean_check(kind: DistributionKind, samples: int = 100_000, seed: int = 0) -> tuple[bool, np.ndarray]:
    """Empirical zero-mean check: every coordinate within 4 sigma / sqrt(N)."""
    x = kind.draw(stream(seed), samples)
    z = np.abs(x.mean(axis=0)) / (x.std(axis=0, ddof=1) / np.sqrt(samples))
    return bool(np.all(z < 4.0)), z
