"""Fast internal consistency checks behind ``symdet selftest``."""
from __future__ import annotations

import numpy as np

from . import kernels
from .algebra import builtin_algebra, check_associativity
from .estimators import concentration_constant
from .multilinear import mixed_discriminant, mixed_discriminant_bruteforce, permanent_naive, permanent_ryser
from .sampling import distribution, mean_check
from .sdet import sdet, sdet_bruteforce


def _checks():
    rng = np.random.default_rng(2024)

    for name in ("reals", "complexes", "quaternions", "mat2", "mat3"):
        rep = check_associativity(builtin_algebra(name))
        yield f"associativity {name}", rep.ok, f"max violation {rep.max_violation:.2e}"

    for tag, d in (("rademacher", 1), ("real_gaussian", 1), ("cube_roots", 1), ("complex_gaussian", 1),
                   ("quaternion_gaussian", 1), ("matrix_gaussian", 2)):
        ok, z = mean_check(distribution(tag, d), 50_000, seed=7)
        yield f"zero mean {tag}", ok, f"max |z| {z.max():.2f}"

    A = (rng.random((7, 7)) < 0.6).astype(float)
    a, b = permanent_ryser(A), permanent_naive(A)
    yield "ryser vs naive permanent", abs(a - b) <= 1e-9 * max(1.0, abs(b)), f"{a} vs {b}"

    A1, A2 = rng.standard_normal((2, 4, 4))
    fast = mixed_discriminant([A1, A2], (2, 2))
    slow = mixed_discriminant_bruteforce([A1, A1, A2, A2])
    yield "mixed discriminant vs brute force", abs(fast - slow) <= 1e-8 * max(1.0, abs(slow)), f"{fast} vs {slow}"

    for name in ("quaternions", "mat2"):
        spec = builtin_algebra(name)
        B = rng.standard_normal((spec.r, 3, 3))
        x, y = sdet(spec, B), sdet_bruteforce(spec, B)
        yield f"sdet vs brute force ({name})", np.allclose(x, y, rtol=1e-9, atol=1e-9 * np.abs(y).max()), ""

    c1 = concentration_constant(1)
    yield "concentration constant d=1", abs(c1 - 0.2807) < 5e-3, f"{c1:.4f}"


def run_selftest(emit=print) -> bool:
    emit(f"kernel backend: {kernels.BACKEND}")
    ok_all = True
    for name, ok, detail in _checks():
        ok_all &= bool(ok)
        emit(f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else ""))
    return ok_all
