import math

import numpy as np
import pytest

from symdet.algebra import AlgebraError, AlgebraMatrix, builtin_algebra
from symdet.multilinear import SizeGuardError, compositions, determinant
from symdet.sdet import cdet_batch, cdet_bruteforce, sdet, sdet_batch, sdet_bruteforce, sdet_plan, u_table

ALGEBRAS = ["reals", "complexes", "quaternions", "mat2"]


def quaternion_example():
    # [[i, j], [k, 1]]
    L = np.zeros((4, 2, 2))
    L[1, 0, 0] = L[2, 0, 1] = L[3, 1, 0] = L[0, 1, 1] = 1.0
    return L


def close(x, y, rtol=1e-9):
    scale = max(np.abs(y).max(), 1e-300)
    return np.allclose(x, y, rtol=rtol, atol=rtol * scale)


def test_u_table_complex_examples():
    C = builtin_algebra("complexes")
    t = u_table(C, 2)
    assert np.array_equal(t[(1, 1)], [0.0, 2.0])
    assert np.array_equal(t[(0, 2)], [-1.0, 0.0])
    assert np.array_equal(t[(1, 0)], [1.0, 0.0])


def test_u_table_quaternion_cancellation():
    H = builtin_algebra("quaternions")
    assert np.array_equal(u_table(H, 2)[(0, 1, 1, 0)], np.zeros(4))


def test_u_table_complex_closed_form():
    # commutative: u(k1, k2) = C(n, k2) i^k2
    C = builtin_algebra("complexes")
    t = u_table(C, 8)
    powers = [np.array(v) for v in ([1, 0], [0, 1], [-1, 0], [0, -1])]
    for n in range(1, 9):
        for k in compositions(n, 2):
            assert np.array_equal(t[k], math.comb(n, k[1]) * powers[k[1] % 4])


@pytest.mark.parametrize("name", ["quaternions", "mat2"])
def test_u_table_structure(name):
    spec = builtin_algebra(name)
    t = u_table(spec, 4)
    for i in range(spec.r):
        assert np.array_equal(t[tuple(int(j == i) for j in range(spec.r))], spec.basis(i))
    for m in range(1, 5):
        assert len(t.level(m)) == math.comb(m + spec.r - 1, spec.r - 1)
    # words of length 2 summed directly
    for k in compositions(2, spec.r):
        idx = [i for i, c in enumerate(k) for _ in range(c)]
        words = {(idx[0], idx[1]), (idx[1], idx[0])}
        direct = sum(spec.beta[a, b] for a, b in words)
        assert np.allclose(t[k], direct)


def test_sdet_reals_is_det(rng):
    R = builtin_algebra("reals")
    A = rng.standard_normal((6, 6))
    assert sdet(R, A[None])[0] == pytest.approx(determinant(A), rel=1e-12)


@pytest.mark.parametrize("name", ALGEBRAS + ["mat3"])
def test_sdet_one_by_one(name, rng):
    spec = builtin_algebra(name)
    a = rng.standard_normal(spec.r)
    assert np.allclose(sdet(spec, a.reshape(spec.r, 1, 1)), a, rtol=1e-14)


def test_quaternion_hand_example():
    H = builtin_algebra("quaternions")
    L = quaternion_example()
    assert np.allclose(sdet(H, L), [0, 1, 0, 0], atol=1e-15)
    assert np.allclose(sdet_bruteforce(H, L), [0, 1, 0, 0], atol=1e-15)
    assert np.allclose(cdet_bruteforce(H, L), 0.0, atol=1e-15)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_zero_row(name, rng):
    spec = builtin_algebra(name)
    L = rng.standard_normal((spec.r, 3, 3))
    L[:, 1, :] = 0.0
    assert np.all(sdet_bruteforce(spec, L) == 0.0)
    assert np.allclose(sdet(spec, L), 0.0, atol=1e-13)


@pytest.mark.parametrize("name", ALGEBRAS)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_oracle_equivalence(name, n, rng):
    spec = builtin_algebra(name)
    for _ in range(5):
        L = rng.standard_normal((spec.r, n, n))
        assert close(sdet(spec, L), sdet_bruteforce(spec, L))


def test_commutative_collapse(rng):
    R = builtin_algebra("reals")
    A = rng.standard_normal((4, 4))
    assert sdet(R, A[None])[0] == pytest.approx(determinant(A), rel=1e-12)
    assert cdet_bruteforce(R, A[None])[0] == pytest.approx(determinant(A), rel=1e-12)

    C = builtin_algebra("complexes")
    L = rng.standard_normal((2, 3, 3))
    z = np.linalg.det(L[0] + 1j * L[1])
    for val in (sdet(C, L), sdet_bruteforce(C, L), cdet_bruteforce(C, L)):
        assert np.allclose(val, [z.real, z.imag], rtol=1e-10, atol=1e-12)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_row_multilinearity(name, rng):
    spec = builtin_algebra(name)
    L = rng.standard_normal((spec.r, 4, 4))
    base = sdet(spec, L)
    for t in (0.0, 2.0, -1.0):
        S = L.copy()
        S[:, 2, :] *= t
        assert close(sdet(spec, S), t * base, rtol=1e-10) if t else np.allclose(sdet(spec, S), 0.0, atol=1e-13)


@pytest.mark.parametrize("name", ALGEBRAS)
def test_row_swap_negates(name, rng):
    spec = builtin_algebra(name)
    L = rng.standard_normal((spec.r, 4, 4))
    S = L[:, [2, 1, 0, 3], :]
    assert close(sdet(spec, S), -sdet(spec, L), rtol=1e-10)
    assert close(sdet_bruteforce(spec, S), -sdet_bruteforce(spec, L), rtol=1e-12)


def test_cayley_differs_from_sdet_when_noncommutative(rng):
    H = builtin_algebra("quaternions")
    L = rng.standard_normal((4, 3, 3))
    assert not np.allclose(sdet(H, L), cdet_bruteforce(H, L))


@pytest.mark.parametrize("name", ALGEBRAS)
def test_batch_matches_single(name, rng):
    spec = builtin_algebra(name)
    L = rng.standard_normal((7, spec.r, 3, 3))
    out = sdet_batch(spec, L)
    for s in range(7):
        assert close(out[s], sdet(spec, L[s]), rtol=1e-11)
    cd = cdet_batch(spec, L)
    for s in range(7):
        assert close(cd[s], cdet_bruteforce(spec, L[s]), rtol=1e-12)


def test_batch_chunking(rng):
    spec = builtin_algebra("mat2")
    L = rng.standard_normal((9, 4, 3, 3))
    a, b = sdet_batch(spec, L), sdet_batch(spec, L, chunk_floats=1)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12 * np.abs(a).max())
    assert np.array_equal(a, sdet_batch(spec, L))


def test_plan_skips_zero_u():
    plan = sdet_plan(builtin_algebra("quaternions"), 3)
    assert plan.skipped > 0
    assert len(plan.compositions) + plan.skipped == math.comb(3 + 3, 3)
    assert sdet_plan(builtin_algebra("quaternions"), 3) is plan


def test_timings_reported(rng):
    t = {}
    sdet(builtin_algebra("mat2"), rng.standard_normal((4, 3, 3)), timings=t)
    assert set(t) == {"u_table", "discriminants"}


def test_guards_and_validation(rng):
    H = builtin_algebra("quaternions")
    with pytest.raises(SizeGuardError):
        sdet_bruteforce(H, np.zeros((4, 6, 6)))
    with pytest.raises(SizeGuardError):
        cdet_bruteforce(H, np.zeros((4, 9, 9)))
    with pytest.raises(AlgebraError):
        sdet(H, np.zeros((2, 3, 3)))
    with pytest.raises(AlgebraError):
        AlgebraMatrix(np.zeros((4, 0, 0)))
    with pytest.raises(SizeGuardError):
        sdet_plan(builtin_algebra("mat5"), 20)


@pytest.mark.perf
def test_polynomial_growth():
    import time

    spec = builtin_algebra("mat2")
    rng = np.random.default_rng(0)
    times = {}
    for n in (6, 12):
        sdet_plan(spec, n)
        L = rng.standard_normal((spec.r, n, n))
        t0 = time.perf_counter()
        for _ in range(3):
            sdet(spec, L)
        times[n] = time.perf_counter() - t0
    assert times[12] / times[6] < 2 ** (spec.r + 4)
