"""Backend parity and correctness of the hot evolution kernels."""

import numpy as np
import pytest

from ikemo import _kernels_py as pure
from ikemo import kernels


def _brute_force_ranks(F, CV):
    n = len(F)
    def dominates(p, q):
        if CV[p] < CV[q]:
            return True
        if CV[p] == CV[q] == 0.0:
            return all(F[p] <= F[q]) and any(F[p] < F[q])
        return False
    remaining = set(range(n))
    ranks = np.empty(n, dtype=np.int64)
    level = 0
    while remaining:
        front = {p for p in remaining
                 if not any(dominates(q, p) for q in remaining if q != p)}
        for p in front:
            ranks[p] = level
        remaining -= front
        level += 1
    return ranks


@pytest.mark.parametrize("seed", range(5))
def test_ranks_match_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = rng.integers(5, 40)
    F = rng.random((n, 2))
    CV = np.where(rng.random(n) < 0.4, rng.random(n), 0.0)
    expected = _brute_force_ranks(F, CV)
    assert np.array_equal(kernels.nondominated_ranks(F, CV), expected)
    assert np.array_equal(pure.nondominated_ranks(F, CV), expected)


def test_backends_agree_exactly():
    rng = np.random.default_rng(42)
    F = rng.random((60, 3))
    CV = np.where(rng.random(60) < 0.3, rng.random(60), 0.0)
    assert np.array_equal(kernels.nondominated_ranks(F, CV),
                          pure.nondominated_ranks(F, CV))

    k = 25
    Ff = rng.random((k, 2))
    orders = np.argsort(Ff, axis=0, kind="stable")
    assert np.array_equal(kernels.crowding_from_orders(Ff, orders),
                          pure.crowding_from_orders(Ff, orders))

    d = 12
    p1, p2 = rng.random((2, 9, d))
    lo, hi = np.zeros(d), np.ones(d)
    pu = rng.random(9)
    ug, ub, us = rng.random((3, 9, d))
    a = kernels.sbx_pairs(p1, p2, lo, hi, 30.0, 0.9, pu, ug, ub, us)
    b = pure.sbx_pairs(p1, p2, lo, hi, 30.0, 0.9, pu, ug, ub, us)
    np.testing.assert_allclose(a[0], b[0], rtol=0, atol=1e-15)
    np.testing.assert_allclose(a[1], b[1], rtol=0, atol=1e-15)

    ua, ud = rng.random((2, 9, d))
    ma = kernels.polynomial_mutation(p1, lo, hi, 50.0, 0.2, ua, ud)
    mb = pure.polynomial_mutation(p1, lo, hi, 50.0, 0.2, ua, ud)
    np.testing.assert_allclose(ma, mb, rtol=0, atol=1e-15)


def test_crowding_values():
    F = np.array([[0.0, 1.0], [0.5, 0.5], [1.0, 0.0]])
    orders = np.argsort(F, axis=0, kind="stable")
    d = kernels.crowding_from_orders(F, orders)
    assert np.isinf(d[0]) and np.isinf(d[2])
    assert d[1] == pytest.approx(2.0)

    two = np.array([[0.1, 0.9], [0.9, 0.1]])
    d2 = kernels.crowding_from_orders(two, np.argsort(two, axis=0, kind="stable"))
    assert np.isinf(d2).all()

    dup = np.tile([[0.3, 0.3]], (4, 1))
    dd = kernels.crowding_from_orders(dup, np.argsort(dup, axis=0, kind="stable"))
    assert np.isinf(dd).sum() == 2 and (dd[~np.isinf(dd)] == 0.0).all()


def test_sbx_identical_parents_unchanged():
    p = np.tile(np.linspace(0.2, 0.8, 6), (4, 1))
    rng = np.random.default_rng(0)
    c1, c2 = kernels.sbx_pairs(p, p.copy(), np.zeros(6), np.ones(6), 30.0, 0.9,
                               rng.random(4), *rng.random((3, 4, 6)))
    assert np.array_equal(c1, p) and np.array_equal(c2, p)


def test_sbx_mean_preservation_monte_carlo():
    rng = np.random.default_rng(123)
    d = 4
    p1 = np.tile([[0.3, 0.45, 0.55, 0.7]], (100_000, 1))
    p2 = np.tile([[0.5, 0.35, 0.65, 0.4]], (100_000, 1))
    lo, hi = np.zeros(d), np.ones(d)
    c1, c2 = kernels.sbx_pairs(p1, p2, lo, hi, 30.0, 0.9,
                               rng.random(100_000), *rng.random((3, 100_000, d)))
    child_mean = (c1.mean(axis=0) + c2.mean(axis=0)) / 2
    parent_mean = (p1[0] + p2[0]) / 2
    np.testing.assert_allclose(child_mean, parent_mean, atol=0.01)


def test_sbx_respects_bounds():
    rng = np.random.default_rng(5)
    d = 8
    lo = np.full(d, -1.0)
    hi = np.full(d, 2.0)
    p1 = lo + rng.random((200, d)) * (hi - lo)
    p2 = lo + rng.random((200, d)) * (hi - lo)
    c1, c2 = kernels.sbx_pairs(p1, p2, lo, hi, 2.0, 1.0,
                               rng.random(200), *rng.random((3, 200, d)))
    for c in (c1, c2):
        assert (c >= lo - 1e-12).all() and (c <= hi + 1e-12).all()


def test_mutation_zero_probability_is_identity():
    rng = np.random.default_rng(1)
    x = rng.random((10, 5))
    out = kernels.polynomial_mutation(x, np.zeros(5), np.ones(5), 50.0, 0.0,
                                      rng.random((10, 5)), rng.random((10, 5)))
    assert np.array_equal(out, x)


def test_mutation_respects_bounds():
    rng = np.random.default_rng(2)
    x = rng.random((300, 6))
    out = kernels.polynomial_mutation(x, np.zeros(6), np.ones(6), 5.0, 1.0,
                                      rng.random((300, 6)), rng.random((300, 6)))
    assert (out >= 0).all() and (out <= 1).all()
    assert not np.array_equal(out, x)
