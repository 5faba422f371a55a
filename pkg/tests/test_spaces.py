import math

import numpy as np
import pytest

from coneglow import (
    BudgetError,
    DomainError,
    NormId,
    exp_coords,
    extreme_points,
    hilbert_metric,
    log_coords,
    norm,
    to_slice,
)


def test_norm_examples():
    assert norm([1, -1], NormId.SUP) == 1.0
    assert norm([3, 0, 0], NormId.VARIATION) == 3.0
    assert norm([1, 2, 2], NormId.L1) == 5.0
    assert norm([3, 4], NormId.EUCLID) == 5.0


def test_norm_zero_iff_zero():
    assert norm([0.0, 0.0], NormId.SUP) == 0.0
    assert norm([0.0, 0.0, 0.0], NormId.VARIATION) == 0.0
    assert norm([1e-300, 0.0], NormId.L1) > 0.0


def test_variation_rejects_off_hyperplane():
    with pytest.raises(DomainError):
        norm([1.0, 2.0, 0.5], NormId.VARIATION)


def test_vector_validation():
    with pytest.raises(DomainError):
        norm([1.0, float("nan")], NormId.SUP)
    with pytest.raises(DomainError):
        norm([1.0, float("inf")], NormId.L1)
    with pytest.raises(DomainError):
        norm([], NormId.SUP)


def test_hilbert_examples():
    assert hilbert_metric([2, 1, 0.5], [2, 1, 0.5]) == 0.0
    assert hilbert_metric([2, 1], [1, 1]) == pytest.approx(math.log(2), abs=1e-15)
    assert hilbert_metric([4, 1, 1], [1, 1, 1]) == pytest.approx(math.log(4), abs=1e-15)


def test_hilbert_domain_errors():
    with pytest.raises(DomainError):
        hilbert_metric([1.0, 0.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        hilbert_metric([1.0, -1.0], [1.0, 1.0])
    with pytest.raises(DomainError):
        hilbert_metric([1.0, 2.0], [1.0, 2.0, 3.0])


def test_hilbert_symmetry_and_triangle():
    rng = np.random.default_rng(0)
    for _ in range(300):
        x, y, z = np.exp(rng.uniform(-30, 30, (3, 5)))
        dxy = hilbert_metric(x, y)
        assert dxy == hilbert_metric(y, x)
        assert dxy <= hilbert_metric(x, z) + hilbert_metric(z, y) + 1e-12


def test_hilbert_scale_invariance():
    rng = np.random.default_rng(1)
    for _ in range(500):
        x, y = np.exp(rng.uniform(-10, 10, (2, 4)))
        a, b = np.exp(rng.uniform(-5, 5, 2))
        d0 = hilbert_metric(x, y)
        d1 = hilbert_metric(a * x, b * y)
        assert abs(d1 - d0) <= 1e-12 * max(1.0, d0)


def test_log_exp_examples():
    assert np.array_equal(log_coords([1.0, 1.0, 1.0]), np.zeros(3))
    assert np.allclose(log_coords([math.e ** 2, 1.0]), [2.0, 0.0], atol=1e-12)
    big = exp_coords([100.0, -100.0, 0.0])
    assert big[0] == pytest.approx(math.exp(100), rel=1e-15)
    assert big[1] == pytest.approx(math.exp(-100), rel=1e-15)
    assert big[2] == 1.0


def test_log_exp_roundtrip():
    rng = np.random.default_rng(2)
    for _ in range(200):
        y = rng.uniform(-200, 200, 6)
        y[-1] = 0.0
        x = exp_coords(y)
        assert np.allclose(log_coords(x), y, rtol=1e-12, atol=1e-12)
        assert np.array_equal(exp_coords(np.zeros(3)), np.ones(3))


def test_log_exp_domain_and_overflow():
    with pytest.raises(DomainError):
        log_coords([2.0, 2.0])
    with pytest.raises(DomainError):
        exp_coords([1.0, 1.0])
    with pytest.raises(OverflowError):
        exp_coords([1000.0, 0.0])


def test_isometry_between_slice_and_v0():
    rng = np.random.default_rng(3)
    for _ in range(500):
        x = to_slice(np.exp(rng.uniform(-50, 50, 4)))
        y = to_slice(np.exp(rng.uniform(-50, 50, 4)))
        lhs = norm(log_coords(x) - log_coords(y), NormId.VARIATION)
        rhs = hilbert_metric(x, y)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, rhs)


def test_extreme_points_sup_square():
    pts = extreme_points(NormId.SUP, 2)
    got = {tuple(p) for p in pts}
    assert got == {(1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_extreme_points_l1_cross():
    pts = extreme_points(NormId.L1, 3)
    got = {tuple(p) for p in pts}
    want = set()
    for i in range(3):
        e = [0.0] * 3
        e[i] = 1.0
        want.add(tuple(e))
        e[i] = -1.0
        want.add(tuple(e))
    assert got == want


def test_extreme_points_variation_n3():
    pts = extreme_points(NormId.VARIATION, 3)
    got = {tuple(p) for p in pts}
    want = {(1, 0, 0), (1, 1, 0), (0, 1, 0), (-1, 0, 0), (-1, -1, 0), (0, -1, 0)}
    assert got == want


@pytest.mark.parametrize("norm_id,count", [
    (NormId.SUP, lambda n: 2 ** n),
    (NormId.L1, lambda n: 2 * n),
    (NormId.VARIATION, lambda n: 2 ** n - 2),
])
@pytest.mark.parametrize("n", [2, 3, 4, 6])
def test_extreme_point_counts_and_norms(norm_id, count, n):
    pts = extreme_points(norm_id, n)
    assert len(pts) == count(n)
    for p in pts:
        assert norm(p, norm_id) == 1.0


def test_extreme_points_guards():
    with pytest.raises(DomainError):
        extreme_points(NormId.EUCLID, 2)
    with pytest.raises(BudgetError):
        extreme_points(NormId.SUP, 25)
