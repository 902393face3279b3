import numpy as np
import pytest

from k3period import d2_model as d2
from k3period import period_domain as pd
from k3period.errors import DomainError, PreconditionError


def test_iota_examples(rng):
    assert np.allclose(d2.iota([1, 0], [1, 0]), [1, -1j, 0, 0])
    assert np.allclose(d2.iota([0, 1], [0, 1]), [1, 1j, 0, 0])
    for _ in range(100):
        x, y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        X = d2.iota(x, y)
        assert abs(X[0] ** 2 + X[1] ** 2 + X[2] ** 2 - X[3] ** 2) < 1e-12 * np.vdot(X, X).real


def test_tau_and_boundary(rng):
    assert d2.boundary_test([1, 1], [1, 1])
    assert not d2.boundary_test([0, 1], [0, 1])
    for _ in range(1000):
        x, y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        tx, ty = d2.tau(*d2.tau(x, y))
        assert d2.pairs_equal(tx, x) and d2.pairs_equal(ty, y)
    with pytest.raises(DomainError):
        d2.D2Point([1, 1], [1, 1])


def test_iota_intertwines_membership(rng):
    for _ in range(1000):
        x, y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        m = pd.membership(d2.SPACE, d2.iota(x, y))
        assert (m is pd.Membership.IN_D) == (not d2.is_boundary(x, y))


def test_metric_matrix(rng):
    assert np.allclose(d2.metric_matrix(0, 0), [[0, 1], [1, 0]])
    M = d2.metric_matrix(1, 1j)
    assert np.isclose(M[0, 1], 1 / (-1j - 1) ** 2)
    assert np.allclose(M, d2.metric_matrix_via_iota(1, 1j))
    for _ in range(100):
        x, y = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        M = d2.metric_matrix(x, y)
        assert M[0, 0] == 0 and M[1, 1] == 0
        assert np.abs(M - d2.metric_matrix_via_iota(x, y)).max() < 1e-10 * np.abs(M).max()
    with pytest.raises(DomainError):
        d2.metric_matrix(2.0, 0.5)


def test_iota_inverse_roundtrip(rng):
    for _ in range(100):
        p = d2.random_point(rng)
        assert d2.D2Point(*d2.iota_inverse(d2.iota(p.x, p.y))) == p


def _random_sl2(rng):
    M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    return M / np.sqrt(np.linalg.det(M))


def test_sl2_examples(rng):
    p = d2.D2Point([0, 1], [0, 1])
    assert d2.sl2_action(np.eye(2), p) == p
    q = d2.sl2_action(np.array([[1, 1], [0, 1]]), p)
    assert q == d2.D2Point([1, 1], [0, 1])
    A = np.array([[0, 1], [-1, 0]])
    r = d2.D2Point([1, 0], [1, 0])
    assert d2.sl2_action(A, r) == d2.sl2_action_hmatrix(A, r)
    with pytest.raises(PreconditionError):
        d2.sl2_action(2 * np.eye(2), p)


def test_sl2_homomorphism_and_hmatrix(rng):
    for _ in range(100):
        A, B = _random_sl2(rng), _random_sl2(rng)
        p = d2.random_point(rng)
        assert d2.sl2_action(A @ B, p) == d2.sl2_action(A, d2.sl2_action(B, p))
        assert d2.sl2_action(A, p) == d2.sl2_action_hmatrix(A, p)


def test_sl2_is_isometry(rng):
    for _ in range(100):
        A = _random_sl2(rng)
        L = d2.sl2_matrix_4(A)
        p = d2.random_point(rng)
        X = d2.iota(p.x, p.y)
        v, w = rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))
        a = pd.h_alg(d2.SPACE, X, v, w)
        b = pd.h_alg(d2.SPACE, L @ X, L @ v, L @ w)
        assert abs(a - b) < 1e-9 * max(1.0, abs(a))


def test_swap(rng):
    for _ in range(100):
        p = d2.random_point(rng)
        assert d2.swap(d2.swap(p)) == p
        x, y = p.chart()
        u, v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        M, Ms = d2.metric_matrix(x, y), d2.metric_matrix(y, x)
        a = np.array([u, v]) @ M @ np.conj([u, v])
        b = np.array([v, u]) @ Ms @ np.conj([v, u])
        assert abs(a - b) < 1e-12 * max(1, abs(a))
    x = np.array([0.3 + 1j, 2.0])
    bx, by = x, np.conj(x[::-1])
    assert d2.is_boundary(bx, by) and d2.is_boundary(by, bx)


def test_twistor_conics_have_bidegree_one_one(rng):
    # the conic of a positive 3-plane in the (3,1) model projects with degree 1 to each factor
    from k3period.indefinite import QuadraticSpace

    W = pd.TwistorLine(QuadraticSpace.standard(1), np.eye(4)[:3] + 0.2 * np.outer(rng.standard_normal(3), [0, 0, 0, 1]))
    c = pd.twistor_parametrize(W)
    t = np.linspace(-2, 2, 9) + 0.3j
    xs = np.array([d2.iota_inverse(f)[0] for f in c(t)])
    ys = np.array([d2.iota_inverse(f)[1] for f in c(t)])
    # a degree-1 map P^1 -> P^1 is a Moebius map: cross-ratios of images equal those of sources
    def cr(a, b, c_, d):
        return (a - c_) * (b - d) / ((a - d) * (b - c_))
    zx = xs[:, 0] / xs[:, 1]
    zy = ys[:, 0] / ys[:, 1]
    assert np.isclose(cr(*zx[:4]), cr(*t[:4]))
    assert np.isclose(cr(*zy[:4]), cr(*t[:4]))
