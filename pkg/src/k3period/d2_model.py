"""The two-dimensional domain D_2 inside P^1 x P^1.

A point is a pair of projective pairs ``(x, y)``. The quadric isomorphism
``iota`` lands in the standard (3,1) quadric; ``tau`` is the antiholomorphic
involution whose fixed locus is the boundary. The affine chart used for the
metric matrix is ``x = [x:1]``, ``y = [y:1]``.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateError, DomainError, PreconditionError
from .indefinite import QuadraticSpace
from .period_domain import PeriodPoint, canonical_rep, h_alg, projective_distance

SPACE = QuadraticSpace.standard(1)
PAIR_TOL = 1e-9


def normalize_pair(u):
    u = np.asarray(u, dtype=complex)
    if u.shape != (2,) or not np.any(u):
        raise DegenerateError("projective pair must be a nonzero 2-vector")
    return canonical_rep(u)


def pairs_equal(u, v, tol=PAIR_TOL):
    """Projective equality via ``|det[u v]| < tol |u| |v|``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    return abs(u[0] * v[1] - u[1] * v[0]) < tol * np.linalg.norm(u) * np.linalg.norm(v)


def is_boundary(x, y, tol=PAIR_TOL):
    return pairs_equal(y, np.conj(np.asarray(x, dtype=complex)[::-1]), tol)


class D2Point:
    """Point of D_2: ``(x, y)`` not fixed by ``tau``."""

    __slots__ = ("x", "y")

    def __init__(self, x, y, tol=PAIR_TOL):
        x = normalize_pair(x)
        y = normalize_pair(y)
        if is_boundary(x, y, tol):
            raise DomainError("point is fixed by tau (boundary of D_2)")
        self.x = x
        self.y = y

    @classmethod
    def from_chart(cls, x, y):
        return cls([x, 1.0], [y, 1.0])

    def chart(self):
        if abs(self.x[1]) < 1e-14 or abs(self.y[1]) < 1e-14:
            raise DomainError("point outside the affine chart")
        return self.x[0] / self.x[1], self.y[0] / self.y[1]

    def __eq__(self, other):
        return (
            isinstance(other, D2Point)
            and pairs_equal(self.x, other.x)
            and pairs_equal(self.y, other.y)
        )

    def __repr__(self):
        return f"D2Point(x={np.round(self.x, 6)}, y={np.round(self.y, 6)})"

    def to_json(self):
        def enc(v):
            return [[float(c.real), float(c.imag)] for c in v]

        return {"x": enc(self.x), "y": enc(self.y)}

    @classmethod
    def from_json(cls, data):
        dec = lambda rows: np.array([complex(a, b) for a, b in rows])  # noqa: E731
        return cls(dec(data["x"]), dec(data["y"]))


def iota(x, y):
    """Quadric embedding; broadcast over leading axes of the pairs."""
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if np.any(np.all(x == 0, axis=-1)) or np.any(np.all(y == 0, axis=-1)):
        raise DegenerateError("zero projective pair")
    x0, x1 = x[..., 0], x[..., 1]
    y0, y1 = y[..., 0], y[..., 1]
    return np.stack(
        [x0 * y0 + x1 * y1, 1j * (x1 * y1 - x0 * y0), x1 * y0 - x0 * y1, x1 * y0 + x0 * y1],
        axis=-1,
    )


def iota_point(p: D2Point) -> PeriodPoint:
    return PeriodPoint(SPACE, iota(p.x, p.y))


def hmatrix(X):
    """The 2x2 matrix model of a 4-vector used for the SL_2 action."""
    x1, x2, x3, x4 = np.asarray(X, dtype=complex)
    return np.array([[1j * (x4 - x3), -x2 + 1j * x1], [x2 + 1j * x1, 1j * (x4 + x3)]])


def hmatrix_inverse(H):
    H = np.asarray(H, dtype=complex)
    x4 = (H[0, 0] + H[1, 1]) / 2j
    x3 = (H[1, 1] - H[0, 0]) / 2j
    x1 = (H[0, 1] + H[1, 0]) / 2j
    x2 = (H[1, 0] - H[0, 1]) / 2
    return np.array([x1, x2, x3, x4])


def iota_inverse(X, tol=1e-8):
    """Recover ``(x, y)`` from a point of the quadric via the rank-one matrix model."""
    H = hmatrix(X)
    scale = np.abs(H).max()
    if scale == 0:
        raise DegenerateError("zero vector")
    if abs(np.linalg.det(H)) > tol * scale**2:
        raise DomainError("vector is not on the quadric")
    i, j = np.unravel_index(np.argmax(np.abs(H)), H.shape)
    x = H[:, j]
    row = H[i, :]  # proportional to (y1, y0)
    return normalize_pair(x), normalize_pair(row[::-1])


def tau(x, y):
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    return np.conj(y[::-1]), np.conj(x[::-1])


def tau_point(p: D2Point) -> D2Point:
    return D2Point(*tau(p.x, p.y))


def boundary_test(x, y, tol=PAIR_TOL):
    tx, ty = tau(x, y)
    return pairs_equal(tx, x, tol) and pairs_equal(ty, y, tol)


def metric_matrix(x, y):
    """Metric of D_2 in the chart ``([x:1],[y:1])``: zero diagonal, ``1/(x conj(y) - 1)^2`` off it."""
    x = complex(x)
    y = complex(y)
    d = x * np.conj(y) - 1.0
    if abs(d) < 1e-14:
        raise DomainError("chart violation: x * conj(y) = 1")
    m = 1.0 / d**2
    return np.array([[0.0, m], [np.conj(m), 0.0]], dtype=complex)


def chart_vectors(x, y):
    """Lift ``u`` and the coordinate vectors ``(v_x, v_y)`` through ``iota``."""
    u = np.array([x * y + 1, 1j * (1 - x * y), y - x, x + y], dtype=complex)
    vx = np.array([y, -1j * y, -1, 1], dtype=complex)
    vy = np.array([x, -1j * x, 1, 1], dtype=complex)
    return u, vx, vy


def metric_matrix_via_iota(x, y):
    u, vx, vy = chart_vectors(x, y)
    V = np.array([vx, vy])
    return h_alg(SPACE, u, V[:, None, :], V[None, :, :])


def _check_sl2(A, tol=1e-10):
    A = np.asarray(A, dtype=complex)
    if A.shape != (2, 2):
        raise PreconditionError("A must be 2x2")
    if abs(np.linalg.det(A) - 1.0) > tol:
        raise PreconditionError("A is not unimodular")
    return A


def tilde(A):
    (a, b), (c, d) = A
    return np.conj(np.array([[d, c], [b, a]]))


def sl2_action(A, p: D2Point) -> D2Point:
    """Diagonal action ``(A x, A~ y)``."""
    A = _check_sl2(A)
    return D2Point(A @ p.x, tilde(A) @ p.y)


def sl2_action_hmatrix(A, p: D2Point) -> D2Point:
    """Same action through ``X -> A H(X) conj(A)^T`` and the inverse of ``iota``."""
    A = _check_sl2(A)
    H = A @ hmatrix(iota(p.x, p.y)) @ np.conj(A).T
    return D2Point(*iota_inverse(hmatrix_inverse(H)))


def sl2_matrix_4(A):
    """The real-linear map on C^4 induced by ``A`` (complex-linear in X)."""
    A = _check_sl2(A)
    cols = []
    for k in range(4):
        e = np.zeros(4, dtype=complex)
        e[k] = 1
        cols.append(hmatrix_inverse(A @ hmatrix(e) @ np.conj(A).T))
    return np.array(cols).T


def swap(p: D2Point) -> D2Point:
    return D2Point(p.y, p.x)


def point_distance(p: D2Point, q: D2Point):
    return max(projective_distance(p.x, q.x), projective_distance(p.y, q.y))


def random_point(rng, scale=1.0):
    while True:
        z = (rng.standard_normal(4) + 1j * rng.standard_normal(4)) * scale
        x, y = z[:2], z[2:]
        if not is_boundary(x, y, 1e-3):
            return D2Point(x, y)
