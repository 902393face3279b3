"""The domains D and Omega, their pseudo-Kaehler metric and curvature.

Conventions
-----------
A point is a line spanned by ``sigma`` in ``C^(3+p)``. It lies in Omega when
``N = q(sigma, conj(sigma)) > 0`` and in D when additionally ``q(sigma, sigma) = 0``.
The canonical metric is the closed form

    h_alg(v, w) = -[q(v, w*) N - q(v, sigma*) q(sigma, w*)] / N**2,

which is ``-d dbar log N`` evaluated on tangent representatives. The
curvature form of the tautological line in the ``(i/2) dz ^ dzbar``
normalization equals ``kappa_geom * h_alg`` with ``kappa_geom`` measured by
:func:`curvature_factor_calibrate`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import numerics
from .curves import PolynomialCurve
from .errors import (
    CalibrationError,
    DegenerateError,
    DomainError,
    NumericalError,
    PreconditionError,
)
from .indefinite import (
    QuadraticSpace,
    Signature,
    h_sesquilinear,
    orthogonal_complement,
    positive_vector_in,
    q_bilinear,
    q_gram_schmidt,
    restricted_gram,
    signature,
)

ISO_TOL = 1e-9


class Membership(enum.Enum):
    IN_D = "IN_D"
    IN_BOUNDARY_QUADRIC = "IN_BOUNDARY_QUADRIC"
    IN_OMEGA_ONLY = "IN_OMEGA_ONLY"
    OUTSIDE = "OUTSIDE"


def membership(space: QuadraticSpace, sigma, tol=ISO_TOL) -> Membership:
    sigma = np.asarray(sigma, dtype=complex)
    scale = float(np.vdot(sigma, sigma).real)
    if scale == 0.0:
        raise DegenerateError("zero vector has no line")
    N = float(h_sesquilinear(space, sigma, sigma).real)
    iso = abs(q_bilinear(space, sigma, sigma)) <= tol * max(abs(N), scale)
    pos = N > tol * scale
    if iso:
        return Membership.IN_D if pos else Membership.IN_BOUNDARY_QUADRIC
    return Membership.IN_OMEGA_ONLY if pos else Membership.OUTSIDE


def canonical_rep(v):
    """Unit Euclidean norm, first maximal-modulus coordinate rotated to positive real."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    a = np.abs(v)
    k = int(np.flatnonzero(a >= a.max() * (1 - 1e-12))[0])
    return v * (np.conj(v[k]) / a[k])


def projective_distance(u, v):
    """Sine of the Fubini-Study angle between the lines of ``u`` and ``v``."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    r = u - (np.vdot(v, u) / np.vdot(v, v)) * v
    return float(np.linalg.norm(r) / np.linalg.norm(u))


def projectively_equal(u, v, tol=1e-9):
    return projective_distance(u, v) < tol


class PeriodPoint:
    """A line in Omega (``isotropic=False``) or in D (``isotropic=True``).

    The caller's representative is kept as ``rep``; comparisons and
    serialization use :func:`canonical_rep`.
    """

    __slots__ = ("space", "rep", "isotropic")

    def __init__(self, space: QuadraticSpace, sigma, isotropic=True, tol=ISO_TOL):
        sigma = np.array(sigma, dtype=complex)
        if sigma.shape != (space.dim,):
            raise PreconditionError(f"representative must have length {space.dim}")
        m = membership(space, sigma, tol)
        if isotropic and m is not Membership.IN_D:
            raise DomainError(f"not a point of D ({m.value})")
        if not isotropic and m not in (Membership.IN_D, Membership.IN_OMEGA_ONLY):
            raise DomainError(f"not a point of Omega ({m.value})")
        sigma.setflags(write=False)
        self.space = space
        self.rep = sigma
        self.isotropic = isotropic

    @property
    def canonical(self):
        return canonical_rep(self.rep)

    @property
    def norm2(self):
        return float(h_sesquilinear(self.space, self.rep, self.rep).real)

    def __eq__(self, other):
        return (
            isinstance(other, PeriodPoint)
            and other.space == self.space
            and projectively_equal(self.rep, other.rep)
        )

    def __hash__(self):
        return hash(np.round(self.canonical, 8).tobytes())

    def __repr__(self):
        kind = "D" if self.isotropic else "Omega"
        return f"PeriodPoint({kind}, {np.round(self.canonical, 6)})"

    def to_positive_2plane(self):
        """Oriented q-orthonormal pair ``(Re sigma, Im sigma)`` after scaling."""
        if not self.isotropic:
            raise DomainError("only points of D correspond to positive 2-planes")
        s = self.rep * np.sqrt(2.0 / self.norm2)
        return s.real.copy(), s.imag.copy()

    def to_json(self):
        return {
            "space": self.space.to_json(),
            "sigma": [[float(c.real), float(c.imag)] for c in self.canonical],
            "isotropic": self.isotropic,
        }

    @classmethod
    def from_json(cls, data):
        space = QuadraticSpace.from_json(data["space"])
        sigma = np.array([complex(a, b) for a, b in data["sigma"]])
        return cls(space, sigma, isotropic=data.get("isotropic", True))


@dataclass(frozen=True)
class TangentRep:
    """Tangent vector at ``base`` represented by ``vec`` modulo ``C * sigma``."""

    base: PeriodPoint
    vec: np.ndarray

    def __post_init__(self):
        v = np.array(self.vec, dtype=complex)
        if v.shape != (self.base.space.dim,):
            raise PreconditionError("tangent vector has wrong length")
        if self.base.isotropic:
            s = self.base.rep
            scale = np.linalg.norm(v) * np.linalg.norm(s)
            if abs(q_bilinear(self.base.space, v, s)) > 1e-9 * max(scale, 1e-300):
                raise DomainError("vector is not tangent to the quadric: q(v, sigma) != 0")
        v.setflags(write=False)
        object.__setattr__(self, "vec", v)

    def canonical(self):
        """Representative with ``q(v, conj(sigma)) = 0``."""
        s = self.base.rep
        sp = self.base.space
        c = h_sesquilinear(sp, self.vec, s) / h_sesquilinear(sp, s, s)
        return self.vec - c * s


def random_point(space, rng, isotropic=True):
    """Seeded random point of D (or Omega)."""
    if isotropic:
        B = q_gram_schmidt(space, _random_positive_frame(space, rng, 2))[0]
        return PeriodPoint(space, B[0] + 1j * B[1])
    while True:
        v = random_omega_vectors(space, 1, rng)[0]
        if h_sesquilinear(space, v, v).real > 1e-3 * np.vdot(v, v).real:
            return PeriodPoint(space, v, isotropic=False)


def random_omega_vectors(space, k, rng):
    """``k`` random representatives of Omega, as rows.

    In an eigenbasis of the form, ``z = a + b`` with ``a`` in the positive and
    ``b`` in the negative part and ``h(b, b) = -rho^2 h(a, a)``, ``rho`` uniform
    in [0, 1), so the samples reach up to the boundary.
    """
    ev, U = np.linalg.eigh(space.gram)
    pos = U[:, ev > 0] / np.sqrt(ev[ev > 0])
    neg = U[:, ev < 0] / np.sqrt(-ev[ev < 0])

    def cgauss(m):
        return rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))

    a = cgauss(pos.shape[1])
    b = cgauss(neg.shape[1])
    rho = rng.uniform(0.0, 1.0, k)
    b = b * (rho * np.linalg.norm(a, axis=1) / np.linalg.norm(b, axis=1))[:, None]
    return a @ pos.T + b @ neg.T


def _random_positive_frame(space, rng, k):
    """``k`` independent real vectors spanning a positive k-plane."""
    evals, evecs = np.linalg.eigh(space.gram)
    pos = evecs[:, evals > 0]
    neg = evecs[:, evals < 0]
    while True:
        A = rng.standard_normal((3, k))
        # a random plane: positive part plus a contraction into the negative part
        C = rng.standard_normal((neg.shape[1], k)) * (0.7 / np.sqrt(neg.shape[1] * 3))
        vecs = (pos @ A + neg @ C).T
        if signature(restricted_gram(space, vecs)).positive == k:
            return vecs


def random_tangent(point, rng):
    """Random canonical tangent vector (in H^{1,1} for points of D)."""
    sp = point.space
    v = rng.standard_normal(sp.dim) + 1j * rng.standard_normal(sp.dim)
    if point.isotropic:
        # project off sigma and sigma-bar along the hodge decomposition
        _, alpha, _ = hodge_project(point, v)
        return TangentRep(point, alpha)
    return TangentRep(point, TangentRep(point, v).canonical())


def from_positive_2plane(space, e1, e2, tol=1e-9) -> PeriodPoint:
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    G = restricted_gram(space, np.vstack([e1, e2]))
    if np.abs(G - np.eye(2)).max() > tol:
        raise DomainError("input pair is not q-orthonormal and positive")
    return PeriodPoint(space, e1 + 1j * e2)


def hodge_decompose(point):
    """Return ``(sigma, basis of H^{1,1}, conj(sigma))`` with a real H^{1,1} basis."""
    if not point.isotropic:
        raise DomainError("Hodge decomposition requires a point of D")
    a, b = point.to_positive_2plane()
    return point.rep, orthogonal_complement(point.space, np.vstack([a, b])), np.conj(point.rep)


def hodge_project(point, v):
    """Split ``v = l20 sigma + alpha + l02 conj(sigma)`` with alpha in H^{1,1}."""
    if not point.isotropic:
        raise DomainError("Hodge projection requires a point of D")
    sp = point.space
    s = point.rep
    v = np.asarray(v, dtype=complex)
    sb = np.conj(s)
    l20 = q_bilinear(sp, v, sb) / q_bilinear(sp, s, sb)
    l02 = q_bilinear(sp, v, s) / q_bilinear(sp, sb, s)
    alpha = v - l20 * s - l02 * sb
    return complex(l20), alpha, complex(l02)


def h_alg(space, sigma, v, w):
    """Closed-form metric at ``sigma`` (broadcast over leading axes)."""
    sigma = np.asarray(sigma, dtype=complex)
    N = h_sesquilinear(space, sigma, sigma).real
    num = h_sesquilinear(space, v, w) * N - h_sesquilinear(space, v, sigma) * h_sesquilinear(
        space, sigma, w
    )
    return -num / N**2


def metric_tensor(space, sigma):
    """Matrix ``H`` with ``h_alg(v, w) = v^T H conj(w)`` (batched over leading axes)."""
    sigma = np.asarray(sigma, dtype=complex)
    G = space.gram
    N = h_sesquilinear(space, sigma, sigma).real
    a = np.conj(sigma) @ G  # q(e_a, conj sigma)
    b = sigma @ G  # q(sigma, e_b)
    return -G / N[..., None, None] + np.einsum("...a,...b->...ab", a, b) / (N**2)[..., None, None]


def gs_metric(point, v, w):
    """Metric value on two tangent vectors at the same point."""
    if isinstance(v, TangentRep):
        if v.base is not point and v.base != point:
            raise PreconditionError("tangent vector based at a different point")
        v = v.vec
    if isinstance(w, TangentRep):
        if w.base is not point and w.base != point:
            raise PreconditionError("tangent vector based at a different point")
        w = w.vec
    return complex(h_alg(point.space, point.rep, v, w))


def _chart_sigma(chart_point):
    z = np.asarray(chart_point, dtype=complex)
    return np.concatenate([np.ones(z.shape[:-1] + (1,), dtype=complex), z], axis=-1)


def quadric_tangent_basis(space, sigma):
    """Chart tangent basis of the quadric: solve for the coordinate of largest gradient."""
    g = space.gram @ sigma
    n = space.dim
    cand = np.arange(1, n)
    j = int(cand[np.argmax(np.abs(g[cand]))])
    if abs(g[j]) == 0:
        raise DegenerateError("quadric gradient vanishes in the chart")
    rows = []
    for k in range(1, n):
        if k == j:
            continue
        e = np.zeros(n, dtype=complex)
        e[k] = 1.0
        e[j] = -g[k] / g[j]
        rows.append(e)
    return np.array(rows), j


def metric_matrix_chart(space, chart_point, which="Omega"):
    """Matrix of ``h_alg`` in the affine chart ``sigma = (1, z_2, ..., z_n)``.

    For ``which="D"`` the matrix is restricted to the tangent space of the
    quadric, with the chart coordinate of largest gradient eliminated.
    """
    sigma = _chart_sigma(chart_point)
    if sigma.shape != (space.dim,):
        raise PreconditionError("chart coordinates must have length dim - 1")
    H = metric_tensor(space, sigma)
    if which == "Omega":
        if h_sesquilinear(space, sigma, sigma).real <= 0:
            raise DomainError("chart point not in Omega")
        return H[1:, 1:]
    if which == "D":
        if membership(space, sigma) is not Membership.IN_D:
            raise DomainError("chart point not in D")
        B, _ = quadric_tangent_basis(space, sigma)
        return B @ H @ B.conj().T
    raise PreconditionError("which must be 'D' or 'Omega'")


def curvature_factor_calibrate(space, samples, rng, h=1e-3, tol=1e-4):
    """Measure ``kappa_geom``: the curvature form over ``h_alg`` along random sections.

    Each sample draws a point of D, a tangent direction ``v`` and a random
    holomorphic section ``s(t) = sigma + t v + t^2 w``; the ratio
    ``-2 d dbar log q(s, conj s) / h_alg(v, v)`` is computed by finite differences.
    """
    ratios = []
    while len(ratios) < samples:
        pt = random_point(space, rng)
        v = random_tangent(pt, rng).vec
        hv = h_alg(space, pt.rep, v, v).real
        if abs(hv) < 0.05 * np.vdot(v, v).real / pt.norm2:
            continue
        w = rng.standard_normal(space.dim) + 1j * rng.standard_normal(space.dim)
        s0 = pt.rep

        def logN(t, s0=s0, v=v, w=w):
            s = s0 + t[..., None] * v + (t**2)[..., None] * w
            return np.log(h_sesquilinear(space, s, s).real)

        ddb = numerics.dzdzbar(logN, np.zeros(1, dtype=complex), h=h)[0]
        ratios.append(-2.0 * ddb / hv)
    ratios = np.array(ratios)
    kappa = float(ratios.mean())
    spread = float(np.ptp(ratios) / abs(kappa))
    if spread > tol:
        raise CalibrationError(f"curvature ratio not constant: relative spread {spread:.3e}")
    return kappa


def tangent_basis(point):
    """Basis of canonical tangent representatives (H^{1,1} on D, h-complement on Omega)."""
    sp = point.space
    if point.isotropic:
        return hodge_decompose(point)[1].astype(complex)
    return orthogonal_complement(sp, np.conj(point.rep)[None, :])


def metric_signature_at(point) -> Signature:
    B = tangent_basis(point)
    M = h_alg(point.space, point.rep, B[:, None, :], B[None, :, :])
    sig = signature(M)
    if sig.null:
        raise NumericalError("metric degenerate at point")
    return sig


def positive_subdomain_basis(space, point, rng=None):
    """Positive 2-plane of ``point`` plus a signature (1,1) plane orthogonal to it."""
    P = np.vstack(point.to_positive_2plane())
    comp = orthogonal_complement(space, P)
    w = positive_vector_in(space, comp, rng)
    if w is None:
        raise NumericalError("no positive vector in the complement of a positive 2-plane")
    comp2 = orthogonal_complement(space, np.vstack([P, w]))
    ev, U = np.linalg.eigh(restricted_gram(space, comp2))
    n = U[:, 0] @ comp2
    if ev[0] >= 0:
        raise NumericalError("no negative vector in the complement")
    return P, w, n


def subdomain_embed(point, rng=None):
    """Basis (rows) of a signature (3,1) subspace ``P + Q`` containing ``point``.

    Rows are q-orthonormal: the two vectors of the positive 2-plane of the
    point, a positive vector and a negative vector of its complement.
    """
    if point.space.dim < 4:
        raise PreconditionError("dimension too small")
    P, w, n = positive_subdomain_basis(point.space, point, rng)
    B, _ = q_gram_schmidt(point.space, np.vstack([P, w, n]))
    return B


def to_subdomain_coords(space, basis, v):
    """Coordinates of ``v`` in a q-orthonormal ``basis`` (rows)."""
    Gs = restricted_gram(space, basis)
    return np.linalg.solve(Gs, basis @ space.gram @ np.asarray(v))


class TwistorLine:
    """Conic of periods inside the complexification of a positive 3-plane."""

    def __init__(self, space, W_basis, tol=1e-9):
        W = np.atleast_2d(np.asarray(W_basis, dtype=float))
        if W.shape != (3, space.dim):
            raise PreconditionError("twistor line needs three vectors")
        if signature(restricted_gram(space, W), tol).positive != 3:
            raise DomainError("span is not a positive 3-plane")
        B, _ = q_gram_schmidt(space, W)
        self.space = space
        self.W = B

    def contains(self, point, tol=1e-9):
        s = point.rep
        c = to_subdomain_coords(self.space, self.W, s)
        r = s - c @ self.W
        return np.linalg.norm(r) <= tol * np.linalg.norm(s)


def twistor_parametrize(line: TwistorLine) -> PolynomialCurve:
    """Degree-2 conic ``t -> (1 - t^2) w1 + i (1 + t^2) w2 + 2 t w3`` (affine ``s = 1``).

    The homogeneous form is ``(s^2 - t^2) w1 + i (s^2 + t^2) w2 + 2 s t w3``.
    """
    w1, w2, w3 = line.W
    coeffs = np.stack([w1 + 1j * w2, 2 * w3, -w1 + 1j * w2], axis=1)
    return PolynomialCurve(coeffs)


def tangent_split(point, a):
    """Split the tangent space at ``point`` along a real H^{1,1} vector ``a``.

    Returns ``(basis of T_{a-perp}, basis of T_{T_W})`` as canonical tangent reps.
    """
    sp = point.space
    a = np.asarray(a, dtype=float)
    s = point.rep
    if abs(q_bilinear(sp, a, s)) > 1e-9 * np.linalg.norm(a) * np.linalg.norm(s):
        raise DomainError("a is not of Hodge type (1,1) at the point")
    if q_bilinear(sp, a, a) <= 0:
        raise PreconditionError("a must have positive square")
    P = np.vstack(point.to_positive_2plane())
    first = orthogonal_complement(sp, np.vstack([P, a])).astype(complex)
    return first, a.astype(complex)[None, :]


def isotropic_entire_curve(point, rng=None):
    """Degree-1 curve through ``point`` inside a projection fiber of a D_2-envelope.

    The pullback of ``h_alg`` vanishes identically.
    """
    B = subdomain_embed(point, rng)
    # in the envelope coordinates the point is (1, i, 0, 0); the pr_2 fiber through
    # the chart point (x, y) = (0, 0) is x -> iota([x:1],[0:1]) = (1, i, -x, x)
    v = -B[2] + B[3]
    s = point.rep * np.sqrt(2.0 / point.norm2)
    c = to_subdomain_coords(point.space, B, s)
    # rotate so that the point is exactly e1' + i e2' in the envelope
    phase = c[0]
    return PolynomialCurve.linear(s, phase * v)


# ---------------------------------------------------------------------------
# holomorphic sectional curvature


class Chart:
    """Local holomorphic chart ``w -> sigma(w)`` of Omega or D around a point."""

    def __init__(self, space, sigma, which="Omega"):
        sigma = np.asarray(sigma, dtype=complex)
        self.space = space
        self.which = which
        self.c = int(np.argmax(np.abs(sigma)))
        s = sigma / sigma[self.c]
        self.free = [k for k in range(space.dim) if k != self.c]
        if which == "D":
            g = space.gram @ s
            cand = [k for k in self.free]
            self.j = int(cand[int(np.argmax(np.abs(g[cand])))])
            self.free = [k for k in self.free if k != self.j]
        self.w0 = s[self.free]
        self.s0 = s

    def sigma(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.zeros(w.shape[:-1] + (self.space.dim,), dtype=complex)
        out[..., self.c] = 1.0
        out[..., self.free] = w
        if self.which == "D":
            G = self.space.gram
            j = self.j
            rest = out.copy()
            rest[..., j] = 0
            a = G[j, j]
            b = 2 * (rest @ G[:, j])
            cc = np.einsum("...i,ij,...j->...", rest, G, rest)
            if a == 0:
                root = -cc / b
            else:
                disc = np.sqrt(b * b - 4 * a * cc + 0j)
                r1 = (-b + disc) / (2 * a)
                r2 = (-b - disc) / (2 * a)
                ref = self.s0[j]
                root = np.where(np.abs(r1 - ref) <= np.abs(r2 - ref), r1, r2)
            out[..., j] = root
        return out

    def jacobian(self, w):
        """``d sigma / d w`` as shape ``(..., m, dim)`` (rows are images of chart basis)."""
        s = self.sigma(w)
        m = len(self.free)
        J = np.zeros(s.shape[:-1] + (m, self.space.dim), dtype=complex)
        for a, k in enumerate(self.free):
            J[..., a, k] = 1.0
        if self.which == "D":
            g = s @ self.space.gram
            for a, k in enumerate(self.free):
                J[..., a, self.j] = -g[..., k] / g[..., self.j]
        return J

    def metric(self, w):
        """Chart matrix ``M`` with ``g(a, b) = a^T M conj(b)``."""
        J = self.jacobian(w)
        H = metric_tensor(self.space, self.sigma(w))
        return J @ H @ np.conj(np.swapaxes(J, -1, -2))

    def to_chart(self, v, sigma=None):
        """Chart components of an ambient tangent vector at ``sigma``."""
        sigma = self.s0 if sigma is None else sigma
        v = np.asarray(v, dtype=complex)
        lam = sigma[self.c]
        # d(sigma / sigma_c) applied to v
        d = (v - (v[self.c] / lam) * sigma) / lam
        return d[self.free]


def _hsc_chart(chart, u, h=1e-3):
    w0 = chart.w0

    def along(t):
        return w0 + t[..., None] * u

    def g_uu(t):
        M = chart.metric(along(t))
        return np.einsum("a,...ab,b->...", u, M, np.conj(u)).real

    def g_u_row(t):
        M = chart.metric(along(t))
        return np.einsum("a,...ab->...b", u, M)

    t0 = np.zeros(1, dtype=complex)
    lap = numerics.dzdzbar(g_uu, t0, h=h)[0]
    A = numerics.dz(g_u_row, t0, h=h)[0]
    M0 = chart.metric(w0)
    guu = (u @ M0 @ np.conj(u)).real
    term = np.conj(A) @ np.linalg.solve(M0.T, A)
    return float(((-lap + term) / guu**2).real)


def _hsc_affine(chart, u):
    """Exact curvature along ``u`` in an affine chart of Omega.

    Along ``sigma0 + t U`` the norm ``N`` is a hermitian quadratic in ``t``,
    so every derivative of the metric is available in closed form; this avoids
    the cancellation that finite differences suffer near the null cone.
    """
    G = chart.space.gram
    s = chart.s0
    U = np.zeros_like(s)
    U[chart.free] = u
    N = np.real(s @ G @ np.conj(s))
    B = U @ G @ np.conj(s)
    C = np.real(U @ G @ np.conj(U))
    P = abs(B) ** 2
    g = (P - C * N) / N**2
    lap = 2 * C**2 / N**2 - 8 * C * P / N**3 + 6 * P**2 / N**4
    Gs_bar = G @ np.conj(s)
    dH = G * B / N**2 + np.outer(Gs_bar, U @ G) / N**2 - 2 * B * np.outer(Gs_bar, s @ G) / N**3
    A = (U @ dH)[chart.free]
    M0 = chart.metric(chart.w0)
    term = np.conj(A) @ np.linalg.solve(M0.T, A)
    return float(((-lap + term) / g**2).real)


def hsc(point, v, mode="Omega", h=1e-3):
    """Holomorphic sectional curvature of ``h_alg`` along ``v`` at ``point``.

    ``mode="Omega"`` uses the ambient metric in closed form; ``mode="D"``
    uses the induced metric on the quadric through a local graph chart, with
    finite differences.
    """
    vec = v.vec if isinstance(v, TangentRep) else np.asarray(v, dtype=complex)
    sp = point.space
    hv = h_alg(sp, point.rep, vec, vec).real
    scale = np.vdot(vec, vec).real / point.norm2
    if abs(hv) < 1e-10 * scale:
        raise DegenerateError("isotropic direction: holomorphic sectional curvature undefined")
    if mode == "D" and not point.isotropic:
        raise DomainError("mode 'D' needs a point of D")
    chart = Chart(sp, point.rep, mode)
    u = chart.to_chart(vec, point.rep)
    u = u / np.linalg.norm(u)
    if mode == "Omega":
        return _hsc_affine(chart, u)
    return _hsc_chart(chart, u, h=h)
