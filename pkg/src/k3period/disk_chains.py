"""Chains of positive holomorphic disks and their Poincare lengths.

A positive disk is a polynomial curve ``F`` on the closed unit disk into the
ambient ``C^(3+p)`` whose derivative spans an ``h_alg``-positive line at every
point. The certificate attached to a disk is the sampled minimum of the
scale-free ratio ``h_alg(F', F') / g_FS(F', F')``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import d2_model as d2
from .curves import D2Curve, PolynomialCurve
from .errors import (
    BudgetExceededError,
    CertificateError,
    DegenerateError,
    DomainError,
    NumericalError,
    PreconditionError,
)
from .indefinite import (
    QuadraticSpace,
    orthogonal_complement,
    positive_vector_in,
    q_bilinear,
    restricted_gram,
    signature,
)
from .period_domain import (
    PeriodPoint,
    TwistorLine,
    h_alg,
    projective_distance,
    to_subdomain_coords,
)

SAFETY = 0.999
GRID = 64
LINK_TOL = 1e-9


def poincare_distance(a, b):
    """``artanh |(a - b) / (1 - conj(a) b)|`` on the unit disk."""
    a = complex(a)
    b = complex(b)
    if abs(a) >= 1 or abs(b) >= 1:
        raise DomainError("Poincare distance needs points inside the unit disk")
    return float(np.arctanh(abs((a - b) / (1 - np.conj(a) * b))))


# ---------------------------------------------------------------------------
# the f_lambda family


def _reject_positive_real(lam, tol=1e-12):
    lam = complex(lam)
    if abs(lam.imag) <= tol * max(1.0, abs(lam)) and lam.real >= 0:
        raise PreconditionError("lambda must not lie on the closed positive real axis")
    return lam


def f_lambda(lam, scale=1.0) -> D2Curve:
    """``t -> ([scale t : 1], [lam scale t : 1])`` in the chart ``([x:1],[y:1])``."""
    lam = _reject_positive_real(lam)
    x = PolynomialCurve([[0, scale], [1, 0]])
    y = PolynomialCurve([[0, lam * scale], [1, 0]])
    return D2Curve(x, y)


def positivity_profile(lam, t):
    """Squared ``h_alg``-norm of ``f_lambda'(t)``: ``2 Re(lam / (lam |t|^2 - 1)^2)``."""
    lam = complex(lam)
    s = np.abs(np.asarray(t)) ** 2
    return 2.0 * np.real(lam / (lam * s - 1.0) ** 2)


def profile_polynomial_roots(lam):
    """Roots of ``Re(lam)|lam|^2 s^2 - 2|lam|^2 s + Re(lam)`` in closed form (smaller first)."""
    lam = complex(lam)
    m = abs(lam)
    return (m - abs(lam.imag)) / (m * lam.real), (m + abs(lam.imag)) / (m * lam.real)


def positivity_constant(alpha):
    """``C_alpha = (|alpha| - |Im alpha|) / (|alpha| Re alpha)``."""
    alpha = complex(alpha)
    if alpha.real <= 0:
        raise PreconditionError("Re(alpha) must be positive")
    _reject_positive_real(alpha)
    return profile_polynomial_roots(alpha)[0]


def positivity_radius(alpha, n=1):
    """Largest ``r`` with ``f_{alpha/n}`` positive on the open disk of radius ``r``.

    The profile is positive exactly for ``|t|^2 < C_alpha * n``, so the radius
    is ``sqrt(C_alpha * n)``.
    """
    if n < 1:
        raise PreconditionError("n must be a positive integer")
    return float(np.sqrt(positivity_constant(alpha) * n))


# ---------------------------------------------------------------------------
# disks and chains


def fs_norm2(F, dF):
    E = np.sum(np.abs(F) ** 2, axis=-1)
    ip = np.sum(dF * np.conj(F), axis=-1)
    return (np.sum(np.abs(dF) ** 2, axis=-1) * E - np.abs(ip) ** 2) / E**2


def positivity_ratio(space, curve: PolynomialCurve, z):
    F = curve(z)
    dF = curve.derivative()(z)
    return np.real(h_alg(space, F, dF, dF)) / fs_norm2(F, dF)


def certify(space, curve: PolynomialCurve, grid=GRID, refine=10):
    """Sampled minimum of the positivity ratio over the closed unit disk.

    A ``grid x grid`` polar sample (radii ``k / (grid - 1)``) is followed by a
    ``refine``-fold finer patch around the argmin.
    """
    r = np.arange(grid) / (grid - 1)
    th = 2 * np.pi * np.arange(grid) / grid
    Z = r[:, None] * np.exp(1j * th)[None, :]
    vals = positivity_ratio(space, curve, Z)
    i, j = np.unravel_index(np.argmin(vals), vals.shape)
    dr, dth = 1.0 / (grid - 1), 2 * np.pi / grid
    rr = np.clip(r[i] + np.linspace(-dr, dr, 2 * refine + 1), 0.0, 1.0)
    tt = th[j] + np.linspace(-dth, dth, 2 * refine + 1)
    Zf = rr[:, None] * np.exp(1j * tt)[None, :]
    fine = positivity_ratio(space, curve, Zf)
    return float(min(vals.min(), fine.min()))


@dataclass
class PositiveDisk:
    """Polynomial disk on the closed unit disk with its positivity certificate."""

    space: QuadraticSpace
    curve: PolynomialCurve
    certificate: float = float("nan")
    n: int | None = None
    label: str = ""

    def __post_init__(self):
        if np.isnan(self.certificate):
            self.certificate = certify(self.space, self.curve)
        if not self.certificate > 0:
            raise CertificateError(
                f"disk {self.label!r} not positive: sampled minimum {self.certificate:.3e}"
            )

    def __call__(self, z):
        return self.curve(z)

    def transformed(self, space, M, label=None):
        """Push the disk through a linear map ``M`` (rows of the target basis)."""
        return PositiveDisk(space, self.curve.apply_linear(M), n=self.n, label=label or self.label)


@dataclass
class DiskChain:
    space: QuadraticSpace
    disks: list = field(default_factory=list)
    anchors: list = field(default_factory=list)
    endpoints: list = field(default_factory=list)

    def __len__(self):
        return len(self.disks)

    def extend(self, other: "DiskChain"):
        if not other.disks:
            return self
        if self.endpoints and projective_distance(self.endpoints[-1], other.endpoints[0]) > LINK_TOL:
            raise NumericalError("chains do not share an endpoint")
        start = 1 if self.endpoints else 0
        self.disks += other.disks
        self.anchors += other.anchors
        self.endpoints += other.endpoints[start:]
        return self

    def link_residuals(self):
        out = []
        for k, (disk, (a, b)) in enumerate(zip(self.disks, self.anchors)):
            ra = projective_distance(disk(a), self.endpoints[k])
            rb = projective_distance(disk(b), self.endpoints[k + 1])
            out.append(max(ra, rb))
        return out

    def verify(self, tol=LINK_TOL):
        for k, (disk, (a, b)) in enumerate(zip(self.disks, self.anchors)):
            if abs(a) >= 1 or abs(b) >= 1:
                raise CertificateError(f"link {k}: anchor outside the unit disk")
            if not disk.certificate > 0:
                raise CertificateError(f"link {k}: positivity certificate failed")
        res = self.link_residuals()
        if res and max(res) > tol:
            raise CertificateError(f"endpoint residual {max(res):.3e} exceeds {tol:.1e}")
        return True

    def report_rows(self):
        rows = []
        cum = 0.0
        res = self.link_residuals()
        for k, (disk, (a, b)) in enumerate(zip(self.disks, self.anchors)):
            d = poincare_distance(a, b)
            cum += d
            rows.append(
                dict(
                    link_index=k,
                    n=disk.n if disk.n is not None else 0,
                    a=complex(a),
                    b=complex(b),
                    delta=d,
                    cumulative_length=cum,
                    endpoint_residual=res[k],
                    min_positivity=disk.certificate,
                )
            )
        return rows


def chain_length(chain: DiskChain) -> float:
    return float(sum(poincare_distance(a, b) for a, b in chain.anchors))


# ---------------------------------------------------------------------------
# the two-disk chain


SHEAR = np.array([[1.0, 1.0], [0.0, 1.0]], dtype=complex)
P0 = d2.D2Point([0, 1], [0, 1])
Q0 = d2.D2Point([1, 1], [0, 1])


def meeting_roots(alpha, beta, n):
    """Both roots of ``a_n b s^2 + (a_n b + a_n - b) s + a_n = 0`` with ``a_n = alpha / n``.

    Returned with the smaller modulus first (numerically stable pairing).
    """
    an = complex(alpha) / n
    beta = complex(beta)
    A, B, C = an * beta, an * beta + an - beta, an
    disc = np.sqrt(B * B - 4 * A * C + 0j)
    qq = -0.5 * (B + disc) if abs(B + disc) >= abs(B - disc) else -0.5 * (B - disc)
    r1, r2 = C / qq, qq / A
    return (r1, r2) if abs(r1) <= abs(r2) else (r2, r1)


def quadratic_residual(alpha, beta, n, s):
    an = complex(alpha) / n
    return abs(an * beta * s * s + (an * beta + an - beta) * s + an)


def _d2_disk(curve: D2Curve, n=None, label=""):
    return PositiveDisk(d2.SPACE, curve.to_quadric(), n=n, label=label)


@dataclass
class TwoDiskData:
    chain: DiskChain
    s: complex
    t: complex
    meeting_residual: float
    quadratic_residual: float
    r1: float
    rho: float


def two_disk_data(alpha, beta, n, A=None, conj_swap=False):
    """Two-disk chain from ``P0`` to ``Q0`` (optionally translated by ``A`` and swapped)."""
    alpha = complex(alpha)
    beta = complex(beta)
    if alpha.real <= 0 or beta.real <= 0:
        raise PreconditionError("Re(alpha) and Re(beta) must be positive")
    _reject_positive_real(alpha)
    _reject_positive_real(beta)
    an = alpha / n
    s, _ = meeting_roots(alpha, beta, n)
    t = s + 1
    r1 = SAFETY * positivity_radius(alpha, n)
    rho = SAFETY * positivity_radius(beta, 1)
    if abs(t) >= r1 or abs(s) >= rho:
        raise CertificateError("meeting point outside the certified disks; increase n")
    c1 = f_lambda(an, scale=r1)
    x2 = PolynomialCurve([[1, rho], [1, 0]])
    y2 = PolynomialCurve([[0, beta * rho], [1, beta * rho]])
    c2 = D2Curve(x2, y2)
    pts = [P0, d2.D2Point([t, 1], [an * t, 1]), Q0]
    if A is not None:
        At = d2.tilde(A)
        c1 = D2Curve(c1.x.apply_linear(A), c1.y.apply_linear(At))
        c2 = D2Curve(c2.x.apply_linear(A), c2.y.apply_linear(At))
        pts = [d2.D2Point(A @ p.x, At @ p.y) for p in pts]
    if conj_swap:
        c1, c2 = D2Curve(c1.y, c1.x), D2Curve(c2.y, c2.x)
        pts = [d2.swap(p) for p in pts]
    disk1 = _d2_disk(c1, n=n, label="f_alpha_n")
    disk2 = _d2_disk(c2, n=n, label="g_beta")
    ends = [d2.iota(p.x, p.y) for p in pts]
    chain = DiskChain(d2.SPACE, [disk1, disk2], [(0j, t / r1), (s / rho, 0j)], ends)
    meet = projective_distance(disk1(t / r1), disk2(s / rho))
    return TwoDiskData(chain, s, t, meet, quadratic_residual(alpha, beta, n, s), r1, rho)


def two_disk_chain(alpha, beta, n) -> DiskChain:
    data = two_disk_data(alpha, beta, n)
    if data.meeting_residual > 1e-10:
        raise CertificateError(f"meeting residual {data.meeting_residual:.3e}")
    data.chain.verify()
    return data.chain


def two_disk_length(alpha, beta, n):
    """Chain length without building or certifying the disks."""
    s, _ = meeting_roots(alpha, beta, n)
    r1 = SAFETY * positivity_radius(alpha, n)
    rho = SAFETY * positivity_radius(beta, 1)
    t = s + 1
    if abs(t) >= r1 or abs(s) >= rho:
        return np.inf
    return poincare_distance(0, t / r1) + poincare_distance(s / rho, 0)


def n_for_length(alpha, beta, budget, n0=10, n_max=10**12):
    n = n0
    while two_disk_length(alpha, beta, n) > budget:
        n *= 2
        if n > n_max:
            raise BudgetExceededError("no n reaches the requested length")
    return n


# ---------------------------------------------------------------------------
# chains in D_2


def _fiber_matrix(xa, xb, y):
    """``A`` in SL_2 with ``A P0 = (xa, y)`` and ``A Q0 = (xb, y)``."""
    ystar = np.conj(np.asarray(y)[::-1])
    Mx = np.column_stack([ystar, xa])
    if abs(np.linalg.det(Mx)) < 1e-12 * np.linalg.norm(ystar) * np.linalg.norm(xa):
        raise DomainError("source point is on the boundary")
    mu, nu = np.linalg.solve(Mx, xb)
    A = np.column_stack([mu * ystar, nu * xa])
    det = np.linalg.det(A)
    if abs(det) < 1e-14:
        raise DegenerateError("fiber endpoints coincide or target on the boundary")
    return A / np.sqrt(det)


def fiber_chain(p: d2.D2Point, q: d2.D2Point, n, alpha=1 + 1j, beta=1 + 1j):
    """Two-disk chain along a fiber of pr_2 (same y) or pr_1 (same x)."""
    if d2.pairs_equal(p.y, q.y):
        A = _fiber_matrix(p.x, q.x, p.y)
        data = two_disk_data(alpha, beta, n, A=A)
    elif d2.pairs_equal(p.x, q.x):
        A = _fiber_matrix(p.y, q.y, p.x)
        data = two_disk_data(alpha, beta, n, A=A, conj_swap=True)
    else:
        raise PreconditionError("points do not share a projection fiber")
    if data.meeting_residual > 1e-9:
        raise CertificateError(f"meeting residual {data.meeting_residual:.3e}")
    ch = data.chain
    # use the exact requested endpoints
    ch.endpoints[0] = d2.iota(p.x, p.y)
    ch.endpoints[-1] = d2.iota(q.x, q.y)
    return ch


def _route(p, q, rng, max_tries=32):
    """Waypoints p -> (q.x, p.y) -> q, detouring through random points if needed."""
    mid = (q.x, p.y)
    if not d2.is_boundary(*mid, tol=1e-6):
        return [p, d2.D2Point(*mid), q]
    for _ in range(max_tries):
        m = d2.random_point(rng)
        w1, w2 = (m.x, p.y), (q.x, m.y)
        if not d2.is_boundary(*w1, tol=1e-6) and not d2.is_boundary(*w2, tol=1e-6):
            return [p, d2.D2Point(*w1), m, d2.D2Point(*w2), q]
    raise BudgetExceededError("could not avoid boundary waypoints")


def connect_d2(p: d2.D2Point, q: d2.D2Point, target_length, rng, alpha=1 + 1j, beta=1 + 1j, max_disks=64):
    """Positive-disk chain from ``p`` to ``q`` in D_2 of length at most ``target_length``."""
    chain = DiskChain(d2.SPACE, endpoints=[d2.iota(p.x, p.y)])
    if p == q:
        return chain
    if target_length <= 0:
        raise PreconditionError("target length must be positive")
    way = _route(p, q, rng)
    legs = [(a, b) for a, b in zip(way[:-1], way[1:]) if not a == b]
    if 2 * len(legs) > max_disks:
        raise BudgetExceededError("disk budget exceeded")
    n = n_for_length(alpha, beta, target_length / len(legs))
    for a, b in legs:
        chain.extend(fiber_chain(a, b, n, alpha, beta))
    chain.endpoints[-1] = d2.iota(q.x, q.y)
    chain.verify()
    if chain_length(chain) > target_length:
        raise BudgetExceededError("chain longer than requested")
    return chain


def kobayashi_upper_bound_series(p=P0, q=Q0, n_schedule=(10, 100, 1000, 10000), alpha=1 + 1j, beta=1 + 1j):
    """Table of ``(n, length)`` for chains from ``p`` to ``q`` with a fixed ``n`` per leg."""
    rng = np.random.default_rng(0)
    way = _route(p, q, rng)
    legs = [(a, b) for a, b in zip(way[:-1], way[1:]) if not a == b]
    rows = []
    for n in n_schedule:
        ch = DiskChain(d2.SPACE, endpoints=[d2.iota(p.x, p.y)])
        for a, b in legs:
            ch.extend(fiber_chain(a, b, n, alpha, beta))
        ch.verify()
        rows.append((int(n), chain_length(ch)))
    return rows


# ---------------------------------------------------------------------------
# twistor chains in D


@dataclass
class TwistorChain:
    space: QuadraticSpace
    lines: list
    points: list

    def __len__(self):
        return len(self.lines)

    def verify(self, tol=1e-9):
        for k, W in enumerate(self.lines):
            if signature(restricted_gram(self.space, W.W)).positive != 3:
                raise CertificateError(f"line {k} is not a positive 3-plane")
            if not (W.contains(self.points[k], tol) and W.contains(self.points[k + 1], tol)):
                raise CertificateError(f"line {k} does not contain both endpoints")
        return True


def _unit(space, v):
    return v / np.sqrt(q_bilinear(space, v, v))


def _positive_unit_in_complement(space, vectors, rng):
    V = np.vstack(vectors)
    rank = np.linalg.matrix_rank(V, tol=1e-10)
    if rank < V.shape[0]:
        V = np.linalg.qr(V.T)[0][:, :rank].T
    comp = orthogonal_complement(space, V)
    w = positive_vector_in(space, comp, rng)
    if w is None or q_bilinear(space, w, w) <= 1e-12:
        raise NumericalError("no positive vector in the complement")
    return _unit(space, w)


def _replace(space, keep, old, new, rng, margin=1e-6):
    """Lines moving ``old -> new`` while ``keep`` stays fixed.

    A direct move is allowed when span(keep, old, new) is positive, i.e.
    ``|q(old, new)| < 1``; otherwise route through a positive unit vector
    orthogonal to all three.
    """
    c = q_bilinear(space, old, new)
    if np.allclose(old, new, atol=1e-13):
        return []
    if abs(c) < 1 - margin:
        return [new]
    z = _positive_unit_in_complement(space, [keep, old, new], rng)
    return [z, new]


def twistor_chain(space, p: PeriodPoint, q: PeriodPoint, rng) -> TwistorChain:
    """Chain of twistor lines from ``p`` to ``q``; every link is verified."""
    if space.dim < 4:
        raise PreconditionError("dimension too small")
    if p == q:
        return TwistorChain(space, [], [p])
    a, b = p.to_positive_2plane()
    c, d = q.to_positive_2plane()
    allv = np.vstack([a, b, c, d])
    if np.linalg.matrix_rank(allv, tol=1e-9) <= 3:
        B = np.linalg.svd(allv)[2][:3]
        if signature(restricted_gram(space, B)).positive == 3:
            ch = TwistorChain(space, [TwistorLine(space, B)], [p, q])
            ch.verify()
            return ch
    frames = [(a, b)]
    bt = _positive_unit_in_complement(space, [a, c], rng)
    for v in _replace(space, a, b, bt, rng):
        frames.append((a, v))
    for u in _replace(space, bt, a, c, rng):
        frames.append((u, bt))
    for v in _replace(space, c, bt, d, rng):
        frames.append((c, v))
    # the last frame is (c, d) up to rounding; pin it
    frames[-1] = (c, d)
    points = [p]
    lines = []
    for (u0, v0), (u1, v1) in zip(frames[:-1], frames[1:]):
        span = np.vstack([u0, v0, v1]) if np.allclose(u0, u1) else np.vstack([u0, u1, v0])
        lines.append(TwistorLine(space, span))
        points.append(PeriodPoint(space, u1 + 1j * v1))
    points[-1] = q
    ch = TwistorChain(space, lines, points)
    ch.verify()
    return ch


def envelope_basis(space, line: TwistorLine, rng):
    """q-orthonormal rows ``(w1, w2, w3, n)`` spanning a (3,1) envelope of the line."""
    comp = orthogonal_complement(space, line.W)
    ev, U = np.linalg.eigh(restricted_gram(space, comp))
    neg = U[:, ev < 0]
    c = neg @ rng.standard_normal(neg.shape[1])
    n = c @ comp
    n = n / np.sqrt(-q_bilinear(space, n, n))
    return np.vstack([line.W, n])


def _model_coords(space, M, v):
    return to_subdomain_coords(space, M, v)


def connect_D(space, p: PeriodPoint, q: PeriodPoint, target_length, rng, alpha=1 + 1j, beta=1 + 1j):
    """Positive-disk chain in D through D_2-envelopes of a twistor chain."""
    chain = DiskChain(space, endpoints=[p.rep])
    if p == q:
        return chain
    tw = twistor_chain(space, p, q, rng)
    per_link = target_length / len(tw.lines)
    for k, line in enumerate(tw.lines):
        M = envelope_basis(space, line, rng)
        xa = _model_coords(space, M, tw.points[k].rep)
        xb = _model_coords(space, M, tw.points[k + 1].rep)
        pa = d2.D2Point(*d2.iota_inverse(xa))
        pb = d2.D2Point(*d2.iota_inverse(xb))
        sub = connect_d2(pa, pb, per_link, rng, alpha, beta)
        mapped = DiskChain(
            space,
            [PositiveDisk(space, dk.curve.apply_linear(M.T), n=dk.n, label=dk.label) for dk in sub.disks],
            list(sub.anchors),
            [e @ M for e in sub.endpoints],
        )
        mapped.endpoints[0] = tw.points[k].rep
        mapped.endpoints[-1] = tw.points[k + 1].rep
        chain.extend(mapped)
    chain.endpoints[-1] = q.rep
    chain.verify()
    if chain_length(chain) > target_length:
        raise BudgetExceededError("chain longer than requested")
    return chain
