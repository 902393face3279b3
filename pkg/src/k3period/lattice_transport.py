"""Isometries fixing a subspace and sign transport across walls.

Walls are negative-square vectors ``alpha``; a wall is active at a period
point ``sigma`` when ``q(alpha, sigma) = 0``. At an active wall set, a
chamber is encoded by the signs of ``q(kappa, alpha)`` for a positive
real (1,1)-class ``kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog

from .errors import DegenerateError, DomainError, InfeasibleError, NumericalError, PreconditionError
from .indefinite import (
    QuadraticSpace,
    orthogonal_complement,
    q_bilinear,
    q_gram_schmidt,
    restricted_gram,
    signature,
)
from .period_domain import PeriodPoint

MARGIN_TOL = 1e-8


def hyperbolic_completion(space, n0, ambient_basis=None, tol=1e-10):
    """Isotropic ``v`` with ``q(n0, v) = 1`` drawn from the span of ``ambient_basis``."""
    n0 = np.asarray(n0, dtype=float)
    if abs(q_bilinear(space, n0, n0)) > tol * max(np.dot(n0, n0), 1.0) or not np.any(n0):
        raise PreconditionError("n0 must be a nonzero isotropic vector")
    B = np.eye(space.dim) if ambient_basis is None else np.atleast_2d(np.asarray(ambient_basis, float))
    pair = B @ space.gram @ n0
    k = int(np.argmax(np.abs(pair)))
    if abs(pair[k]) <= tol * np.linalg.norm(n0):
        raise DegenerateError("n0 is orthogonal to the whole ambient space")
    w = B[k] / pair[k]
    return w - 0.5 * q_bilinear(space, w, w) * n0


def _sorted_complement(space, vectors):
    comp = orthogonal_complement(space, vectors)
    if comp.shape[0] == 0:
        return comp
    ev, U = np.linalg.eigh(restricted_gram(space, comp))
    order = np.argsort(-ev)
    return (U[:, order].T @ comp) / np.sqrt(np.abs(ev[order]))[:, None]


def _check_in_DN(space, N, P, tol=1e-9):
    if N.shape[0] == 0:
        return
    pair = P @ space.gram @ N.T
    if np.abs(pair).max() > tol * max(np.abs(P).max(), 1.0) * max(np.abs(N).max(), 1.0):
        raise DomainError("plane is not orthogonal to N")


def _plane(space, P):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape != (2, space.dim):
        raise PreconditionError("P must be two vectors")
    if signature(restricted_gram(space, P)).positive != 2:
        raise DomainError("P is not a positive 2-plane")
    return P


def isometry_fixing_N(space, N_basis, P, Q, tol=1e-9):
    """Real ``g`` with ``g^T G g = G``, ``g n = n`` on N and ``g P = Q`` (oriented).

    ``P`` and ``Q`` are ordered bases of oriented positive 2-planes orthogonal to N.
    """
    P = _plane(space, P)
    Q = _plane(space, Q)
    N = np.zeros((0, space.dim)) if N_basis is None or len(N_basis) == 0 else np.atleast_2d(np.asarray(N_basis, float))
    _check_in_DN(space, N, P)
    _check_in_DN(space, N, Q)
    if N.shape[0]:
        sN = signature(restricted_gram(space, N))
        if sN.positive >= 2:
            raise DomainError("N contains a positive 2-plane; D_N is empty")
    Pn, _ = q_gram_schmidt(space, P)
    Qn, _ = q_gram_schmidt(space, Q)
    if N.shape[0] == 0 or signature(restricted_gram(space, N)).null == 0:
        # non-degenerate: Lambda = T' + N with T' = N-perp containing P and Q
        TP = np.vstack([Pn, _sorted_complement(space, np.vstack([Pn, N]) if N.shape[0] else Pn)])
        TQ = np.vstack([Qn, _sorted_complement(space, np.vstack([Qn, N]) if N.shape[0] else Qn)])
        src = np.vstack([TP, N]) if N.shape[0] else TP
        dst = np.vstack([TQ, N]) if N.shape[0] else TQ
    else:
        # degenerate: split off the kernel n0 of q|_N and complete hyperbolically
        GN = restricted_gram(space, N)
        ker = null_space(GN, rcond=1e-10).T
        if ker.shape[0] != 1:
            raise DegenerateError("only a one-dimensional radical of q|_N is supported")
        n0 = ker[0] @ N
        rest = null_space(ker, rcond=1e-10).T @ N  # N' complement of n0 inside N
        rest = rest.reshape(-1, space.dim)

        def frame(Pn):
            fixed = np.vstack([Pn, rest]) if rest.shape[0] else Pn
            comp = orthogonal_complement(space, fixed)  # contains n0
            hP = hyperbolic_completion(space, n0, comp)
            T = _sorted_complement(space, np.vstack([fixed, n0, hP]))
            return np.vstack([Pn, T, n0, hP])

        src = np.vstack([frame(Pn), rest]) if rest.shape[0] else frame(Pn)
        dst = np.vstack([frame(Qn), rest]) if rest.shape[0] else frame(Qn)
    if src.shape[0] != space.dim:
        raise NumericalError("adapted bases do not span the space")
    g = dst.T @ np.linalg.inv(src.T)
    return _checked(space, g, src, dst)


def _checked(space, g, src, dst):
    # g is an isometry exactly when both adapted frames have the same Gram matrix
    Gs = restricted_gram(space, src)
    Gd = restricted_gram(space, dst)
    if np.abs(Gs - Gd).max() > 1e-8:
        raise NumericalError("adapted frames have different Gram matrices")
    return g


def random_isometry(space, rng):
    """Random isometry mapping a random positive 2-plane to another (N empty)."""
    from .period_domain import random_point

    P = np.vstack(random_point(space, rng).to_positive_2plane())
    Q = np.vstack(random_point(space, rng).to_positive_2plane())
    return isometry_fixing_N(space, None, P, Q)


def oriented_plane_equal(space, g, P, Q, tol=1e-9):
    """``g P = Q`` as oriented planes (positive change-of-basis determinant)."""
    gP = (g @ np.asarray(P).T).T
    C, res, *_ = np.linalg.lstsq(np.asarray(Q).T, gP.T, rcond=None)
    resid = np.linalg.norm(np.asarray(Q).T @ C - gP.T) / max(np.linalg.norm(gP), 1.0)
    return resid < tol and np.linalg.det(C) > 0


# ---------------------------------------------------------------------------
# walls and chambers


@dataclass
class WallSet:
    space: QuadraticSpace
    classes: np.ndarray

    def __post_init__(self):
        C = np.atleast_2d(np.asarray(self.classes, dtype=float)).reshape(-1, self.space.dim)
        for k, a in enumerate(C):
            if q_bilinear(self.space, a, a) >= 0:
                raise PreconditionError(f"wall {k} does not have negative square")
        for i in range(len(C)):
            for j in range(i + 1, len(C)):
                if np.linalg.matrix_rank(np.vstack([C[i], C[j]]), tol=1e-12) < 2:
                    raise PreconditionError(f"walls {i} and {j} are proportional")
        self.classes = C

    def __len__(self):
        return len(self.classes)

    def active(self, point: PeriodPoint, tol=1e-9):
        s = point.rep
        ns = np.linalg.norm(s)
        vals = np.abs(self.classes @ self.space.gram @ s)
        scale = np.linalg.norm(self.classes, axis=1) * ns
        return [int(k) for k in np.flatnonzero(vals <= tol * scale)]

    def to_json(self):
        return {"walls": [[str(Fraction(x).limit_denominator(10**9)) for x in a] for a in self.classes]}

    @classmethod
    def from_json(cls, space, data):
        return cls(space, [[float(Fraction(str(x))) for x in a] for a in data["walls"]])


@dataclass
class ChamberSignVector:
    signs: dict = field(default_factory=dict)

    def __eq__(self, other):
        return isinstance(other, ChamberSignVector) and self.signs == other.signs

    def __repr__(self):
        body = ", ".join(f"{k}:{'+' if v > 0 else '-'}" for k, v in sorted(self.signs.items()))
        return f"ChamberSignVector({{{body}}})"


class AmbiguousError(NumericalError):
    """kappa lies on (or within tolerance of) an active wall."""


def _real_11(point: PeriodPoint):
    """Real basis of the (1,1) part orthogonal to the positive 2-plane."""
    P = np.vstack(point.to_positive_2plane())
    return orthogonal_complement(point.space, P)


def chamber_signs(point: PeriodPoint, kappa, walls: WallSet, tol=1e-9):
    sp = point.space
    kappa = np.asarray(kappa, dtype=float)
    s = point.rep
    if abs(q_bilinear(sp, kappa, s)) > tol * np.linalg.norm(kappa) * np.linalg.norm(s):
        raise DomainError("kappa is not of type (1,1) at the point")
    if q_bilinear(sp, kappa, kappa) <= 0:
        raise DomainError("kappa must have positive square")
    out = {}
    for k in walls.active(point, tol):
        a = walls.classes[k]
        v = q_bilinear(sp, kappa, a)
        if abs(v) <= tol * np.linalg.norm(kappa) * np.linalg.norm(a):
            raise AmbiguousError(f"kappa lies on wall {k}")
        out[k] = 1 if v > 0 else -1
    return ChamberSignVector(out)


def find_witness(point: PeriodPoint, walls: WallSet, signs: ChamberSignVector, rng, restarts=64):
    """Strict witness ``kappa`` realizing ``signs`` at ``point``.

    Maximizes the smallest signed margin ``s_k q(kappa, alpha_k)`` over a box
    inscribed in the slice ball of the positive cone of the (1,1) part, with
    random slice centers.
    """
    sp = point.space
    B = _real_11(point)
    GB = restricted_gram(sp, B)
    ev, U = np.linalg.eigh(GB)
    order = np.argsort(-ev)
    ev, U = ev[order], U[:, order]
    # q-orthonormal basis: e0 positive, the rest negative
    E = (U.T @ B) / np.sqrt(np.abs(ev))[:, None]
    if ev[0] <= 0:
        raise NumericalError("the (1,1) part has no positive direction")
    m = E.shape[0]
    keys = sorted(signs.signs)
    if not keys:
        return E[0]
    A = np.array([signs.signs[k] * (E @ sp.gram @ walls.classes[k]) for k in keys])  # margins in coords
    best = None
    half = 0.9 / np.sqrt(max(m - 1, 1))
    for trial in range(restarts):
        # kappa = e0 + sum x_j e_j with |x| < 1 keeps q > 0; search a box inside the ball
        center = np.zeros(m - 1) if trial == 0 else rng.uniform(-0.5, 0.5, m - 1) * half
        width = half - np.abs(center)
        bounds = [(c - wdt, c + wdt) for c, wdt in zip(center, np.maximum(width, 1e-3))]
        bounds = [(max(lo, -half), min(hi, half)) for lo, hi in bounds]
        # variables (x_1..x_{m-1}, t); maximize t subject to A0 + A_rest x >= t
        c = np.zeros(m)
        c[-1] = -1.0
        A_ub = np.hstack([-A[:, 1:], np.ones((len(keys), 1))])
        b_ub = A[:, 0]
        res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=bounds + [(None, 1.0)], method="highs")
        if res.status == 0 and (best is None or res.x[-1] > best[1]):
            best = (res.x[:-1], res.x[-1])
    if best is None or best[1] < MARGIN_TOL:
        raise InfeasibleError("no strict witness realizes the requested signs")
    return E[0] + best[0] @ E[1:]


@dataclass
class TransportResult:
    final: ChamberSignVector
    log: list
    witnesses: list


def transport_chamber(path, walls: WallSet, initial: ChamberSignVector, rng, tol=1e-9, coarse=0.25):
    """Carry a chamber sign vector along a sampled path of period points.

    Persistently active walls keep their sign; newly active walls take the
    sign of the previous witness projected to the new point. Log entries are
    ``(sample_index, wall_index, event)`` with events ``activated``,
    ``deactivated``, ``sign+`` and ``sign-``.
    """
    path = list(path)
    if not path:
        raise PreconditionError("empty path")
    act0 = set(walls.active(path[0], tol))
    if set(initial.signs) != act0:
        raise PreconditionError("initial sign vector does not match the active walls")
    cur = ChamberSignVector(dict(initial.signs))
    kappa = find_witness(path[0], walls, cur, rng)
    log = []
    witnesses = [kappa]
    prev_active = act0
    for idx in range(1, len(path)):
        pt = path[idx]
        act = set(walls.active(pt, tol))
        for k in sorted(prev_active - act):
            # an activity flip should come with a small pairing on the inactive side
            a = walls.classes[k]
            rel = abs(q_bilinear(walls.space, a, pt.rep)) / (np.linalg.norm(a) * np.linalg.norm(pt.rep))
            if rel > coarse:
                raise NumericalError(f"sampling too coarse at sample {idx} (wall {k})")
            log.append((idx, k, "deactivated"))
            del cur.signs[k]
        new = sorted(act - prev_active)
        if new:
            B = _real_11(pt)
            proj = _project(walls.space, B, kappa)
            for k in new:
                v = q_bilinear(walls.space, proj, walls.classes[k])
                if abs(v) <= MARGIN_TOL * np.linalg.norm(proj) * np.linalg.norm(walls.classes[k]):
                    raise AmbiguousError(f"new wall {k} is ambiguous at sample {idx}")
                cur.signs[k] = 1 if v > 0 else -1
                log.append((idx, k, "activated"))
                log.append((idx, k, "sign+" if v > 0 else "sign-"))
        kappa = find_witness(pt, walls, cur, rng)
        witnesses.append(kappa)
        prev_active = act
    return TransportResult(cur, log, witnesses)


def _project(space, B, v):
    """q-orthogonal projection of ``v`` onto span(B)."""
    G = restricted_gram(space, B)
    c = np.linalg.solve(G, B @ space.gram @ v)
    return c @ B
