"""Linear algebra over a real symmetric form of signature (3, p).

Vectors are numpy arrays (real or complex). The bilinear pairing is the
complex-bilinear extension ``q(v, w) = v^T G w`` and the hermitian pairing is
``h(v, w) = q(v, conj(w))``. Batched inputs are supported on the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import DegenerateError, PreconditionError

DEFAULT_EIG_TOL = 1e-9
MAX_P = 64


@dataclass(frozen=True)
class Signature:
    positive: int
    negative: int
    null: int = 0

    def __str__(self):
        return f"{self.positive},{self.negative}"


def _as_symmetric(gram, sym_tol=1e-12):
    g = np.asarray(gram, dtype=float)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise PreconditionError(f"gram must be square, got shape {g.shape}")
    scale = max(np.abs(g).max(), 1.0)
    if np.abs(g - g.T).max() > sym_tol * scale:
        raise PreconditionError("gram matrix is not symmetric")
    return 0.5 * (g + g.T)


def signature(gram, tol=DEFAULT_EIG_TOL) -> Signature:
    """Count positive, negative and null eigenvalues of a symmetric matrix.

    ``tol`` is relative to the spectral radius. Hermitian complex matrices are
    accepted as well.
    """
    m = np.asarray(gram)
    if np.iscomplexobj(m):
        if np.abs(m - m.conj().T).max() > 1e-10 * max(np.abs(m).max(), 1.0):
            raise PreconditionError("matrix is not hermitian")
        ev = np.linalg.eigvalsh(0.5 * (m + m.conj().T))
    else:
        ev = np.linalg.eigvalsh(_as_symmetric(m))
    thr = tol * max(np.abs(ev).max(), np.finfo(float).tiny)
    pos = int(np.sum(ev > thr))
    neg = int(np.sum(ev < -thr))
    return Signature(pos, neg, len(ev) - pos - neg)


class QuadraticSpace:
    """Real vector space R^(3+p) with a non-degenerate form of signature (3, p)."""

    def __init__(self, gram, tol=DEFAULT_EIG_TOL):
        g = _as_symmetric(gram)
        sig = signature(g, tol)
        if sig.null or sig.positive != 3 or sig.negative < 1:
            raise PreconditionError(f"form must have signature (3, p>=1), got {sig}")
        if abs(np.linalg.det(g)) <= 1e-12:
            raise DegenerateError("gram matrix is (numerically) singular")
        if sig.negative > MAX_P:
            raise PreconditionError(f"p={sig.negative} exceeds supported maximum {MAX_P}")
        self.gram = g
        self.gram.setflags(write=False)
        self.p = sig.negative
        self.tol = tol

    @classmethod
    def standard(cls, p: int) -> "QuadraticSpace":
        return cls(np.diag([1.0, 1.0, 1.0] + [-1.0] * p))

    @property
    def dim(self) -> int:
        return 3 + self.p

    @property
    def is_standard(self) -> bool:
        return np.array_equal(self.gram, np.diag([1.0, 1.0, 1.0] + [-1.0] * self.p))

    def __eq__(self, other):
        return isinstance(other, QuadraticSpace) and np.array_equal(self.gram, other.gram)

    def __hash__(self):
        return hash(self.gram.tobytes())

    def __repr__(self):
        kind = "standard" if self.is_standard else "custom"
        return f"QuadraticSpace(p={self.p}, {kind})"

    def q(self, v, w):
        return q_bilinear(self, v, w)

    def h(self, v, w):
        return h_sesquilinear(self, v, w)

    def to_json(self) -> dict:
        if self.is_standard:
            return {"p": self.p, "gram": "standard"}
        return {"p": self.p, "gram": self.gram.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticSpace":
        gram = data.get("gram", "standard")
        if gram == "standard":
            return cls.standard(int(data["p"]))
        space = cls(np.asarray(gram, dtype=float))
        if "p" in data and int(data["p"]) != space.p:
            raise PreconditionError(f"declared p={data['p']} but gram has p={space.p}")
        return space


def _check_dim(space, *vs):
    for v in vs:
        if np.shape(v)[-1] != space.dim:
            raise PreconditionError(f"vector length {np.shape(v)[-1]} != dim {space.dim}")


def q_bilinear(space, v, w):
    """Complex-bilinear extension ``v^T G w`` (broadcast over leading axes)."""
    v, w = np.asarray(v), np.asarray(w)
    _check_dim(space, v, w)
    return np.einsum("...i,ij,...j->...", v, space.gram, w)


def h_sesquilinear(space, v, w):
    """Hermitian pairing ``q(v, conj(w))``."""
    return q_bilinear(space, v, np.conj(w))


def orthogonal_complement(space, vectors, tol=1e-10):
    """Basis (rows) of ``{w : q(w, v) = 0 for all v in vectors}``.

    The result is real when every input vector is real.
    """
    V = np.atleast_2d(np.asarray(vectors))
    _check_dim(space, V)
    rank = np.linalg.matrix_rank(V, tol=tol * max(np.abs(V).max(), 1.0))
    if rank < V.shape[0]:
        raise DegenerateError("input vectors are linearly dependent")
    M = V @ space.gram
    basis = linalg.null_space(M, rcond=tol).T
    if not np.iscomplexobj(V):
        basis = basis.real
    return basis


def restricted_gram(space, basis):
    B = np.atleast_2d(np.asarray(basis, dtype=float))
    return B @ space.gram @ B.T


def positive_vector_in(space, subspace_basis, rng=None, tol=DEFAULT_EIG_TOL):
    """A real vector ``w`` in the span with ``q(w, w) > 0``, or ``None``.

    Diagonalizes the restricted form; without ``rng`` the top eigen-direction
    is returned, otherwise a random combination of the positive eigen-directions.
    """
    B = np.atleast_2d(np.asarray(subspace_basis))
    if np.iscomplexobj(B):
        if np.abs(B.imag).max() > 1e-12:
            raise PreconditionError("subspace basis must be real")
        B = B.real
    _check_dim(space, B)
    ev, U = np.linalg.eigh(restricted_gram(space, B))
    thr = tol * max(np.abs(ev).max(), 1e-300)
    pos = ev > thr
    if not pos.any():
        return None
    if rng is None:
        coeff = U[:, -1]
    else:
        c = rng.standard_normal(int(pos.sum()))
        coeff = U[:, pos] @ c
    w = coeff @ B
    if q_bilinear(space, w, w) <= 0:  # random combination can still be fine; guard anyway
        w = U[:, -1] @ B
    return w


def q_gram_schmidt(space, vectors, tol=1e-12):
    """q-orthonormalize real vectors that span a non-degenerate, sign-definite-per-step set.

    Each successive residual must have non-zero square; it is scaled so that
    ``q(e, e) = +-1``. Orientation of the leading vectors is preserved.
    """
    out = []
    signs = []
    for v in np.atleast_2d(np.asarray(vectors, dtype=float)):
        w = v.copy()
        for e, s in zip(out, signs):
            w = w - s * q_bilinear(space, w, e) * e
        n2 = q_bilinear(space, w, w)
        if abs(n2) <= tol * max(np.dot(w, w), 1e-300):
            raise DegenerateError("isotropic or dependent vector in q-Gram-Schmidt")
        s = 1.0 if n2 > 0 else -1.0
        out.append(w / np.sqrt(abs(n2)))
        signs.append(s)
    return np.array(out), np.array(signs)


def orthonormal_completion(space, basis):
    """Extend a q-orthonormal real set to a q-orthonormal basis of the whole space.

    Returns ``(B, signs)`` with the input vectors first, then positive, then
    negative completions.
    """
    B0 = np.atleast_2d(np.asarray(basis, dtype=float))
    comp = orthogonal_complement(space, B0)
    G = restricted_gram(space, comp)
    ev, U = np.linalg.eigh(G)
    order = np.argsort(-ev)
    rest = (U[:, order].T @ comp)
    rest = rest / np.sqrt(np.abs(ev[order]))[:, None]
    s0 = np.sign(np.diag(restricted_gram(space, B0)))
    return np.vstack([B0, rest]), np.concatenate([s0, np.sign(ev[order])])
