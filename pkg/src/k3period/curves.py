"""Polynomial holomorphic curves with exact jets."""

from __future__ import annotations

from math import factorial

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import PreconditionError


class PolynomialCurve:
    """Curve ``z -> (c_0(z), ..., c_{dim-1}(z))`` with polynomial components.

    Parameters
    ----------
    coeffs : array_like, shape (dim, deg + 1)
        Complex coefficients in ascending degree.
    """

    def __init__(self, coeffs):
        c = np.atleast_2d(np.asarray(coeffs, dtype=complex))
        if not np.any(c):
            raise PreconditionError("all components vanish identically")
        # trim trailing zero columns, keep at least one
        nz = np.nonzero(np.any(c != 0, axis=0))[0]
        self.coeffs = c[:, : nz[-1] + 1].copy()
        self.coeffs.setflags(write=False)

    @classmethod
    def constant(cls, v):
        return cls(np.asarray(v, dtype=complex)[:, None])

    @classmethod
    def linear(cls, v0, v1):
        return cls(np.stack([np.asarray(v0, complex), np.asarray(v1, complex)], axis=1))

    @property
    def dim(self):
        return self.coeffs.shape[0]

    @property
    def degree(self):
        return self.coeffs.shape[1] - 1

    def __call__(self, z):
        """Evaluate; returns shape ``shape(z) + (dim,)``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape + (self.dim,), dtype=complex)
        for k in range(self.degree, -1, -1):
            out = out * z[..., None] + self.coeffs[:, k]
        return out

    def derivative(self, k=1):
        c = self.coeffs
        for _ in range(k):
            if c.shape[1] == 1:
                return _ZeroCurve(self.dim)
            c = c[:, 1:] * np.arange(1, c.shape[1])
        if not np.any(c):
            return _ZeroCurve(self.dim)
        return PolynomialCurve(c)

    def jets(self, z0, order):
        """Taylor coefficients at ``z0``: array (order+1, dim), row k = f^(k)(z0)/k!."""
        out = np.zeros((order + 1, self.dim), dtype=complex)
        c = self.coeffs
        for k in range(order + 1):
            if k > self.degree:
                break
            deriv = c[:, k:] * _falling(np.arange(k, c.shape[1]), k)[None, :]
            out[k] = P.polyval(z0, deriv.T) / factorial(k)
        return out

    def compose(self, poly):
        """Precompose with a polynomial ``z -> sum poly[k] z^k``."""
        poly = np.asarray(poly, dtype=complex)
        rows = []
        for comp in self.coeffs:
            acc = np.zeros(1, dtype=complex)
            for a in comp[::-1]:
                acc = P.polyadd(P.polymul(acc, poly), [a])
            rows.append(acc)
        width = max(len(r) for r in rows)
        return PolynomialCurve(np.array([np.pad(r, (0, width - len(r))) for r in rows]))

    def compose_affine(self, a, b=0.0):
        return self.compose([b, a])

    def apply_linear(self, M):
        """Post-compose with a linear map ``M`` (shape (m, dim))."""
        return PolynomialCurve(np.asarray(M) @ self.coeffs)

    def scale_by_polynomial(self, poly):
        poly = np.asarray(poly, dtype=complex)
        out = np.zeros((self.coeffs.shape[0], self.coeffs.shape[1] + len(poly) - 1), dtype=complex)
        for i, c in enumerate(self.coeffs):
            prod = P.polymul(c, poly)
            out[i, : len(prod)] = prod
        return PolynomialCurve(out)

    def to_json(self):
        return {"components": [[[float(c.real), float(c.imag)] for c in row] for row in self.coeffs]}

    @classmethod
    def from_json(cls, data):
        comps = data["components"]
        width = max(len(r) for r in comps)
        arr = np.zeros((len(comps), width), dtype=complex)
        for i, row in enumerate(comps):
            for k, (re, im) in enumerate(row):
                arr[i, k] = complex(re, im)
        return cls(arr)

    def __repr__(self):
        return f"PolynomialCurve(dim={self.dim}, degree={self.degree})"


class _ZeroCurve(PolynomialCurve):
    def __init__(self, dim):
        self.coeffs = np.zeros((dim, 1), dtype=complex)

    def derivative(self, k=1):
        return self


def _falling(n, k):
    out = np.ones_like(n, dtype=float)
    for j in range(k):
        out = out * (n - j)
    return out


def series_divide(num, den, order):
    """Power-series quotient ``num / den`` up to ``order`` (rows are coefficients)."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    out = np.zeros((order + 1,) + num.shape[1:], dtype=complex)
    for k in range(order + 1):
        acc = num[k].copy() if k < len(num) else np.zeros(num.shape[1:], complex)
        for j in range(1, min(k, len(den) - 1) + 1):
            acc = acc - den[j] * out[k - j]
        out[k] = acc / den[0]
    return out


class D2Curve:
    """Curve into P^1 x P^1 given by two homogeneous polynomial pairs."""

    def __init__(self, x: PolynomialCurve, y: PolynomialCurve):
        if x.dim != 2 or y.dim != 2:
            raise PreconditionError("D2Curve needs two pairs of components")
        self.x = x
        self.y = y

    def __call__(self, z):
        return self.x(z), self.y(z)

    def compose_affine(self, a, b=0.0):
        return D2Curve(self.x.compose_affine(a, b), self.y.compose_affine(a, b))

    def to_quadric(self) -> PolynomialCurve:
        """Push forward by the quadric isomorphism (components are bilinear in x, y)."""
        x0, x1 = self.x.coeffs
        y0, y1 = self.y.coeffs
        m = P.polymul
        comps = [
            P.polyadd(m(x0, y0), m(x1, y1)),
            1j * P.polysub(m(x1, y1), m(x0, y0)),
            P.polysub(m(x1, y0), m(x0, y1)),
            P.polyadd(m(x1, y0), m(x0, y1)),
        ]
        width = max(len(c) for c in comps)
        return PolynomialCurve(np.array([np.pad(c, (0, width - len(c))) for c in comps]))
