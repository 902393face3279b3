"""Small numerical kernels: Wirtinger finite differences and quadrature rules."""

from __future__ import annotations

import numpy as np

# fourth-order central stencils
_D1 = (np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0, np.arange(-2, 3))
_D2 = (np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0, np.arange(-2, 3))


def _richardson(a_h, a_h2, order=4):
    f = 2.0**order
    return (f * a_h2 - a_h) / (f - 1.0)


def _stencil_eval(func, z0, direction, h, weights, offsets, power):
    z0 = np.asarray(z0)
    steps = (offsets * h * direction).reshape((-1,) + (1,) * z0.ndim)
    pts = z0[None] + steps
    vals = func(pts)
    return np.tensordot(weights, vals, axes=(0, 0)) / h**power


def dz(func, z0, h=1e-3):
    """Holomorphic Wirtinger derivative ``d/dz`` of ``func`` at complex ``z0``.

    ``func`` maps a complex array of shape ``(k,) + shape(z0)`` to values of
    shape ``(k,) + extra``; the result drops the leading axis.
    """
    w, o = _D1

    def one(step):
        fx = _stencil_eval(func, z0, 1.0, step, w, o, 1)
        fy = _stencil_eval(func, z0, 1j, step, w, o, 1)
        return 0.5 * (fx - 1j * fy)

    return _richardson(one(h), one(h / 2))


def dzbar(func, z0, h=1e-3):
    w, o = _D1

    def one(step):
        fx = _stencil_eval(func, z0, 1.0, step, w, o, 1)
        fy = _stencil_eval(func, z0, 1j, step, w, o, 1)
        return 0.5 * (fx + 1j * fy)

    return _richardson(one(h), one(h / 2))


def dzdzbar(func, z0, h=1e-3):
    """``d^2/dz dzbar = Laplacian / 4`` via a fourth-order stencil plus one Richardson step."""
    w, o = _D2

    def one(step):
        fxx = _stencil_eval(func, z0, 1.0, step, w, o, 2)
        fyy = _stencil_eval(func, z0, 1j, step, w, o, 2)
        return 0.25 * (fxx + fyy)

    return _richardson(one(h), one(h / 2))


def periodic_trapezoid(values, axis=-1):
    """Integral over [0, 2*pi) of equispaced periodic samples."""
    n = values.shape[axis]
    return values.sum(axis=axis) * (2.0 * np.pi / n)


def circle_nodes(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def gauss_legendre(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w
