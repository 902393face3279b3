"""Nevanlinna functionals for polynomial curves into Omega.

Densities are taken with respect to Lebesgue area ``dA``:

* ``omega``: ``h_alg(F', F'; F) = -d dbar log N``, ``N = q(F, conj F)``;
* ``fs``: ``d dbar log |F|^2``;
* the second fundamental form density ``|pr_perp(nabla f')|^2 / |f'|^2``.

With these, ``T(r) = int_{|z|<r} rho log(r / max(1, |z|)) dA`` and the
circle-mean form of the Jensen identity holds with the constant
``kappa_jensen`` measured by :func:`calibrate_jensen`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import numerics
from .curves import PolynomialCurve, series_divide
from .disk_chains import fs_norm2
from .errors import CalibrationError, ConvergenceError, DegenerateError, DomainError, PreconditionError
from .indefinite import QuadraticSpace, h_sesquilinear, signature
from .period_domain import h_alg, metric_tensor, random_omega_vectors

N_THETA = 256
N_CIRCLE = 1024
RTOL = 1e-6


class EpsilonMetric:
    """Form ``G + eps * G_plus`` where ``G_plus`` is the positive spectral part of ``G``."""

    def __init__(self, space: QuadraticSpace, eps):
        if eps <= 0:
            raise PreconditionError("eps must be positive")
        ev, U = np.linalg.eigh(space.gram)
        Gp = (U * np.maximum(ev, 0.0)) @ U.T
        self.space = space
        self.eps = float(eps)
        self.gram = space.gram + self.eps * Gp
        self.dim = space.dim
        self.p = space.p
        sig = signature(self.gram)
        if (sig.positive, sig.negative) != (3, space.p):
            raise PreconditionError("eps-metric lost the signature")

    def h(self, v, w):
        return h_sesquilinear(self, v, w)


# ---------------------------------------------------------------------------
# pointwise densities


def omega_density(space, curve: PolynomialCurve, z):
    F = curve(z)
    dF = curve.derivative()(z)
    return np.real(h_alg(space, F, dF, dF))


def fs_density(curve: PolynomialCurve, z):
    return fs_norm2(curve(z), curve.derivative()(z))


def _density_fn(curve, metric, space):
    if metric == "fs":
        return lambda z: fs_density(curve, z)
    if metric == "omega":
        return lambda z: omega_density(space, curve, z)
    if isinstance(metric, EpsilonMetric):
        return lambda z: omega_density(metric, curve, z)
    if callable(metric):
        return metric
    raise PreconditionError(f"unknown metric {metric!r}")


def _polar_integral(density, r, m, n_theta):
    """``int rho log(r / max(1,|z|)) dA`` with ``m`` Gauss nodes per radial piece."""
    th = np.exp(2j * np.pi * np.arange(n_theta) / n_theta)
    logr = np.log(r)
    total = 0.0
    if logr == 0:
        return 0.0
    s, ws = numerics.gauss_legendre(0.0, min(1.0, r), m)
    ring = numerics.periodic_trapezoid(density(s[:, None] * th[None, :]))
    total += np.sum(ws * s * ring) * logr
    if r > 1:
        u, wu = numerics.gauss_legendre(0.0, logr, m)
        s = np.exp(u)
        ring = numerics.periodic_trapezoid(density(s[:, None] * th[None, :]))
        total += np.sum(wu * s * s * ring * (logr - u))
    return float(total)


def characteristic(curve, metric="omega", r=2.0, space=None, n_theta=N_THETA, rtol=RTOL, m0=16, m_max=4096):
    """Characteristic function ``T(r)`` of the pulled-back density.

    The radial rule doubles until the relative change drops below ``rtol``.
    """
    if r < 1:
        raise PreconditionError("r must be at least 1")
    density = _density_fn(curve, metric, space)
    m = m0
    prev = _polar_integral(density, r, m, n_theta)
    while m < m_max:
        m *= 2
        cur = _polar_integral(density, r, m, n_theta)
        if abs(cur - prev) <= rtol * abs(cur) or abs(cur - prev) < 1e-14:
            return cur
        prev = cur
    raise ConvergenceError(f"characteristic did not converge at r={r}")


def _circle_mean(fn, r, n):
    th = numerics.circle_nodes(n)
    vals = fn(r * th)
    if not np.all(np.isfinite(vals)):
        raise DomainError(f"potential singular on the circle |z| = {r}")
    return numerics.periodic_trapezoid(vals)


def characteristic_via_jensen(curve, potential, r, n=N_CIRCLE):
    """Circle-mean difference ``int phi(f(r e^it)) dt - int phi(f(e^it)) dt``.

    Multiply by ``kappa_jensen`` to compare with :func:`characteristic`.
    """
    fn = lambda z: potential(curve(z))  # noqa: E731
    return float(_circle_mean(fn, r, n) - _circle_mean(fn, 1.0, n))


IDENTITY = PolynomialCurve([[0, 1]])


def calibrate_jensen(radii=(2.0, 5.0, 10.0, 50.0), a=0.5 + 0.25j, tol=1e-6):
    """Measure ``kappa_jensen`` on three potentials of the identity curve.

    Left-hand sides: ``log|z|^2`` and ``log|z - a|^2`` have Lelong mass ``pi``
    (so ``T = pi log r``, ``|a| < 1``); ``log(1 + |z|^2)`` is integrated by
    quadrature of its density ``1 / (1 + |z|^2)^2``.
    """
    pots = {
        "log|z|^2": (lambda F: np.log(np.abs(F[..., 0]) ** 2), lambda r: np.pi * np.log(r)),
        "log|z-a|^2": (
            lambda F: np.log(np.abs(F[..., 0] - a) ** 2),
            lambda r: np.pi * np.log(r / max(1.0, abs(a))),
        ),
        "log(1+|z|^2)": (
            lambda F: np.log1p(np.abs(F[..., 0]) ** 2),
            lambda r: characteristic(IDENTITY, lambda z: 1.0 / (1.0 + np.abs(z) ** 2) ** 2, r, rtol=1e-10),
        ),
    }
    ratios = {}
    for name, (pot, lhs) in pots.items():
        ratios[name] = [lhs(r) / characteristic_via_jensen(IDENTITY, pot, r) for r in radii]
    allr = np.concatenate([np.asarray(v) for v in ratios.values()])
    kappa = float(np.mean(allr))
    spread = float(np.ptp(allr) / abs(kappa))
    if spread > tol:
        raise CalibrationError(f"Jensen ratios disagree: relative spread {spread:.3e}")
    return kappa, {k: [float(x) for x in v] for k, v in ratios.items()}, spread


KAPPA_JENSEN = 0.25


def phi(space, F, eps=None):
    """Ratio ``|F|^2 / h(F, F)`` (with the eps-metric when ``eps`` is given)."""
    metric = space if eps is None else EpsilonMetric(space, eps)
    E = np.sum(np.abs(F) ** 2, axis=-1)
    N = np.real(h_sesquilinear(metric, F, F))
    return E / N


def proximity(curve, r, space, n=N_CIRCLE, eps=None):
    """Circle integral of ``log phi`` along ``|z| = r``."""
    th = numerics.circle_nodes(n)
    vals = phi(space, curve(r * th), eps)
    if np.any(vals <= 0) or not np.all(np.isfinite(vals)):
        raise DomainError("curve leaves Omega on the circle")
    return float(numerics.periodic_trapezoid(np.log(vals)))


@dataclass
class CharacteristicTable:
    r: np.ndarray
    T_fs: np.ndarray
    T_omega: np.ndarray
    p_f: np.ndarray
    residual: np.ndarray
    kappa_jensen: float

    @property
    def variation(self):
        return float(np.ptp(self.residual))

    def rows(self):
        return [
            dict(r=a, T_fs=b, T_omega=c, p_f=d, residual=e)
            for a, b, c, d, e in zip(self.r, self.T_fs, self.T_omega, self.p_f, self.residual)
        ]


def geometric_grid(r0=2.0, r1=50.0, k=9):
    return np.geomspace(r0, r1, k)


def characteristic_balance(curve, space, r_grid=None, kappa_jensen=KAPPA_JENSEN):
    """Table of ``T_fs + T_omega - kappa * p_f`` over ``r_grid``."""
    r_grid = geometric_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    Tfs = np.array([characteristic(curve, "fs", r) for r in r_grid])
    Tom = np.array([characteristic(curve, "omega", r, space) for r in r_grid])
    pf = np.array([proximity(curve, r, space) for r in r_grid])
    res = Tfs + Tom - kappa_jensen * pf
    return CharacteristicTable(r_grid, Tfs, Tom, pf, res, kappa_jensen)


def log_slope(curve, metric="fs", space=None, r0=1e2, r1=1e4):
    """Slope of ``T`` against ``log r`` between two large radii."""
    a = characteristic(curve, metric, r0, space)
    b = characteristic(curve, metric, r1, space)
    return (b - a) / (np.log(r1) - np.log(r0))


# ---------------------------------------------------------------------------
# eps-metrics


def epsilon_cone_test(space, eps, sigma, v):
    """True when the eps-metric is positive on the tangent line spanned by ``v``."""
    em = EpsilonMetric(space, eps)
    return bool(np.real(h_alg(em, sigma, v, v)) > 0)


def phi_eps(space, eps, sigma):
    return phi(space, np.asarray(sigma), eps)


def random_omega_points(space, k, rng):
    return random_omega_vectors(space, k, rng)


def phi_eps_bound(space, eps, samples, rng):
    """Maximum of ``phi_eps`` over random points of Omega against ``1/eps`` and ``2/eps``."""
    pts = random_omega_points(space, samples, rng)
    vals = phi_eps(space, eps, pts)
    mx = float(vals.max())
    return {
        "eps": float(eps),
        "max": mx,
        "bound_inv_eps": 1.0 / eps,
        "holds_inv_eps": bool(mx <= 1.0 / eps),
        "bound_two_over_eps": 2.0 / eps,
        "holds_two_over_eps": bool(mx < 2.0 / eps),
        "violations_inv_eps": int(np.sum(vals > 1.0 / eps)),
    }


def nesting_check(space, eps_grid, lines, rng):
    """Count nesting violations between eps-cones over random tangent lines.

    Returns ``(true_direction, printed_direction)`` counts where the first
    checks ``eta-positive => eps-positive`` and the second the converse, for
    every ``eps < eta`` in the grid.
    """
    eps_grid = sorted(eps_grid)
    sig = random_omega_points(space, lines, rng)
    V = rng.standard_normal(sig.shape) + 1j * rng.standard_normal(sig.shape)
    pos = {e: np.real(h_alg(EpsilonMetric(space, e), sig, V, V)) > 0 for e in eps_grid}
    true_v = printed_v = 0
    for i, e in enumerate(eps_grid):
        for eta in eps_grid[i + 1 :]:
            true_v += int(np.sum(pos[eta] & ~pos[e]))
            printed_v += int(np.sum(pos[e] & ~pos[eta]))
    return true_v, printed_v


# ---------------------------------------------------------------------------
# second fundamental form and the curvature identity


def _chart_metric(space, c, w):
    """Chart matrix of ``h_alg`` for the chart ``sigma_c = 1`` (batched)."""
    n = space.dim
    free = [k for k in range(n) if k != c]
    s = np.zeros(w.shape[:-1] + (n,), dtype=complex)
    s[..., c] = 1.0
    s[..., free] = w
    H = metric_tensor(space, s)
    return H[..., free, :][..., :, free]


def _gamma_term(space, c, w, u, h=1e-3):
    """Christoffel contraction ``Gamma(u, u)`` at chart points ``w`` (batched)."""
    nu = np.linalg.norm(u, axis=-1, keepdims=True)
    uh = u / nu

    def Mt(t):
        return _chart_metric(space, c, w[None] + t[..., None] * uh[None])

    dM = numerics.dz(Mt, np.zeros(w.shape[:-1], dtype=complex), h=h)
    M = _chart_metric(space, c, w)
    MT = np.swapaxes(M, -1, -2)
    rhs = np.einsum("...ba,...b->...a", dM, uh)  # (dM^T) u
    return (nu**2) * np.linalg.solve(MT, rhs[..., None])[..., 0], M


def _gpair(M, a, b):
    return np.einsum("...a,...ab,...b->...", a, M, np.conj(b))


def _density_from(space, c, w, g, X):
    """``|pr_perp X|^2 / |g|^2`` in the chart metric at ``w``."""
    M = _chart_metric(space, c, w)
    gg = _gpair(M, g, g)
    Xp = X - (_gpair(M, X, g) / gg)[..., None] * g
    return np.real(_gpair(M, Xp, Xp) / gg)


def _chart_jets(F, dF, d2F, c):
    idx = np.arange(F.shape[-1])
    free = idx[idx != c]
    Fc, dFc, d2Fc = F[..., c], dF[..., c], d2F[..., c]
    w = F[..., free] / Fc[..., None]
    w1 = (dF[..., free] - w * dFc[..., None]) / Fc[..., None]
    w2 = (d2F[..., free] - 2 * w1 * dFc[..., None] - w * d2Fc[..., None]) / Fc[..., None]
    return w, w1, w2


def density_batch(curve, space, z, h=1e-3):
    """Second fundamental form density at points away from ramification."""
    z = np.asarray(z, dtype=complex)
    shape = z.shape
    zf = z.ravel()
    F = curve(zf)
    dF = curve.derivative()(zf)
    d2F = curve.derivative(2)(zf)
    cidx = np.argmax(np.abs(F), axis=-1)
    out = np.empty(zf.shape, dtype=float)
    for c in np.unique(cidx):
        sel = cidx == c
        w, w1, w2 = _chart_jets(F[sel], dF[sel], d2F[sel], int(c))
        G, _ = _gamma_term(space, int(c), w, w1, h)
        out[sel] = _density_from(space, int(c), w, w1, w2 + G)
    return out.reshape(shape)


def ramification_points(curve, tol=1e-8):
    """Common zeros of the minors ``F_i F_j' - F_j F_i'`` (located by polynomial roots)."""
    from numpy.polynomial import polynomial as P

    C = curve.coeffs
    D = curve.derivative().coeffs
    minors = []
    for i in range(curve.dim):
        for j in range(i + 1, curve.dim):
            m = P.polysub(P.polymul(C[i], D[j]), P.polymul(C[j], D[i]))
            m = np.trim_zeros(m, "b")
            if len(m) and np.any(np.abs(m) > 1e-14):
                minors.append(m)
    if not minors:
        raise DegenerateError("curve is constant")
    base = min(minors, key=len)
    roots = np.roots(base[::-1]) if len(base) > 1 else np.array([])
    keep = []
    for z0 in roots:
        vals = [abs(P.polyval(z0, m)) / max(1.0, np.abs(m).max()) for m in minors]
        if max(vals) < tol * max(1.0, abs(z0)) ** (len(base)):
            keep.append(z0)
    return np.array(keep)


def second_fundamental_density(curve, space, z, h=1e-3, ram_tol=1e-10):
    """Density of the second fundamental form of the tangent line of ``curve`` at ``z``.

    At a ramification point ``f' = (z - z0)^m g`` the computation uses ``g``.
    """
    z = complex(z)
    F = curve(z)
    c = int(np.argmax(np.abs(F)))
    order = curve.degree + 3
    jets = curve.jets(z, order)
    wj = series_divide(np.delete(jets, c, axis=1), jets[:, c], order)
    scale = np.linalg.norm(wj[0]) + 1.0
    k = 1
    while k < order and np.linalg.norm(wj[k]) <= ram_tol * scale:
        k += 1
    if k == 1:
        return float(density_batch(curve, space, np.array([z]), h)[0])
    # f' = (z - z0)^m g with m = k - 1; at z0 the Christoffel term drops out
    if k + 1 > order:
        raise DegenerateError("curve is constant near the point")
    g = k * wj[k]
    gp = (k + 1) * wj[k + 1]
    return float(_density_from(space, c, wj[0][None], g[None], gp[None])[0])


def lambda0(curve, space, z):
    return omega_density(space, curve, z)


def curvature_identity_check(curve, space, z_samples, gamma=2.0, h=1e-3, guard=1e-3, return_all=False):
    """Max relative residual of ``d dbar log lambda0 = gamma lambda0 + density``.

    ``lambda0 = h_alg(f', f')``; the left side is a Richardson-extrapolated
    fourth-order finite-difference Laplacian.
    """
    z = np.asarray(z_samples, dtype=complex).ravel()
    ram = ramification_points(curve)
    if len(ram):
        d = np.abs(z[:, None] - ram[None, :]).min(axis=1)
        if np.any(d < guard):
            raise DomainError("sample too close to a ramification point")
    lam = lambda0(curve, space, z)
    if np.any(lam <= 0):
        raise DomainError("curve not positive at a sample")
    lhs = numerics.dzdzbar(lambda t: np.log(lambda0(curve, space, t)), z, h=h)
    dens = density_batch(curve, space, z)
    rhs = gamma * lam + dens
    res = np.abs(lhs - rhs) / np.maximum(np.abs(lhs), gamma * lam)
    if return_all:
        return float(res.max()), dict(lhs=lhs, rhs=rhs, lam=lam, density=dens)
    return float(res.max())


def smt_report(curve, space, r_grid=None, gamma=2.0):
    """Diagnostic columns ``(r, gamma T_omega, T_sigma, log r + log T_omega)``."""
    r_grid = geometric_grid() if r_grid is None else np.asarray(r_grid, dtype=float)
    rows = []
    for r in r_grid:
        To = characteristic(curve, "omega", r, space)
        Ts = characteristic(curve, lambda z: density_batch(curve, space, z), r, rtol=1e-6)
        rows.append(
            dict(
                r=float(r),
                gamma_T_omega=gamma * To,
                T_sigma=Ts,
                log_r_plus_log_T_omega=float(np.log(r) + (np.log(To) if To > 0 else np.nan)),
            )
        )
    return rows
