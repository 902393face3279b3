"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS criterion k`` or ``FAIL criterion k`` line
(visible with ``pytest -s``) and then asserts. Running this file directly
evaluates every criterion and prints the same lines without stopping early.
"""

import json
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from instances import degenerate_instance, nondegenerate_instance, postcondition_residuals
from k3period import cli
from k3period import d2_model as d2
from k3period import disk_chains as dc
from k3period import lattice_transport as lt
from k3period import nevanlinna as nv
from k3period import numerics
from k3period import period_domain as pd
from k3period.indefinite import QuadraticSpace, Signature

GOLDEN = Path(__file__).parent / "golden" / "two_disk_lengths.json"


def report(k, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}")
    return ok, detail


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


# ---------------------------------------------------------------------------


def criterion_1():
    rng = np.random.default_rng(1)
    exact = True
    worst = 0.0
    zero_diag = True
    with Timer() as t:
        for _ in range(100):
            x, y = d2.random_point(rng).chart()
            M = d2.metric_matrix(x, y)
            m = 1.0 / (x * np.conj(y) - 1.0) ** 2
            exact &= M[0, 1] == m and M[1, 0] == np.conj(m)
            zero_diag &= M[0, 0] == 0 and M[1, 1] == 0
            u = np.array([x * y + 1, 1j * (1 - x * y), y - x, x + y])
            vx = np.array([y, -1j * y, -1, 1])
            vy = np.array([x, -1j * x, 1, 1])
            pt = pd.PeriodPoint(d2.SPACE, u)
            V = [vx, vy]
            oracle = np.array([[pd.gs_metric(pt, a, b) for b in V] for a in V])
            worst = max(worst, np.abs(M - oracle).max() / np.abs(oracle).max())
    ok = exact and zero_diag and worst < 1e-10 and t.elapsed < 1.0
    return report(1, ok, f"closed form exact={exact}, zero diagonal={zero_diag}, max rel vs oracle {worst:.2e}, {t.elapsed:.2f}s")


def _mixed_hessian(f, m, h=1e-3):
    """Hermitian matrix ``d_j dbar_k f`` at 0 by polarized directional Laplacians."""
    e = np.eye(m)

    def L(u):
        return numerics.dzdzbar(lambda t: f(t[..., None] * u), np.zeros(1, dtype=complex), h=h)[0]

    H = np.zeros((m, m), dtype=complex)
    for j in range(m):
        H[j, j] = L(e[j])
        for k in range(j + 1, m):
            val = (L(e[j] + e[k]) - L(e[j] - e[k]) + 1j * L(e[j] + 1j * e[k]) - 1j * L(e[j] - 1j * e[k])) / 4
            H[j, k], H[k, j] = val, np.conj(val)
    return H


def criterion_2():
    sp = QuadraticSpace.standard(2)
    rng = np.random.default_rng(2)
    o = np.array([1, 1j, 0, 0, 0])
    Po = np.vstack([o.real, o.imag])
    target_omega = np.diag([-0.5, -1, 1, 1])
    target_d = np.diag([-1.0, 1, 1])
    consts, shape_res = [], 0.0
    with Timer() as t:
        for _ in range(20):
            P = np.vstack(pd.random_point(sp, rng).to_positive_2plane())
            g = lt.isometry_fixing_N(sp, None, Po, P)
            c0, c1 = complex(*rng.standard_normal(2)) + 2, complex(*rng.standard_normal(2))

            def logN(sig):
                s = (c0 + c1 * sig[..., 2:3]) * (sig @ g.T)
                return np.log(np.real(np.einsum("...i,ij,...j->...", s, sp.gram, np.conj(s))))

            def omega_chart(z):
                sig = np.zeros(z.shape[:-1] + (5,), dtype=complex)
                sig[..., 0] = 1
                sig[..., 1:] = o[1:] + z
                return sig

            def d_chart(w):
                sig = np.zeros(w.shape[:-1] + (5,), dtype=complex)
                sig[..., 0] = 1
                sig[..., 2:] = w
                sig[..., 1] = 1j * np.sqrt(1 + w[..., 0] ** 2 - w[..., 1] ** 2 - w[..., 2] ** 2)
                return sig

            for chart, m, target in ((omega_chart, 4, target_omega), (d_chart, 3, target_d)):
                theta = -2 * _mixed_hessian(lambda z: logN(chart(z)), m)
                c = np.real(np.sum(theta * target) / np.sum(target * target))
                consts.append(c)
                shape_res = max(shape_res, np.abs(theta - c * target).max())
        consts = np.array(consts)
        spread = float(np.ptp(consts) / abs(consts.mean()))
        kappa_geom = pd.curvature_factor_calibrate(sp, 20, rng)
        lib = kappa_geom * pd.metric_matrix_chart(sp, o[1:], "Omega")
        lib_res = np.abs(lib - consts.mean() * target_omega).max()
    ok = spread < 1e-4 and shape_res < 1e-6 and lib_res < 1e-4 and t.elapsed < 10
    return report(
        2,
        ok,
        f"constant {consts.mean():.10f} spread {spread:.2e}, shape residual {shape_res:.2e}, "
        f"kappa_geom {kappa_geom:.8f} (library matrix residual {lib_res:.2e}), {t.elapsed:.2f}s",
    )


def criterion_3():
    rng = np.random.default_rng(3)
    failures = 0
    with Timer() as t:
        for p in (1, 2, 5, 19):
            sp = QuadraticSpace.standard(p)
            for _ in range(100):
                failures += pd.metric_signature_at(pd.random_point(sp, rng)) != Signature(p, 1, 0)
                failures += pd.metric_signature_at(pd.random_point(sp, rng, False)) != Signature(p, 2, 0)
    ok = failures == 0 and t.elapsed < 10
    return report(3, ok, f"{failures} failures over 800 points, {t.elapsed:.2f}s")


def criterion_4():
    rng = np.random.default_rng(4)
    with Timer() as t:
        # profile against the metric oracle
        worst = 0.0
        count = 0
        while count < 200:
            lam = complex(*rng.standard_normal(2))
            tk = complex(*rng.standard_normal(2))
            x, y = tk, lam * tk
            if abs(x * np.conj(y) - 1) < 1e-2:
                continue
            v = np.array([1.0, lam])
            oracle = np.real(v @ d2.metric_matrix(x, y) @ np.conj(v))
            worst = max(worst, abs(dc.positivity_profile(lam, tk) - oracle) / max(1.0, abs(oracle)))
            count += 1
        # roots
        root_err = 0.0
        holds_literal = holds_exact = fails_beyond = True
        for _ in range(20):
            a = complex(rng.uniform(0.2, 3), rng.uniform(-3, 3))
            n = int(rng.integers(1, 10**4))
            m = abs(a)
            s0, s1 = dc.profile_polynomial_roots(a / n)
            e0 = (m - abs(a.imag)) / (m * a.real) * n
            e1 = (m + abs(a.imag)) / (m * a.real) * n
            root_err = max(root_err, abs(s0 - e0) / e0, abs(s1 - e1) / e1)
            ts = np.linspace(0, 1, 64)[:, None] * np.exp(2j * np.pi * np.arange(64) / 64)[None, :]
            C = dc.positivity_constant(a)
            # literal C * sqrt(n) radius on alpha with |alpha| >= 1, where C <= 1
            a_big = a / m * max(m, 1.0 + rng.uniform())
            lit = 0.999 * dc.positivity_constant(a_big) * np.sqrt(n)
            holds_literal &= bool(np.all(dc.positivity_profile(a_big / n, lit * ts) > 0))
            holds_exact &= bool(np.all(dc.positivity_profile(a / n, 0.999 * np.sqrt(C * n) * ts) > 0))
            # a disk reaching beyond the larger root contains non-positive samples
            beyond = 1.01 * np.sqrt(s1)
            disk = dc.f_lambda(a / n, scale=beyond).to_quadric()
            fails_beyond &= dc.certify(d2.SPACE, disk) <= 0
    ok = worst < 1e-10 and root_err < 1e-12 and holds_literal and holds_exact and fails_beyond and t.elapsed < 5
    return report(
        4,
        ok,
        f"profile vs oracle {worst:.2e}, root rel err {root_err:.2e}, positivity holds "
        f"(literal {holds_literal}, sqrt(C n) {holds_exact}), fails beyond larger root {fails_beyond}, {t.elapsed:.2f}s",
    )


def criterion_5():
    golden = json.loads(GOLDEN.read_text())["lengths"]
    ns = [10, 100, 1000, 10000]
    with Timer() as t:
        lengths, meets, verified = [], [], True
        for n in ns:
            data = dc.two_disk_data(1 + 1j, 1 + 1j, n)
            meets.append(data.meeting_residual)
            verified &= data.chain.verify() and all(dk.certificate > 0 for dk in data.chain.disks)
            lengths.append(dc.chain_length(data.chain))
    decreasing = all(a > b for a, b in zip(lengths, lengths[1:]))
    golden_err = max(abs(l - golden[str(n)]) / golden[str(n)] for n, l in zip(ns, lengths))
    ok = (
        verified
        and max(meets) < 1e-10
        and decreasing
        and lengths[-1] < lengths[0] / 10
        and golden_err < 1e-9
        and t.elapsed < 30
    )
    table = ", ".join(f"{n}:{l:.6f}" for n, l in zip(ns, lengths))
    return report(5, ok, f"lengths {table}; max meeting residual {max(meets):.1e}; golden rel err {golden_err:.1e}, {t.elapsed:.2f}s")


def criterion_6():
    target = 1e-2
    failures = 0
    counts = {}
    with Timer() as t:
        rng = np.random.default_rng(6)
        for _ in range(100):
            a, b = d2.random_point(rng), d2.random_point(rng)
            try:
                ch = dc.connect_d2(a, b, target, rng)
                good = (
                    ch.verify()
                    and dc.chain_length(ch) <= target
                    and pd.projectively_equal(ch.endpoints[0], d2.iota(a.x, a.y))
                    and pd.projectively_equal(ch.endpoints[-1], d2.iota(b.x, b.y))
                )
            except Exception:
                good = False
            failures += not good
        counts["D2"] = failures
        for p in (2, 19):
            sp = QuadraticSpace.standard(p)
            rng = np.random.default_rng(600 + p)
            fails = 0
            for _ in range(100):
                a, b = pd.random_point(sp, rng), pd.random_point(sp, rng)
                try:
                    ch = dc.connect_D(sp, a, b, target, rng)
                    good = (
                        ch.verify()
                        and dc.chain_length(ch) <= target
                        and pd.projectively_equal(ch.endpoints[0], a.rep)
                        and pd.projectively_equal(ch.endpoints[-1], b.rep)
                    )
                except Exception:
                    good = False
                fails += not good
            counts[f"p={p}"] = fails
            failures += fails
    ok = failures == 0 and t.elapsed < 300
    return report(6, ok, f"failures {counts}, {t.elapsed:.1f}s")


def criterion_7():
    rng = np.random.default_rng(7)
    worst = {}
    with Timer() as t:
        for name, maker in (("nondegenerate", nondegenerate_instance), ("degenerate", degenerate_instance)):
            w = 0.0
            for _ in range(100):
                sp, N, P, Q = maker(rng)
                g = lt.isometry_fixing_N(sp, N, P, Q)
                w = max(w, *postcondition_residuals(sp, g, N, P, Q))
            worst[name] = w
    ok = max(worst.values()) < 1e-9 and t.elapsed < 10
    return report(7, ok, ", ".join(f"{k} max residual {v:.1e}" for k, v in worst.items()) + f", {t.elapsed:.2f}s")


def criterion_8(cache_dir=None):
    out = {}
    ok = True
    with Timer() as t:
        for p in (1, 2, 19):
            est = cli.gamma_estimate(QuadraticSpace.standard(p), np.random.default_rng(800 + p), points=10, directions=50)
            out[str(p)] = est["gamma"]
            ok &= est["spread"] < 1e-4 and est["gamma"] > 0 and len(est["values"]) == 500
            ok &= bool(np.all(est["values"] < 0))
            out[f"spread_{p}"] = est["spread"]
    if cache_dir is not None:
        (Path(cache_dir) / "gamma_cache.json").write_text(json.dumps(out, sort_keys=True))
    ok &= t.elapsed < 60
    summary = ", ".join(f"p={p}: gamma {out[str(p)]:.10f} spread {out[f'spread_{p}']:.1e}" for p in (1, 2, 19))
    return report(8, ok, f"{summary}, {t.elapsed:.2f}s")


def criterion_9():
    sp = QuadraticSpace.standard(1)
    with Timer() as t:
        kappa, _, spread = nv.calibrate_jensen(tol=1.0)
        variations = {}
        for name, curve in cli.standard_curves().items():
            variations[name] = nv.characteristic_balance(curve, sp, nv.geometric_grid(2.0, 50.0, 9), kappa).variation
    ok = spread < 1e-6 and max(variations.values()) < 1e-3 and t.elapsed < 120
    detail = ", ".join(f"{k} {v:.1e}" for k, v in variations.items())
    return report(9, ok, f"kappa_jensen {kappa:.12f} spread {spread:.1e}; residual variation {detail}, {t.elapsed:.2f}s")


def criterion_10a():
    rng = np.random.default_rng(10)
    grid = [2.0**-k for k in range(7)]
    with Timer() as t:
        viol = {p: nv.nesting_check(QuadraticSpace.standard(p), grid, 1000, rng)[0] for p in (1, 2, 19)}
    ok = sum(viol.values()) == 0 and t.elapsed < 10
    return report("10a", ok, f"nesting violations over 1000 lines {viol}, {t.elapsed:.2f}s")


def criterion_10b():
    rng = np.random.default_rng(11)
    sp = QuadraticSpace.standard(2)
    with Timer() as t:
        rows = [nv.phi_eps_bound(sp, 2.0**-k, 10**4, rng) for k in range(7)]
    holds = all(r["holds_inv_eps"] for r in rows)
    worst = max(r["max"] * r["eps"] for r in rows)
    sharp = all(r["holds_two_over_eps"] for r in rows)
    ok = holds and t.elapsed < 10
    return report(
        "10b",
        ok,
        f"max eps*phi_eps {worst:.4f} (bound 1), violations {[r['violations_inv_eps'] for r in rows]}; "
        f"2/eps bound holds {sharp}, {t.elapsed:.2f}s",
    )


def _test_curves():
    base = dc.f_lambda((1 + 1j) / 4, dc.SAFETY * dc.positivity_radius(1 + 1j, 4)).to_quadric()
    M = np.array([[1.2, 0.3 + 0.4j], [-0.5j, 0.9]])
    A = M / np.sqrt(np.linalg.det(M))
    moved = base.apply_linear(d2.sl2_matrix_4(A))
    sp2 = QuadraticSpace.standard(2)
    B = pd.subdomain_embed(pd.random_point(sp2, np.random.default_rng(12)), np.random.default_rng(13))
    return [("f_alpha_n", base, d2.SPACE), ("sl2_translate", moved, d2.SPACE), ("embedded_p2", base.apply_linear(B.T), sp2)]


def criterion_11():
    rng = np.random.default_rng(11)
    res, sens = {}, {}
    with Timer() as t:
        for name, curve, sp in _test_curves():
            gamma = cli.gamma_estimate(sp, rng, points=2, directions=3)["gamma"]
            z = []
            while len(z) < 50:
                c = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
                if dc.positivity_ratio(sp, curve, c) > 0:
                    z.append(c)
            r = nv.curvature_identity_check(curve, sp, z, gamma=gamma)
            r9 = nv.curvature_identity_check(curve, sp, z, gamma=0.9 * gamma)
            res[name], sens[name] = r, r9 / r
    ok = max(res.values()) < 1e-3 and min(sens.values()) >= 10 and t.elapsed < 60
    detail = ", ".join(f"{k} residual {res[k]:.1e} (0.9 gamma x{sens[k]:.1e})" for k in res)
    return report(11, ok, f"{detail}, {t.elapsed:.2f}s")


SUITE = ["calibrate", "domain", "metric", "hsc", "d2", "chain", "twistor-chain", "nevanlinna", "transport"]


def _run_suite(out):
    codes = [cli.main([cmd, "--out", str(out), "--seed", "12"]) for cmd in SUITE]
    return codes, {p.name: p.read_bytes() for p in sorted(Path(out).iterdir())}


def criterion_12(tmp):
    tmp = Path(tmp)
    with Timer() as t:
        c1, f1 = _run_suite(tmp / "a")
        c2, f2 = _run_suite(tmp / "b")
    same = f1.keys() == f2.keys() and all(f1[k] == f2[k] for k in f1)
    ok = same and not any(c1) and not any(c2)
    return report(12, ok, f"{len(f1)} files byte-identical={same}, exit codes {set(c1) | set(c2)}, {t.elapsed:.1f}s")


# ---------------------------------------------------------------------------


def _check(result):
    ok, detail = result
    assert ok, detail


def test_criterion_1_d2_metric_closed_form():
    _check(criterion_1())


def test_criterion_2_chart_metric_at_base_point():
    _check(criterion_2())


def test_criterion_3_signatures():
    _check(criterion_3())


def test_criterion_4_positivity_profile():
    _check(criterion_4())


def test_criterion_5_two_disk_chain_lengths():
    _check(criterion_5())


@pytest.mark.slow
def test_criterion_6_connect_random_pairs():
    _check(criterion_6())


def test_criterion_7_isometry_builder():
    _check(criterion_7())


def test_criterion_8_curvature_constant(tmp_path):
    _check(criterion_8(tmp_path))


def test_criterion_9_characteristic_residual():
    _check(criterion_9())


def test_criterion_10a_cone_nesting():
    _check(criterion_10a())


def test_criterion_10b_phi_eps_inverse_eps_bound():
    _check(criterion_10b())


def test_criterion_11_curvature_identity():
    _check(criterion_11())


def test_criterion_12_cli_determinism(tmp_path):
    _check(criterion_12(tmp_path))


if __name__ == "__main__":
    import tempfile

    with tempfile.TemporaryDirectory() as tmp:
        results = [
            criterion_1(),
            criterion_2(),
            criterion_3(),
            criterion_4(),
            criterion_5(),
            criterion_6(),
            criterion_7(),
            criterion_8(tmp),
            criterion_9(),
            criterion_10a(),
            criterion_10b(),
            criterion_11(),
            criterion_12(tmp),
        ]
    sys.exit(0 if all(ok for ok, _ in results) else 1)
