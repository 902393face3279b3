"""Command-line interface: every demonstration writes CSV tables into ``--out``.

Exit codes: 0 success, 2 precondition failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import d2_model as d2
from . import disk_chains as dc
from . import lattice_transport as lt
from . import nevanlinna as nv
from . import period_domain as pd
from .curves import PolynomialCurve
from .errors import NumericalError, PreconditionError
from .indefinite import QuadraticSpace
from .io import complex_vector, read_json, write_csv, write_json

CONSTANTS = "constants.json"
DEFAULT_TOLS = {"iso": pd.ISO_TOL, "eig": 1e-9, "chain_target": 1e-2}


class RunConfig:
    """Parsed configuration: space, command parameters, seed, output dir, tolerances."""

    def __init__(self, params=None, seed=0, out=".", tols=None, recalibrate=False):
        self.params = dict(params or {})
        self.seed = int(seed)
        self.out = Path(out)
        self.tols = dict(DEFAULT_TOLS)
        self.tols.update(tols or {})
        self.recalibrate = recalibrate

    @property
    def space(self):
        spec = self.params.get("space", {"p": 2, "gram": "standard"})
        return QuadraticSpace.from_json(spec)

    def rng(self, stream=0):
        return np.random.default_rng([self.seed, stream])

    def get(self, key, default):
        return self.params.get(key, default)


# ---------------------------------------------------------------------------
# constants cache


def compute_constants(cfg: RunConfig):
    p_list = sorted(set(cfg.get("p_list", [1, 2, 19]) + [cfg.space.p]))
    kappa_geom = pd.curvature_factor_calibrate(cfg.space, 20, cfg.rng(1))
    kappa_jensen, _, _ = nv.calibrate_jensen()
    gamma = {}
    for p in p_list:
        est = gamma_estimate(QuadraticSpace.standard(p), cfg.rng(100 + p), points=4, directions=4)
        gamma[str(p)] = est["gamma"]
    return {"kappa_geom": kappa_geom, "kappa_jensen": kappa_jensen, "gamma": gamma}


def load_constants(cfg: RunConfig, need_p=None):
    path = cfg.out / CONSTANTS
    if cfg.recalibrate or not path.exists():
        if not cfg.recalibrate:
            raise PreconditionError(f"no constants cache at {path}; run 'calibrate' or pass --recalibrate")
        consts = compute_constants(cfg)
        write_json(path, consts)
        return consts
    consts = read_json(path)
    if need_p is not None and str(need_p) not in consts.get("gamma", {}):
        raise PreconditionError(f"constants cache has no gamma for p={need_p}; recalibrate")
    return consts


def gamma_estimate(space, rng, points=10, directions=5):
    vals = []
    for _ in range(points):
        pt = pd.random_point(space, rng, isotropic=False)
        got = 0
        while got < directions:
            v = pd.random_tangent(pt, rng)
            if pd.gs_metric(pt, v, v).real <= 0:
                continue
            vals.append(pd.hsc(pt, v))
            got += 1
    vals = np.array(vals)
    return {
        "gamma": float(-vals.mean()),
        "spread": float(np.ptp(vals) / abs(vals.mean())),
        "values": vals,
    }


# ---------------------------------------------------------------------------
# commands


def cmd_calibrate(cfg):
    consts = compute_constants(cfg)
    write_json(cfg.out / CONSTANTS, consts)
    return consts


def _points_from_config(cfg, space, key="points", count=5, isotropic=True):
    if key in cfg.params:
        return [complex_vector(p) for p in cfg.params[key]]
    rng = cfg.rng(2)
    return [pd.random_point(space, rng, isotropic).rep for _ in range(count)]


def cmd_domain(cfg):
    sp = cfg.space
    pts = _points_from_config(cfg, sp, count=cfg.get("count", 5))
    rows = []
    for k, s in enumerate(pts):
        m = pd.membership(sp, s, cfg.tols["iso"])
        sig = ""
        if m in (pd.Membership.IN_D, pd.Membership.IN_OMEGA_ONLY):
            pt = pd.PeriodPoint(sp, s, isotropic=m is pd.Membership.IN_D)
            sig = str(pd.metric_signature_at(pt))
        rows.append(dict(index=k, membership=m.value, signature=sig))
    write_csv(cfg.out / "domain.csv", rows, ["index", "membership", "signature"])
    return rows


def cmd_metric(cfg):
    sp = cfg.space
    consts = load_constants(cfg)
    kg = consts["kappa_geom"]
    if "points" in cfg.params:
        pts = [complex_vector(p) for p in cfg.params["points"]]
    else:
        o = np.zeros(sp.dim, dtype=complex)
        o[0], o[1] = 1.0, 1j
        pts = [o]
    sig_rows, mat_rows = [], []
    for k, s in enumerate(pts):
        pt = pd.PeriodPoint(sp, s)
        sig_rows.append(dict(point_index=k, domain="D", signature=str(pd.metric_signature_at(pt))))
        om = pd.PeriodPoint(sp, s, isotropic=False)
        sig_rows.append(dict(point_index=k, domain="Omega", signature=str(pd.metric_signature_at(om))))
        chart = s / s[0]
        for which in ("Omega", "D"):
            M = kg * pd.metric_matrix_chart(sp, chart[1:], which)
            for i in range(M.shape[0]):
                for j in range(M.shape[1]):
                    mat_rows.append(dict(point_index=k, which=which, i=i, j=j, value=complex(M[i, j])))
    write_csv(cfg.out / "metric_signature.csv", sig_rows, ["point_index", "domain", "signature"])
    write_csv(cfg.out / "metric_matrix.csv", mat_rows, ["point_index", "which", "i", "j", "value"])
    return sig_rows


def cmd_hsc(cfg):
    rows = []
    summary = []
    for p in cfg.get("p_list", [1, 2, 19]):
        sp = QuadraticSpace.standard(p)
        est = gamma_estimate(sp, cfg.rng(200 + p), cfg.get("points", 10), cfg.get("directions", 5))
        for k, v in enumerate(est["values"]):
            rows.append(dict(p=p, sample=k, hsc=v))
        summary.append(dict(p=p, gamma=est["gamma"], spread=est["spread"]))
    write_csv(cfg.out / "hsc.csv", rows, ["p", "sample", "hsc"])
    write_csv(cfg.out / "hsc_summary.csv", summary, ["p", "gamma", "spread"])
    return summary


def cmd_d2(cfg):
    rng = cfg.rng(3)
    rows = []
    for k in range(cfg.get("count", 20)):
        p = d2.random_point(rng)
        X = d2.iota(p.x, p.y)
        quad = abs(X[0] ** 2 + X[1] ** 2 + X[2] ** 2 - X[3] ** 2) / np.vdot(X, X).real
        tt = d2.tau(*d2.tau(p.x, p.y))
        inv = max(pd.projective_distance(tt[0], p.x), pd.projective_distance(tt[1], p.y))
        x, y = p.chart()
        mres = np.abs(d2.metric_matrix(x, y) - d2.metric_matrix_via_iota(x, y)).max()
        M = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        M = M / np.sqrt(np.linalg.det(M))
        a1, a2 = d2.sl2_action(M, p), d2.sl2_action_hmatrix(M, p)
        rows.append(
            dict(
                sample=k,
                quadric_residual=quad,
                tau_involution_residual=inv,
                metric_vs_iota=mres,
                action_agreement=d2.point_distance(a1, a2),
                in_D=pd.membership(d2.SPACE, X).value,
            )
        )
    cols = ["sample", "quadric_residual", "tau_involution_residual", "metric_vs_iota", "action_agreement", "in_D"]
    write_csv(cfg.out / "d2_checks.csv", rows, cols)
    return rows


CHAIN_COLS = ["link_index", "n", "a", "b", "delta", "cumulative_length", "endpoint_residual", "min_positivity"]


def cmd_chain(cfg):
    alpha = complex(*cfg.get("alpha", [1.0, 1.0]))
    beta = complex(*cfg.get("beta", [1.0, 1.0]))
    sched = cfg.get("n_schedule", [10, 100, 1000, 10000])
    series = dc.kobayashi_upper_bound_series(n_schedule=sched, alpha=alpha, beta=beta)
    write_csv(cfg.out / "chain_series.csv", [dict(n=n, length=l) for n, l in series], ["n", "length"])
    rng = cfg.rng(4)
    target = cfg.tols["chain_target"]
    ch = dc.connect_d2(d2.random_point(rng), d2.random_point(rng), target, rng, alpha, beta)
    write_csv(cfg.out / "chain_d2_links.csv", ch.report_rows(), CHAIN_COLS)
    sp = cfg.space
    chD = dc.connect_D(sp, pd.random_point(sp, rng), pd.random_point(sp, rng), target, rng, alpha, beta)
    write_csv(cfg.out / "chain_D_links.csv", chD.report_rows(), CHAIN_COLS)
    return series


def cmd_twistor(cfg):
    sp = cfg.space
    rng = cfg.rng(5)
    rows = []
    for pair in range(cfg.get("count", 5)):
        p, q = pd.random_point(sp, rng), pd.random_point(sp, rng)
        tw = dc.twistor_chain(sp, p, q, rng)
        for k, W in enumerate(tw.lines):
            ev = np.linalg.eigvalsh(W.W @ sp.gram @ W.W.T)
            rows.append(
                dict(
                    pair=pair,
                    link_index=k,
                    min_eigenvalue=ev.min(),
                    start_on_line=W.contains(tw.points[k]),
                    end_on_line=W.contains(tw.points[k + 1]),
                )
            )
    write_csv(cfg.out / "twistor_chain.csv", rows, ["pair", "link_index", "min_eigenvalue", "start_on_line", "end_on_line"])
    return rows


def standard_curves():
    return {
        "constant": PolynomialCurve.constant([1.0, 0.3, 0.2, 0.1]),
        "f_lambda": dc.f_lambda(-1 + 1j).to_quadric(),
        "linear": PolynomialCurve.linear([1, 0, 0, 0], [0, 1, 0, 0.5]),
    }


def cmd_nevanlinna(cfg):
    consts = load_constants(cfg, need_p=1)
    sp = QuadraticSpace.standard(1)
    if "curve" in cfg.params:
        sp = cfg.space
        curves = {"config": PolynomialCurve.from_json(cfg.params["curve"])}
    else:
        curves = standard_curves()
    grid = np.geomspace(*cfg.get("r_range", [2.0, 50.0]), cfg.get("r_count", 9))
    rows, smt = [], []
    for name, c in curves.items():
        tab = nv.characteristic_balance(c, sp, grid, consts["kappa_jensen"])
        rows += [dict(curve=name, **r) for r in tab.rows()]
        if name != "constant":
            for r in nv.smt_report(c, sp, grid[:3], consts["gamma"][str(sp.p)]):
                smt.append(dict(curve=name, **r))
    write_csv(cfg.out / "characteristic.csv", rows, ["curve", "r", "T_fs", "T_omega", "p_f", "residual"])
    write_csv(
        cfg.out / "smt_report.csv",
        smt,
        ["curve", "r", "gamma_T_omega", "T_sigma", "log_r_plus_log_T_omega"],
    )
    return rows


def cmd_transport(cfg):
    sp = QuadraticSpace.standard(2) if "space" not in cfg.params else cfg.space
    if "walls" in cfg.params:
        walls = lt.WallSet.from_json(sp, cfg.params)
    else:
        walls = lt.WallSet(sp, [[0, 0, 0.5, 1, 0], [0, 0, 0, 0, 1]])
    ts = np.linspace(*cfg.get("t_range", [-0.1, 0.1]), cfg.get("samples", 21))
    path = [pd.PeriodPoint(sp, _demo_sigma(sp, t)) for t in ts]
    act = walls.active(path[0])
    rng = cfg.rng(6)
    kappa0 = lt.find_witness(path[0], walls, lt.ChamberSignVector({k: -1 for k in act}), rng)
    init = lt.chamber_signs(path[0], kappa0, walls)
    res = lt.transport_chamber(path, walls, init, rng)
    rows = [dict(sample_index=i, wall_index=k, event=e) for i, k, e in res.log]
    write_csv(cfg.out / "transport_log.csv", rows, ["sample_index", "wall_index", "event"])
    final = [dict(wall_index=k, sign="+" if s > 0 else "-") for k, s in sorted(res.final.signs.items())]
    write_csv(cfg.out / "transport_final.csv", final, ["wall_index", "sign"])
    return rows


def _demo_sigma(sp, t):
    s = np.zeros(sp.dim, dtype=complex)
    s[0] = 1.0
    s[1] = 1j * np.cos(t)
    s[2] = 1j * np.sin(t)
    return s


COMMANDS = {
    "calibrate": cmd_calibrate,
    "domain": cmd_domain,
    "metric": cmd_metric,
    "hsc": cmd_hsc,
    "d2": cmd_d2,
    "chain": cmd_chain,
    "twistor-chain": cmd_twistor,
    "nevanlinna": cmd_nevanlinna,
    "transport": cmd_transport,
}


def run(command, cfg: RunConfig):
    """Run one command; returns the process exit code."""
    try:
        COMMANDS[command](cfg)
    except PreconditionError as exc:
        _error(exc, 2)
        return 2
    except NumericalError as exc:
        _error(exc, 3)
        return 3
    return 0


def _error(exc, code):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}, sort_keys=True))


def _parse_tol(items):
    out = {}
    for item in items or []:
        name, _, value = item.partition("=")
        if not _:
            raise argparse.ArgumentTypeError(f"bad --tol {item!r}; expected NAME=VALUE")
        out[name] = float(value)
    return out


def build_parser():
    ap = argparse.ArgumentParser(prog="k3period", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", type=Path, help="JSON configuration file")
    ap.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--recalibrate", action="store_true", help="recompute the constants cache")
    ap.add_argument("--tol", action="append", metavar="NAME=VALUE", help="tolerance override")
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        params = read_json(args.config) if args.config else {}
        tols = _parse_tol(args.tol)
    except (OSError, ValueError, argparse.ArgumentTypeError) as exc:
        _error(PreconditionError(str(exc)), 2)
        return 2
    cfg = RunConfig(params, args.seed, args.out, tols, args.recalibrate)
    return run(args.command, cfg)


if __name__ == "__main__":
    sys.exit(main())
