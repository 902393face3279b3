import csv
import json

import numpy as np
import pytest

from k3period import cli


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def calibrated(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    assert cli.main(["calibrate", "--out", str(out), "--seed", "7"]) == 0
    return out


def test_calibrate_constants(calibrated):
    consts = json.loads((calibrated / "constants.json").read_text())
    assert abs(consts["kappa_geom"] - 2.0) < 1e-6
    assert consts["kappa_jensen"] == pytest.approx(0.25, rel=1e-6)
    assert set(consts["gamma"]) == {"1", "2", "19"}


def test_calibrate_deterministic(calibrated, tmp_path):
    assert cli.main(["calibrate", "--out", str(tmp_path), "--seed", "7"]) == 0
    assert (tmp_path / "constants.json").read_bytes() == (calibrated / "constants.json").read_bytes()


def test_metric_p19_signature(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"space": {"p": 19, "gram": "standard"}}))
    assert cli.main(["metric", "--config", str(cfg), "--out", str(tmp_path), "--recalibrate"]) == 0
    sig = {r["domain"]: r["signature"] for r in _rows(tmp_path / "metric_signature.csv")}
    assert sig == {"D": "19,1", "Omega": "19,2"}
    diag = [complex(r["value"]) for r in _rows(tmp_path / "metric_matrix.csv") if r["which"] == "D" and r["i"] == r["j"]]
    assert np.allclose(diag, [-1] + [1] * 19)


def test_metric_without_cache_is_precondition_error(tmp_path, capsys):
    assert cli.main(["metric", "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["exit_code"] == 2 and err["error"] == "PreconditionError"


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"space": {"p": 0, "gram": [[1, 0], [0, 1]]}}))
    assert cli.main(["domain", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert cli.main(["domain", "--tol", "oops", "--out", str(tmp_path)]) == 2


def test_domain_and_d2(tmp_path):
    assert cli.main(["domain", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "domain.csv")
    assert all(r["membership"] == "IN_D" and r["signature"] == "2,1" for r in rows)
    assert cli.main(["d2", "--out", str(tmp_path)]) == 0
    for r in _rows(tmp_path / "d2_checks.csv"):
        assert float(r["quadric_residual"]) < 1e-12
        assert float(r["metric_vs_iota"]) < 1e-8


def test_chain_lengths_decrease(calibrated):
    assert cli.main(["chain", "--out", str(calibrated)]) == 0
    lengths = [float(r["length"]) for r in _rows(calibrated / "chain_series.csv")]
    assert all(a > b for a, b in zip(lengths, lengths[1:]))
    links = _rows(calibrated / "chain_D_links.csv")
    assert float(links[-1]["cumulative_length"]) <= 1e-2
    assert list(links[0]) == cli.CHAIN_COLS


def test_hsc_twistor_transport(calibrated):
    cfg = calibrated / "hsc.json"
    cfg.write_text(json.dumps({"points": 3, "directions": 3}))
    assert cli.main(["hsc", "--config", str(cfg), "--out", str(calibrated)]) == 0
    for r in _rows(calibrated / "hsc_summary.csv"):
        assert float(r["gamma"]) == pytest.approx(2.0, rel=1e-4)
    assert cli.main(["twistor-chain", "--out", str(calibrated)]) == 0
    assert all(float(r["min_eigenvalue"]) > 0 for r in _rows(calibrated / "twistor_chain.csv"))
    assert cli.main(["transport", "--out", str(calibrated)]) == 0
    log = _rows(calibrated / "transport_log.csv")
    assert [r["event"] for r in log] == ["activated", "sign+", "deactivated"]


def test_nevanlinna_command(calibrated):
    cfg = calibrated / "nev.json"
    cfg.write_text(json.dumps({"r_count": 3}))
    assert cli.main(["nevanlinna", "--config", str(cfg), "--out", str(calibrated)]) == 0
    rows = _rows(calibrated / "characteristic.csv")
    assert {r["curve"] for r in rows} == {"constant", "f_lambda", "linear"}
    assert (calibrated / "smt_report.csv").exists()


def test_number_format(calibrated):
    text = (calibrated / "chain_series.csv").read_text().splitlines()
    assert text[0] == "n,length"
    value = text[1].split(",")[1]
    assert float(value) == float(repr(float(value)))
