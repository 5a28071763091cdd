import csv
import json
import math

import pytest

from doubledark import gain_threshold_numeric, validate_params
from doubledark.cli import CSV_HEADER, main

FIG2A = dict(omega=1, omega_c=0.2, gamma_b=1, gamma_c=1, gamma_d=1, gamma_0=0, r_pump=0)
FIG2B = dict(FIG2A, delta_c=1)
FIG3A = dict(FIG2A, omega_c=0.01, gamma_0=1e-4, r_pump=1e-3)
FIG3B = dict(FIG3A, delta_c=0.4, r_pump=5e-4)


@pytest.fixture
def config(tmp_path):
    def write(doc, name="cfg.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc), encoding="utf-8")
        return str(path)

    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


def test_scan_fig2a_rows(config, tmp_path, capsys):
    out = tmp_path / "fig2a.csv"
    cfg = config(dict(FIG2A, scan=dict(delta_min=-3, delta_max=3, points=201)))
    code, _, _ = run(capsys, "scan", "--config", cfg, "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 202
    assert lines[0] == ",".join(CSV_HEADER)
    rows = list(csv.reader(lines[1:]))
    assert all(len(r) == 5 and all(r) for r in rows)


def test_scan_is_deterministic(config, tmp_path, capsys):
    cfg = config(dict(FIG2B, delta_min=-1, delta_max=2, points=31, method="numeric"))
    texts = []
    for k in range(2):
        out = tmp_path / f"run{k}.csv"
        assert run(capsys, "scan", "--config", cfg, "--out", str(out))[0] == 0
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]
    row = texts[0].decode().splitlines()[1].split(",")
    assert row[1] == row[2] == ""


def test_scan_fig3a_shows_gain(config, tmp_path, capsys):
    out = tmp_path / "fig3a.csv"
    cfg = config(dict(FIG3A, scan=dict(delta_min=-3, delta_max=3, points=201)))
    assert run(capsys, "scan", "--config", cfg, "--out", str(out), "--method", "numeric")[0] == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert any(float(r["chi_im_numeric"]) < 0 for r in rows)


@pytest.mark.parametrize(
    "doc",
    ["{not json", "[1, 2]", json.dumps(dict(FIG2A, colour="red")), json.dumps(dict(FIG2A, gamma_b=-1)),
     json.dumps(dict(FIG2A, scan=dict(points=1))), json.dumps(dict(FIG2A, method="guess"))],
)
def test_scan_bad_config_exits_2(config, tmp_path, capsys, doc):
    code, _, err = run(capsys, "scan", "--config", config(doc), "--out", str(tmp_path / "x.csv"))
    assert code == 2 and err.startswith("error:")


def test_scan_needs_output(config, capsys):
    assert run(capsys, "scan", "--config", config(FIG2A))[0] == 2


def test_missing_config_file(tmp_path, capsys):
    assert run(capsys, "validate", "--config", str(tmp_path / "absent.json"))[0] == 2


@pytest.mark.parametrize("argv", [[], ["bogus"], ["scan"], ["threshold", "--config", "x.json", "--r-min", "a"]])
def test_usage_errors_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_dressed_fig2a(config, capsys):
    code, doc = run_json(capsys, "dressed", "--config", config(FIG2A))
    assert code == 0
    freqs = dict(zip(doc["exact"]["labels"], doc["exact"]["frequencies"]))
    assert freqs["+"] == pytest.approx(-1.0198, abs=1e-4)
    assert freqs["-"] == pytest.approx(1.0198, abs=1e-4)
    assert freqs["0"] == pytest.approx(0, abs=1e-12)
    assert doc["perturbative"]["frequencies"] == [-1, 1, 0]


def test_dressed_without_perturbation(config, capsys):
    code, doc = run_json(capsys, "dressed", "--config", config(dict(FIG2A, omega_c=0)))
    assert code == 0
    assert doc["exact"]["amplitudes"]["0"] == doc["perturbative"]["amplitudes"]["0"]


def test_dressed_fig2b_flags_validity(config, capsys):
    code, doc = run_json(capsys, "dressed", "--config", config(FIG2B))
    assert code == 0
    assert doc["perturbative"]["flags"] == ["ValidityViolated"]


def test_dressed_degenerate(config, capsys):
    cfg = config(dict(FIG2A, omega=0, omega_c=0))
    assert run(capsys, "dressed", "--config", cfg)[0] == 3
    code, doc = run_json(capsys, "dressed", "--config", cfg, "--allow-degenerate")
    assert code == 0 and doc["exact"]["flags"] == ["degenerate"]


def test_features_fig2a(config, capsys):
    code, doc = run_json(capsys, "features", "--config", config(FIG2A))
    assert code == 0
    assert doc["transparency_points"] == [0.2, -0.2]
    assert doc["interference_feature"]["center"] == 0
    assert doc["interference_feature"]["width"] == pytest.approx(0.12)
    assert doc["scan_zeros"]["zeros"] == pytest.approx([-0.2, 0.2], abs=1e-6)


def test_features_fig2b(config, capsys):
    code, doc = run_json(capsys, "features", "--config", config(FIG2B))
    assert code == 0
    assert doc["interference_feature"]["error"] == "ValidityViolated"
    assert doc["intersection_width"] == pytest.approx(0.0533, abs=1e-4)


def test_features_no_regime_exits_3(config, capsys):
    cfg = config(dict(FIG2A, delta_c=0.5, omega=0.62, delta_min=-1, delta_max=1, points=21))
    code, doc = run_json(capsys, "features", "--config", cfg)
    assert code == 3 and doc["intersection_width"]["error"] == "OutsideRegime"


def test_features_dark_line(config, capsys):
    code, doc = run_json(capsys, "features", "--config", config(dict(FIG2A, omega_c=0, delta0=0.3)))
    assert code == 0
    assert doc["dark_line"] == 0.3 and doc["interference_feature"] is None


def test_threshold_fig3a(config, capsys):
    code, doc = run_json(capsys, "threshold", "--config", config(FIG3A), "--r-min", "1e-5", "--r-max", "1e-2")
    assert code == 0
    assert doc["analytic"] == pytest.approx(5e-4)
    numeric = gain_threshold_numeric(validate_params(FIG3A), 1e-5, 1e-2)
    assert doc["numeric"] == pytest.approx(numeric, rel=1e-9)
    assert doc["relative_deviation"] == pytest.approx(abs(numeric - 5e-4) / 5e-4, rel=1e-9)


def test_threshold_bracket_below_exits_3(config, capsys):
    code, doc = run_json(capsys, "threshold", "--config", config(FIG3A), "--r-min", "1e-5", "--r-max", "1e-4")
    assert code == 3 and doc["numeric"] is None and doc["error"].startswith("NoSignChange")


def test_threshold_without_perturbation(config, capsys):
    cfg = config(dict(FIG3A, omega_c=0))
    code, doc = run_json(capsys, "threshold", "--config", cfg, "--r-min", "1e-5", "--r-max", "1e-4")
    assert doc["analytic"] == pytest.approx(2e-4) and doc["analytic_flags"]
    assert code in (0, 3)


def test_validate_fig2a_passes(config, capsys):
    code, doc = run_json(capsys, "validate", "--config", config(dict(FIG2A, points=201)))
    assert code == 0 and doc["status"] == "pass"
    names = {c["name"]: c for c in doc["checks"]}
    assert names["analytic_vs_numeric"]["value"] < 1e-4
    assert names["transparency_zeros"]["status"] == "pass"
    assert names["basis_invariance[lower-doublet]"]["status"] == "pass"


def test_validate_flux_imbalance_fails(config, capsys):
    cfg = config(dict(FIG2A, gamma_0=1e-3, r_b=1e-3, r_c=1e-3, r_d=0))
    code, doc = run_json(capsys, "validate", "--config", cfg)
    assert code == 1 and doc["status"] == "fail"
    assert "does not balance" in doc["checks"][0]["note"]


def test_validate_fig3b_skips_closed_form(config, capsys):
    code, doc = run_json(capsys, "validate", "--config", config(FIG3B))
    assert code == 0
    status = {c["name"]: c["status"] for c in doc["checks"]}
    assert status["analytic_vs_numeric"] == "skipped"
    assert status["basis_invariance[upper-doublet]"] == "pass"


def test_json_numbers_are_finite_or_null(config, capsys):
    _, out, _ = run(capsys, "threshold", "--config", config(dict(FIG3A, omega=0)), "--r-min", "1e-5",
                    "--r-max", "1e-4")
    doc = json.loads(out)
    assert doc["analytic"] is None
    for v in doc.values():
        assert not (isinstance(v, float) and not math.isfinite(v))
