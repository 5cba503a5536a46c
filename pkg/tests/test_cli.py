# tests/test_cli.py
"""
End-to-end runs of the wmorse command through main().
"""

import json

import numpy as np
import pytest
from scipy.linalg import LinAlgError

from WMorse.app.cli import build_parser, main
from WMorse.config.constants import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_INADMISSIBLE, EXIT_LEVEL_RANGE, EXIT_OK, EXIT_SOLVER
from WMorse.core.oracle import finite_difference
from WMorse.core.spectrum import solver
from WMorse.utils.io_utils import read_json

pytestmark = pytest.mark.usefixtures("no_colour")


def _read_csv(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, rows


def test_spectrum_json(tmp_path):
    out = tmp_path / "spectrum.json"
    assert main(["spectrum", "--g", "1", "--k", "0", "--levels", "6", "--out", str(out)]) == EXIT_OK
    payload = read_json(out)
    assert payload["params"]["k"] == 0.0
    levels = payload["levels"]
    assert [lv["index"] for lv in levels] == list(range(6))
    assert [lv["parity"] for lv in levels] == ["even", "odd"] * 3
    assert all(lv["energy"] > 0 for lv in levels)
    assert len(payload["oracle_comparison"]) == 6
    assert all(c["rel_error"] < 1e-4 for c in payload["oracle_comparison"])


def test_spectrum_bound_levels(tmp_path):
    out = tmp_path / "spectrum.json"
    assert main(["spectrum", "--g", "1", "--k", "3", "--levels", "4", "--out", str(out)]) == EXIT_OK
    levels = read_json(out)["levels"]
    assert levels[0]["energy"] < 0
    assert levels[0]["order_kind"] == "real"


def test_repulsive_ground_state_above_floor(capsys):
    assert main(["spectrum", "--g", "1", "--k", "-1", "--levels", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["levels"][0]["energy"] > 2.0


def test_spectrum_csv(tmp_path):
    out = tmp_path / "spectrum.csv"
    assert main(["spectrum", "--levels", "3", "--format", "csv", "--out", str(out)]) == EXIT_OK
    header, rows = _read_csv(out)
    assert header[:4] == ["index", "parity_sign", "order_value", "energy"]
    assert rows.shape == (3, 7)
    np.testing.assert_array_equal(rows[:, 1], [1, -1, 1])


def test_output_is_reproducible(tmp_path):
    args = ["spectrum", "--g", "1", "--k", "-0.5", "--levels", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    energies = [lv["energy"] for lv in read_json(a)["levels"]]
    assert all(isinstance(e, float) for e in energies)


def test_odd_eigenfunction_csv(tmp_path):
    out = tmp_path / "psi.csv"
    argv = ["eigenfunction", "--levels", "4", "--level", "1", "--xmax", "3", "--samples", "101", "--out", str(out)]
    assert main(argv) == EXIT_OK
    header, rows = _read_csv(out)
    assert header == ["x", "psi", "dpsi"]
    assert rows.shape == (101, 3)
    centre = int(np.argmin(np.abs(rows[:, 0])))
    assert abs(rows[centre, 1]) < 1e-12
    np.testing.assert_allclose(rows[::-1, 1], -rows[:, 1], atol=1e-12)


def test_even_eigenfunction_is_flat_at_origin(tmp_path):
    for level in (0, 2):
        out = tmp_path / f"psi{level}.json"
        argv = ["eigenfunction", "--levels", "3", "--level", str(level), "--samples", "3001", "--format", "json", "--out", str(out)]
        assert main(argv) == EXIT_OK
        payload = read_json(out)
        assert payload["level"]["parity"] == "even"
        x = np.array(payload["x"])
        psi = np.array(payload["psi"])
        c = int(np.argmin(np.abs(x)))
        assert abs(x[c]) < 1e-12
        h = x[c + 1] - x[c]
        # second-order forward difference uses only the x >= 0 samples
        slope = (-3.0 * psi[c] + 4.0 * psi[c + 1] - psi[c + 2]) / (2.0 * h)
        assert abs(slope) < 1e-4 * np.max(np.abs(np.array(payload["dpsi"])))


def test_level_out_of_range(capsys):
    assert main(["eigenfunction", "--levels", "3", "--level", "3"]) == EXIT_LEVEL_RANGE
    assert "[ERROR]" in capsys.readouterr().err


def test_missing_levels_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(solver, "scan_roots", lambda *args, **kwargs: [])
    assert main(["spectrum", "--k", "-0.5", "--levels", "2"]) == EXIT_SOLVER
    assert "IncompleteSpectrum" in capsys.readouterr().err


def test_oracle_breakdown_only_warns(monkeypatch, capsys):
    def breaks_down(*args, **kwargs):
        raise LinAlgError("singular matrix")

    monkeypatch.setattr(finite_difference, "solve_banded", breaks_down)
    assert main(["spectrum", "--k", "-0.5", "--levels", "2"]) == EXIT_OK
    captured = capsys.readouterr()
    assert json.loads(captured.out)["oracle_comparison"] == []
    assert "oracle comparison skipped" in captured.err


def test_verify_reports_convergence_anomaly(monkeypatch, tmp_path):
    def first_order(problem, count):
        return [-6.25 + 2.0 * i + 1.0 / problem.n_points for i in range(count)]

    monkeypatch.setattr(finite_difference, "fd_eigenvalues", first_order)
    out = tmp_path / "report.json"
    assert main(["verify", "--suite", "morse", "--out", str(out)]) == EXIT_CHECK_FAILED
    report = read_json(out)
    assert report["passed"] is False
    errors = [c for c in report["checks"] if c["status"] == "error"]
    assert len(errors) == 1 and "OrderAnomaly" in errors[0]["detail"]


def test_config_errors(tmp_path):
    assert main(["spectrum", "--samples", "10"]) == EXIT_CONFIG
    assert main(["spectrum", "--g", "-1"]) == EXIT_CONFIG
    assert main(["spectrum", "--config", str(tmp_path / "missing.json")]) == EXIT_CONFIG
    bad = tmp_path / "bad.json"
    bad.write_text('{"g": 1, "colour": "red"}', encoding="utf-8")
    assert main(["spectrum", "--config", str(bad)]) == EXIT_CONFIG
    assert main(["eigenfunction", "--levels", "2"]) == EXIT_CONFIG


def test_config_file_and_overrides(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"g": 2.0, "k": 0.0, "n_levels": 3}), encoding="utf-8")
    out = tmp_path / "spectrum.json"
    assert main(["spectrum", "--config", str(cfg), "--g", "1", "--out", str(out)]) == EXIT_OK
    payload = read_json(out)
    assert payload["params"]["g"] == 1.0
    assert len(payload["levels"]) == 3


def test_inadmissible_deletion(tmp_path, capsys):
    argv = ["deform", "--g", "1", "--k", "-0.5", "--krein-adler", "1", "--out", str(tmp_path / "ka")]
    assert main(argv) == EXIT_INADMISSIBLE
    assert "m=0 violates positivity" in capsys.readouterr().err
    assert not (tmp_path / "ka").exists()


def test_deform_needs_one_deletion_flag(tmp_path):
    assert main(["deform", "--out", str(tmp_path / "d")]) == EXIT_CONFIG
    assert main(["deform", "--crum", "1", "--krein-adler", "1,2", "--out", str(tmp_path / "d")]) == EXIT_CONFIG


def test_crum_deformation_files(tmp_path):
    out = tmp_path / "crum"
    argv = ["deform", "--g", "1", "--k", "-0.5", "--levels", "4", "--crum", "1", "--samples", "101", "--out", str(out)]
    assert main(argv) == EXIT_OK
    manifest = read_json(out / "manifest.json")
    assert manifest["deleted"] == [0]
    assert manifest["asymptotic_effective_k"] == pytest.approx(-1.5)
    indices = [lv["index"] for lv in manifest["levels"]]
    assert indices[0] == 1 and 0 not in indices
    for name in manifest["files"]:
        assert (out / name).exists()
    header, rows = _read_csv(out / "potential.csv")
    assert header == ["x", "V_deformed"]
    assert rows.shape == (101, 2)


def test_deform_past_the_whittaker_guard(tmp_path):
    out = tmp_path / "wide"
    argv = ["deform", "--g", "1", "--k", "-0.5", "--levels", "3", "--crum", "1", "--xmax", "6.5", "--samples", "27", "--out", str(out)]
    assert main(argv) == EXIT_OK
    _, rows = _read_csv(out / "potential.csv")
    assert np.all(np.isfinite(rows[[0, -1], 1]))
    _, psi = _read_csv(out / "level_1.csv")
    assert psi[0, 1] == 0.0 and psi[-1, 1] == 0.0


def test_wkb_table(capsys):
    assert main(["wkb", "--g", "1", "--k", "0", "--levels", "5", "--exact"]) == EXIT_OK
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [r["n"] for r in rows] == list(range(5))
    assert all(abs(r["gap"]) < 1.0 for r in rows)


def test_verify_whittaker(tmp_path):
    out = tmp_path / "report.json"
    assert main(["verify", "--suite", "whittaker", "--out", str(out)]) == EXIT_OK
    report = read_json(out)
    assert report["passed"] is True
    names = [c["name"] for c in report["checks"]]
    assert any(n.startswith("kw_identity") for n in names)


def test_verify_unknown_suite():
    assert main(["verify", "--suite", "nonsense"]) == EXIT_CONFIG


@pytest.mark.slow
@pytest.mark.parametrize("suite", ["spectrum", "crum", "ortho", "wkb", "morse"])
def test_verify_suites(tmp_path, suite):
    assert main(["verify", "--suite", suite, "--out", str(tmp_path / "r.json")]) == EXIT_OK


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
