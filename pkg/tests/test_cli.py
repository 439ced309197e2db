import os, sys
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

import importlib.util
import json
from unittest.mock import patch

import pytest

from zeta_engine.zeta import ZetaResult

ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
CURVES = os.path.join(ROOT, 'curves')


def _load_cli():
    spec = importlib.util.spec_from_file_location("zeta_cli", os.path.join(ROOT, 'scripts', 'zeta_cli.py'))
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


cli = _load_cli()


def _fake_result(P):
    return ZetaResult(7, 1, [7 ** 4], P, 1, 4, 4, 31, timings_ms={"zeta": 1.0})


def test_info_reports_precision_plan(capsys):
    assert cli.main(["info", os.path.join(CURVES, 'diamond_f7.txt'), "--json"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["precision_N"] == 31
    assert info["genus"] == 1
    assert info["boundary_points"] == 4
    assert info["chi"] == [-1, 1]


def test_zeta_json_schema(capsys):
    with patch.object(cli, "compute_zeta", return_value=_fake_result([1, -3])) as mocked:
        code = cli.main(["zeta", os.path.join(CURVES, 'diamond_f7.txt'), "--json", "--kmax", "2", "--threads", "3"])
    assert code == 0
    assert mocked.call_args.kwargs["threads"] == 3
    data = json.loads(capsys.readouterr().out)
    assert set(data) == {
        "p", "n", "q", "chi", "P", "genus", "boundary_points", "volume_x2",
        "precision_N", "point_counts", "timings_ms",
    }
    assert data["point_counts"] == [[1, 4], [2, 40]]


def test_verify_exit_codes(capsys):
    path = os.path.join(CURVES, 'diamond_f7.txt')
    with patch.object(cli, "compute_zeta", return_value=_fake_result([1, -3])):
        assert cli.main(["verify", path, "--kmax", "1"]) == 0
    assert "ok" in capsys.readouterr().out
    with patch.object(cli, "compute_zeta", return_value=_fake_result([1, -2])):
        assert cli.main(["verify", path, "--kmax", "1"]) == 3
    assert "MISMATCH" in capsys.readouterr().out


def test_bad_curve_file(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("p 4\nterm 0 0 1\n", encoding="utf-8")
    assert cli.main(["zeta", str(bad)]) == 2
    assert "p not prime" in capsys.readouterr().err
    assert cli.main(["info", str(tmp_path / "missing.txt")]) == 2


def test_degenerate_curve_fails_with_stage(capsys):
    assert cli.main(["zeta", os.path.join(CURVES, 'diamond_f5.txt')]) == 1
    assert "[nondegen]" in capsys.readouterr().err


def test_usage_errors():
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["zeta"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        cli.main(["zeta", os.path.join(CURVES, 'diamond_f7.txt'), "--kmax", "0"])
    assert excinfo.value.code == 2
