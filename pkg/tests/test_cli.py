"""Command-line interface: output formats, configuration layering, exit codes."""
import json

import numpy as np
import pytest

from halfdirac import cli
from halfdirac.boundary import BoundaryCondition


def _run(capsys, argv):
    code = cli.main(argv)
    return code, capsys.readouterr().out


def test_classify_emits_the_canonical_label(capsys):
    code, out = _run(capsys, ["classify", "--class", "A14",
                              "--param", "beta=-1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["tag"] == "A14"
    assert payload["params"]["beta"] == [-1.0, 0.0]


def test_classify_output_is_byte_identical_across_runs(capsys):
    argv = ["classify", "--class", "A34", "--param", "beta1=4",
            "--param", "beta2=-4", "--param", "b12=-1j"]
    _, first = _run(capsys, argv)
    _, second = _run(capsys, argv)
    assert first == second


def test_classify_reads_a_boundary_condition_file(capsys, tmp_path, p,
                                                  condition_b):
    path = tmp_path / "bc.json"
    path.write_text(json.dumps(condition_b.to_dict()))
    code, out = _run(capsys, ["classify", "--bc", str(path)])
    assert code == 0
    assert json.loads(out)["tag"] == "A34"


def test_spectrum_csv_header_and_out_file(capsys, tmp_path):
    out_path = tmp_path / "spec.csv"
    code, _ = _run(capsys, ["spectrum", "--class", "A12",
                            "--format", "csv", "--out", str(out_path)])
    assert code == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "kx,omega,branch_id"
    assert len(lines) > 100


def test_winding_levinson_json(capsys):
    code, out = _run(capsys, ["winding", "levinson", "--class", "A12"])
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "levinson"
    assert payload["snapped"] == 1


def test_non_self_adjoint_condition_exits_2(capsys, tmp_path):
    bc = BoundaryCondition(
        A0=np.array([[1, 0, 0, 0], [0, 0, 1, 0]], dtype=complex),
        A1=np.zeros((2, 4), dtype=complex),
    )
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bc.to_dict()))
    code, _ = _run(capsys, ["classify", "--bc", str(path)])
    assert code == 2


def test_rank_deficient_condition_exits_3(capsys, tmp_path):
    bc = BoundaryCondition(
        A0=np.array([[1, 0, 0, 0], [2, 0, 0, 0]], dtype=complex),
        A1=np.zeros((2, 4), dtype=complex),
    )
    path = tmp_path / "rank1.json"
    path.write_text(json.dumps(bc.to_dict()))
    code, _ = _run(capsys, ["classify", "--bc", str(path)])
    assert code == 3


def test_missing_boundary_condition_is_an_error(capsys):
    with pytest.raises(SystemExit):
        cli.main(["classify"])


def test_param_parsing_accepts_complex_values():
    name, value = cli._parse_param("b12=0.5-1j")
    assert name == "b12" and value == 0.5 - 1j
    name, value = cli._parse_param("beta=2")
    assert name == "beta" and value == 2.0 and isinstance(value, float)


def test_configuration_precedence(tmp_path, monkeypatch):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("m = 2.0  # file layer\neps = 0.2\n")
    monkeypatch.setenv("HALFDIRAC_M", "3.0")
    monkeypatch.setenv("HALFDIRAC_EPS", "0.05")

    class Args:
        config = None
        m = None
        eps = None

    args = Args()
    # defaults only
    monkeypatch.delenv("HALFDIRAC_M")
    monkeypatch.delenv("HALFDIRAC_EPS")
    assert cli._layered(args, "m", float) == 1.0
    # environment beats defaults
    monkeypatch.setenv("HALFDIRAC_M", "3.0")
    assert cli._layered(args, "m", float) == 3.0
    # config file beats environment
    args.config = str(cfg)
    assert cli._layered(args, "m", float) == 2.0
    # flag beats config file
    args.m = 4.0
    assert cli._layered(args, "m", float) == 4.0


def test_config_file_rejects_malformed_lines(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign here\n")
    with pytest.raises(SystemExit):
        cli.read_config_file(str(cfg))


def test_float_serialization_uses_17_significant_digits():
    assert cli._fmt_float(1.0 / 3.0) == "0.33333333333333331"
    assert cli._fmt_float(float(np.pi)) == "3.1415926535897931"


def test_sweep_summary_and_exit_codes(capsys, monkeypatch):
    def fake_verify(p, bc):
        return {"class": "X", "params": {}, "C_plus": 1, "n_b": 1,
                "w_inf": 0, "predicted": 0, "consistent": True,
                "diagnostics": {}}

    monkeypatch.setattr(cli, "verify_identity", fake_verify)
    code, out = _run(capsys, ["sweep", "--samples", "2", "--seed", "5"])
    assert code == 0
    summary = json.loads(out)
    assert summary["n_runs"] == 14
    assert summary["n_convergent"] == 14
    assert summary["identity_match_rate"] == 1.0
    assert summary["prediction_match_rate"] == 1.0
    assert summary["nonconvergent"] == [] and summary["failures"] == []
    tags = [r["tag"] for r in summary["runs"]]
    assert tags == sorted(tags, key=tags.index)  # stable class-major order

    def bad_verify(p, bc):
        return {"class": "X", "params": {}, "C_plus": 1, "n_b": 0,
                "w_inf": 0, "predicted": 0, "consistent": False,
                "diagnostics": {}}

    monkeypatch.setattr(cli, "verify_identity", bad_verify)
    code, _ = _run(capsys, ["sweep", "--samples", "1", "--seed", "5"])
    assert code == 1


def test_sweep_is_deterministic_for_a_fixed_seed(capsys, monkeypatch):
    def fake_verify(p, bc):
        return {"class": "X", "params": {}, "C_plus": 1, "n_b": 1,
                "w_inf": 0, "predicted": 0, "consistent": True,
                "diagnostics": {}}

    monkeypatch.setattr(cli, "verify_identity", fake_verify)
    argv = ["sweep", "--samples", "2", "--seed", "11"]
    _, first = _run(capsys, argv)
    _, second = _run(capsys, argv)
    assert first == second
