import json
import os
import textwrap
from pathlib import Path

import pytest

from volterra_feller.cli import build_parser, main

GOLDEN = Path(__file__).parent / "golden"


def _write_ini(tmp_path, body, name="run.ini"):
    path = tmp_path / name
    path.write_text(textwrap.dedent(body))
    return str(path)


CIR_FAMILY = """\
    [model]
    family = cir
    kappa = 1.0
    theta = 1.0
    sigma = 1.0
    x0 = 0.2

    [kernel]
    kind = constant
    level = 1.0

    [test]
    name = family
    """


# ------------------------------------------------------------------- verdicts


def test_family_run_prints_json_verdicts(tmp_path, capsys):
    rc = main(["test", "--config", _write_ini(tmp_path, CIR_FAMILY)])
    out = capsys.readouterr()
    assert rc == 0
    doc = json.loads(out.out)
    assert doc["config"]["model"]["family"] == "cir"
    verdicts = doc["verdicts"]
    assert any(
        v["boundary"] == "Left" and v["verdict"] == "NoExitAS" for v in verdicts
    )
    for v in verdicts:
        assert set(v) >= {"boundary", "verdict", "theorem", "evidence"}


def test_all_inconclusive_exits_2(tmp_path, capsys):
    cfg = """\
        [model]
        family = jacobi
        a = 0.0
        b = 1.0
        kappa = 1.0
        theta = 0.5
        sigma = 10.0
        x0 = 0.5

        [kernel]
        kind = constant
        level = 1.0

        [test]
        name = sufficient
        """
    rc = main(["test", "--config", _write_ini(tmp_path, cfg)])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 2
    assert all(v["verdict"] == "Inconclusive" for v in doc["verdicts"])


def test_model_errors_exit_1_with_named_key(tmp_path, capsys):
    cfg = CIR_FAMILY.replace("kappa = 1.0", "kappa = -1.0")
    rc = main(["test", "--config", _write_ini(tmp_path, cfg)])
    out = capsys.readouterr()
    assert rc == 1
    assert out.err.startswith("error:")
    assert "kappa" in out.err


def test_unknown_config_key_is_an_error(tmp_path, capsys):
    cfg = CIR_FAMILY + "    typo_key = 3\n"
    rc = main(["test", "--config", _write_ini(tmp_path, cfg)])
    err = capsys.readouterr().err
    assert rc == 1
    assert "typo_key" in err


def test_missing_config_file_exits_1(capsys):
    rc = main(["test", "--config", "/nonexistent/run.ini"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


# --------------------------------------------------------------------- output


def test_output_path_writes_file_and_keeps_stdout_quiet(tmp_path, capsys):
    target = tmp_path / "verdicts.json"
    cfg = CIR_FAMILY + f"\n    [output]\n    path = {target}\n"
    rc = main(["test", "--config", _write_ini(tmp_path, cfg)])
    out = capsys.readouterr()
    assert rc == 0
    assert out.out == ""
    doc = json.loads(target.read_text())
    assert doc["verdicts"]


def test_csv_round_trip_is_byte_identical(tmp_path, capsys):
    # the CSV header comments echo a complete INI config; feeding that back
    # must reproduce the run byte for byte
    cfg = """\
        [model]
        family = cir
        kappa = 1.0
        theta = 1.0
        sigma = 1.0
        x0 = 0.2

        [kernel]
        kind = sumexp
        weights = 1.0
        rates = 1.0

        [test]
        name = scale
        x_grid = 0.5, 1.0, 1.5
        """
    rc = main(["scale", "--config", _write_ini(tmp_path, cfg), "--format", "csv"])
    first = capsys.readouterr().out
    assert rc == 0
    echoed = "".join(
        line[2:] + "\n" for line in first.splitlines() if line.startswith("# ")
    )
    rc2 = main(["scale", "--config", _write_ini(tmp_path, echoed, name="echo.ini")])
    # the echoed config pins format=csv, so no flag is needed the second time
    second = capsys.readouterr().out
    assert rc2 == 0
    assert second == first


def test_format_flag_overrides_config(tmp_path, capsys):
    cfg = CIR_FAMILY + "\n    [output]\n    format = csv\n"
    rc = main(["test", "--config", _write_ini(tmp_path, cfg), "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 0
    json.loads(out)


# --------------------------------------------------------------------- approx


def test_approx_truncation_scalars(capsys):
    rc = main(["approx", "--alpha", "0.5", "--scheme", "truncation", "--T", "1.0"])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert doc["config"]["approx"]["k0"] == pytest.approx(0.6366197723675814, rel=1e-12)
    assert doc["config"]["approx"]["kprime0"] == pytest.approx(
        -0.2122065907891938, rel=1e-12
    )
    assert len(doc["rows"]) == 4  # default lag grid


def test_approx_quadrature_needs_intervals(capsys):
    rc = main(["approx", "--alpha", "0.5", "--scheme", "fractional"])
    assert rc == 1
    assert "--intervals" in capsys.readouterr().err


def test_approx_truncation_needs_T(capsys):
    rc = main(["approx", "--alpha", "0.5", "--scheme", "truncation"])
    assert rc == 1
    assert "--T" in capsys.readouterr().err


# ---------------------------------------------------------- other subcommands


def test_resolvent_reports_hypotheses(tmp_path, capsys):
    cfg = """\
        [kernel]
        kind = sumexp
        weights = 1.0
        rates = 1.0

        [sim]
        dt = 0.001
        horizon = 2.0
        """
    rc = main(["resolvent", "--config", _write_ini(tmp_path, cfg)])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    row = doc["resolvent"]
    assert row["passed"] is True
    assert row["density_nonnegative"] and row["kprime_conv_nonpositive"]
    assert row["atom"] == pytest.approx(1.0)
    assert row["kl_residual"] <= 1e-2


def test_simulate_reports_are_reproducible(tmp_path, capsys):
    cfg = """\
        [model]
        family = cir
        kappa = 1.0
        theta = 1.0
        sigma = 1.0
        x0 = 1.0

        [kernel]
        kind = constant
        level = 1.0

        [sim]
        dt = 0.01
        horizon = 0.5
        n_paths = 32
        seed = 5
        """
    path = _write_ini(tmp_path, cfg)
    rc1 = main(["simulate", "--config", path])
    first = json.loads(capsys.readouterr().out)
    rc2 = main(["simulate", "--config", path])
    second = json.loads(capsys.readouterr().out)
    assert rc1 == rc2 == 0
    assert first["report"] == second["report"]
    assert first["report"]["n_paths"] == 32


def test_crosscheck_agrees_on_defended_verdict(tmp_path, capsys):
    cfg = """\
        [model]
        family = cir
        kappa = 1.0
        theta = 1.0
        sigma = 1.0
        x0 = 0.2

        [kernel]
        kind = constant
        level = 1.0

        [test]
        name = family

        [sim]
        dt = 0.005
        horizon = 1.0
        n_paths = 200
        seed = 1
        """
    rc = main(["crosscheck", "--config", _write_ini(tmp_path, cfg)])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert doc["crosscheck"]["consistent"] is True
    statuses = {c["status"] for c in doc["crosscheck"]["checks"]}
    assert "contradict" not in statuses


# ----------------------------------------------------------------- help text


@pytest.mark.parametrize(
    "name", ["main", "test", "scale", "resolvent", "approx", "simulate", "crosscheck"]
)
def test_help_snapshots(name, monkeypatch):
    monkeypatch.setenv("COLUMNS", "80")
    parser = build_parser()
    if name == "main":
        text = parser.format_help()
    else:
        subs = next(a for a in parser._actions if getattr(a, "choices", None))
        text = subs.choices[name].format_help()
    assert text == (GOLDEN / f"help_{name}.txt").read_text()
