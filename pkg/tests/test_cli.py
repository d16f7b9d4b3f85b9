import json

import pytest

from spiralnls.cli import (
    EXIT_CHECK,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    run_cli,
)
from spiralnls.grid import ModelParams, SectorKind, build_grid
from spiralnls.minimize import SolveConfig, solve_ground

ARGS_SMALL = ["--R", "12", "--nr", "96", "--ntheta", "16", "--grad_tol", "1e-7"]


def test_missing_subcommand_is_usage_error(capsys):
    assert run_cli([]) == EXIT_USAGE
    capsys.readouterr()


def test_solve_ground_end_to_end(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = run_cli(["solve-ground", "--p", "4", "--q", "1", "--lambda", "2",
                    "--sector", "half", "--out-dir", out] + ARGS_SMALL)
    assert code == EXIT_OK
    summary = capsys.readouterr().out
    assert "converged=True" in summary

    report = json.loads((tmp_path / "out" / "ground_p4_q1_lam2.json").read_text())
    assert report["converged"] is True
    # fixture comparison: the same solve through the API
    grid = build_grid(12.0, 96, 16, SectorKind.half_disk())
    rep = solve_ground(grid, ModelParams(p=4.0, q=1, lam=2.0),
                       SolveConfig(grad_tol=1e-7, newton_refine=True))
    assert report["energy"]["total"] == pytest.approx(rep.energy.total, rel=1e-12)
    manifest = json.loads(
        (tmp_path / "out" / "ground_p4_q1_lam2_manifest.json").read_text())
    assert manifest["command"] == "solve-ground"


def test_solve_radial_and_check_and_reconstruct(tmp_path, capsys):
    out = str(tmp_path / "out")
    assert run_cli(["solve-radial", "--p", "4", "--out-dir", out]) == EXIT_OK
    data = json.loads((tmp_path / "out" / "radial_p4_k0.json").read_text())
    assert abs(data["energy"] - 5.850) / 5.850 < 0.005

    code = run_cli(["solve-ground", "--p", "4", "--q", "1", "--lambda", "1",
                    "--sector", "half", "--out-dir", out] + ARGS_SMALL)
    assert code == EXIT_OK
    sol = str(tmp_path / "out" / "ground_p4_q1_lam1.csv")
    assert run_cli(["check", sol]) == EXIT_OK
    capsys.readouterr()

    code = run_cli(["reconstruct", sol, "--nt", "8", "--nxy", "12",
                    "--out-dir", out])
    assert code == EXIT_OK
    assert (tmp_path / "out" / "ground_p4_q1_lam1.vtk").exists()
    capsys.readouterr()


def test_check_names_failing_invariant(tmp_path, capsys):
    out = str(tmp_path / "out")
    run_cli(["solve-ground", "--p", "4", "--q", "1", "--lambda", "1",
             "--sector", "half", "--out-dir", out] + ARGS_SMALL)
    capsys.readouterr()
    src = tmp_path / "out" / "ground_p4_q1_lam1.csv"
    lines = src.read_text().splitlines(keepends=True)
    for i, ln in enumerate(lines):
        if ln.startswith("40,"):
            j, k, v = ln.split(",")
            lines[i] = f"{j},{k},{float(v) + 1.0!r}\n"
            break
    bad = tmp_path / "out" / "corrupt.csv"
    bad.write_text("".join(lines))
    assert run_cli(["check", str(bad)]) == EXIT_CHECK
    message = capsys.readouterr().out
    assert "nehari-residual" in message


def test_unknown_config_key_is_usage(tmp_path, capsys):
    code = run_cli(["solve-ground", "--set", "bogus=1",
                    "--out-dir", str(tmp_path)])
    assert code == EXIT_USAGE
    capsys.readouterr()


def test_env_var_output_dir(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SPIRALNLS_OUTDIR", str(tmp_path / "envout"))
    assert run_cli(["solve-radial", "--p", "3"]) == EXIT_OK
    assert (tmp_path / "envout" / "radial_p3_k0.json").exists()
    capsys.readouterr()


def test_solve_nodal_default_seed(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = run_cli(["solve-nodal", "--p", "4", "--q", "1", "--lambda", "0.2",
                    "--out-dir", out] + ARGS_SMALL)
    assert code == EXIT_OK
    report = json.loads((tmp_path / "out" / "nodal_p4_q1_lam0.2.json").read_text())
    assert report["converged"] is True
    assert report["nonradiality"] < 1e-6
    capsys.readouterr()


def test_asympt_cli_wiring(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = run_cli(["asympt-zero", "--p", "4", "--sector", "half",
                    "--lambdas", "1,0.5", "--R", "12", "--nr", "128",
                    "--ntheta", "16", "--grad_tol", "1e-6", "--out-dir", out])
    assert code == EXIT_OK
    rows = (tmp_path / "out" / "asympt_zero.csv").read_text().splitlines()
    assert len(rows) == 3
    summary = json.loads((tmp_path / "out" / "asympt_zero.json").read_text())
    assert summary["radius_sensitivity_rel"] < 1e-3

    code = run_cli(["asympt-inf", "--p", "4", "--sector", "half",
                    "--lambdas", "3,6", "--R", "16", "--nr", "160",
                    "--ntheta", "32", "--grad_tol", "1e-6", "--out-dir", out])
    assert code == EXIT_OK
    rows = (tmp_path / "out" / "asympt_inf.csv").read_text().splitlines()
    assert len(rows) == 3
    capsys.readouterr()


def test_sweep_cli_wiring(tmp_path, capsys):
    out = str(tmp_path / "out")
    code = run_cli(["sweep", "--p", "4", "--q", "1", "--lambdas", "0.2,8",
                    "--R", "14", "--nr", "128", "--ntheta", "24",
                    "--grad_tol", "1e-6", "--out-dir", out])
    assert code == EXIT_OK
    capsys.readouterr()
    csv = (tmp_path / "out" / "sweep.csv").read_text().splitlines()
    assert csv[0].startswith("lambda,alpha_hat,beta_hat,c_hat")
    assert len(csv) == 3
    summary = json.loads((tmp_path / "out" / "sweep.json").read_text())
    assert summary["winner_crossings"] == 1
    assert summary["bracket_low"] == 0.2
    assert summary["bracket_high"] == 8.0


def test_cli_reports_numerical_failure(tmp_path, capsys):
    # max_iters too small to converge -> nonzero exit with solver category
    out = str(tmp_path / "out")
    code = run_cli(["solve-ground", "--p", "4", "--q", "1", "--lambda", "1",
                    "--sector", "half", "--out-dir", out,
                    "--set", "max_iters=3", "--set", "newton=false",
                    "--set", "grad_tol=1e-12"] + ARGS_SMALL[:-2])
    assert code == EXIT_NUMERICAL
    capsys.readouterr()
