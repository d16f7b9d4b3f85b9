import json

import numpy as np
import pytest

from spiralnls.errors import ConfigError
from spiralnls.grid import Field, ModelParams, SectorKind, build_grid
from spiralnls.io import (
    load_solution,
    parse_config,
    report_dict,
    save_solution,
    serialize_config,
    write_json,
    write_manifest,
)
from spiralnls.minimize import SolveConfig, solve_ground


def test_config_round_trip_canonical():
    text = """
    # run setup
    lambda = 2.5
    p = 3.0
    nr = 128
    newton = yes
    lambdas = 0.5, 1.0, 2
    """
    cfg = parse_config(text)
    canonical = serialize_config(cfg)
    again = serialize_config(parse_config(canonical))
    assert canonical == again
    lines = [ln.split(" = ")[0] for ln in canonical.strip().splitlines()]
    assert lines == sorted(lines)
    assert cfg["lambda"] == 2.5
    assert cfg["newton"] is True
    assert cfg["lambdas"] == (0.5, 1.0, 2.0)


def test_config_unknown_key():
    with pytest.raises(ConfigError):
        parse_config("granularity = 3\n")
    with pytest.raises(ConfigError):
        parse_config("", overrides={"not_a_key": "1"})


def test_config_bad_values():
    with pytest.raises(ConfigError):
        parse_config("nr = small\n")
    with pytest.raises(ConfigError):
        parse_config("newton = maybe\n")
    with pytest.raises(ConfigError):
        parse_config("p 4\n")


def test_config_overrides_win():
    cfg = parse_config("p = 3.0\n", overrides={"p": "5.0"})
    assert cfg["p"] == 5.0


def test_config_builds_objects():
    cfg = parse_config("sector = cone:0.5\nnr = 16\nntheta = 8\nR = 4\n")
    grid = cfg.grid()
    assert grid.sector.kind == "cone"
    assert grid.nr == 16
    params = cfg.model_params()
    assert params.p == 4.0
    scfg = cfg.solve_config()
    assert scfg.newton_refine is True


def test_solution_round_trip_bit_exact(tmp_path, rng):
    grid = build_grid(5.0, 12, 8, SectorKind.cone(0.7))
    field = Field(grid, rng.standard_normal((12, 8)))
    params = ModelParams(p=3.5, q=0, lam=2.25)
    path = tmp_path / "sol.csv"
    save_solution(path, field, params)
    loaded, loaded_params = load_solution(path)
    assert np.array_equal(loaded.values, field.values)
    assert loaded_params == params
    assert loaded.grid.sector == grid.sector
    assert np.array_equal(loaded.grid.radii, grid.radii)


def test_solution_rejects_foreign_file(tmp_path):
    path = tmp_path / "junk.csv"
    path.write_text("j,k,value\n0,0,1.0\n")
    with pytest.raises(ConfigError):
        load_solution(path)


def test_report_dict_json_safe():
    grid = build_grid(12.0, 96, 16, SectorKind.full_disk())
    params = ModelParams(p=4.0, q=1, lam=1.0)
    rep = solve_ground(grid, params, SolveConfig(grad_tol=1e-6, newton_refine=True,
                                                 keep_trace=True))
    payload = report_dict(rep, params)
    text = json.dumps(payload, allow_nan=False)
    back = json.loads(text)
    assert back["converged"] is True
    assert back["energy"]["total"] == rep.energy.total
    assert back["params"]["lambda"] == 1.0
    assert "trace_tail" in back


def test_manifest_contents(tmp_path):
    cfg = parse_config("p = 4.0\n")
    path = tmp_path / "manifest.json"
    write_manifest(path, "solve-ground", cfg, ["a.json", "b.csv"])
    data = json.loads(path.read_text())
    assert data["command"] == "solve-ground"
    assert data["artifact"].startswith("spiralnls")
    assert data["outputs"] == ["a.json", "b.csv"]
    assert data["config"]["p"] == "4.0"


def test_write_json_rejects_nan(tmp_path):
    with pytest.raises(ValueError):
        write_json(tmp_path / "bad.json", {"x": float("nan")})
