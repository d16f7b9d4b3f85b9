import numpy as np
import pytest

from spiralnls.energy import energy, gradient, lambda_inner, lambda_norm
from spiralnls.errors import OnePhaseMissing, ZeroFieldError
from spiralnls.grid import Field, ModelParams, SectorKind, build_grid, field_from_polar
from spiralnls.minimize import (
    SEED_CUSTOM,
    SEED_DIPOLE,
    SEED_RADIAL,
    SEED_RADIAL_NODAL,
    SolveConfig,
    newton_refine,
    solve_ground,
    solve_nodal,
)
from spiralnls.radial import limit_levels, shoot_ground

GRID = build_grid(20.0, 256, 32, SectorKind.full_disk())
HALF = build_grid(20.0, 256, 32, SectorKind.half_disk())


@pytest.fixture(scope="module")
def ground_run():
    params = ModelParams(p=4.0, q=1, lam=1.0)
    cfg = SolveConfig(grad_tol=1e-8, newton_refine=True, keep_trace=True)
    return solve_ground(GRID, params, cfg), params, cfg


@pytest.fixture(scope="module")
def nodal_run():
    params = ModelParams(p=4.0, q=1, lam=0.1)
    cfg = SolveConfig(seed_kind=SEED_DIPOLE, grad_tol=1e-7, newton_refine=True)
    return solve_nodal(GRID, params, cfg), params


def test_ground_converges_radial(ground_run):
    report, params, cfg = ground_run
    assert report.converged
    assert report.nonradiality < 1e-8
    oracle = shoot_ground(4.0)
    assert abs(report.energy.total - oracle.energy) / oracle.energy < 0.005


def test_ground_positive(ground_run):
    report, _, _ = ground_run
    assert np.min(report.field.values) >= -1e-8 * report.linf


def test_ground_criticality_weak_form(ground_run, rng):
    report, params, cfg = ground_run
    u = report.field
    for _ in range(50):
        v = Field(GRID, rng.standard_normal((GRID.nr, GRID.ntheta)))
        vn = Field(GRID, v.values / lambda_norm(v, params))
        res = lambda_inner(gradient(u, params), vn, params)
        assert abs(res) < 10 * cfg.grad_tol


def test_ground_nehari_residual(ground_run):
    report, _, cfg = ground_run
    assert abs(report.nehari.single) <= 10 * cfg.grad_tol


def test_ground_descent_monotone(ground_run):
    report, params, _ = ground_run
    energies = [row[1] for row in report.trace]
    slack = 1e-12 * (1 + abs(energies[0]))
    assert all(b <= a + slack for a, b in zip(energies, energies[1:]))


def test_ground_lambda_independence():
    cfg = SolveConfig(grad_tol=1e-8, newton_refine=True)
    totals = []
    for lam in (0.5, 1.0, 2.0):
        rep = solve_ground(GRID, ModelParams(p=4.0, q=1, lam=lam), cfg)
        assert rep.converged
        totals.append(rep.energy.total)
    spread = max(totals) - min(totals)
    assert spread <= 1e-8 * abs(totals[0])


def test_sector_level_monotone_in_lambda():
    cfg = SolveConfig(grad_tol=1e-8, newton_refine=True)
    c1 = solve_ground(HALF, ModelParams(p=4.0, q=1, lam=1.0), cfg).energy.total
    c2 = solve_ground(HALF, ModelParams(p=4.0, q=1, lam=2.0), cfg).energy.total
    assert c1 >= c2


def test_nodal_small_pitch_both_seeds_radial(nodal_run):
    report_dip, params = nodal_run
    cfg = SolveConfig(seed_kind=SEED_RADIAL_NODAL, grad_tol=1e-7, newton_refine=True)
    report_rad = solve_nodal(GRID, params, cfg)
    for rep in (report_dip, report_rad):
        assert rep.converged
        assert rep.nonradiality < 1e-6
    _, nodal_energy, _ = limit_levels(4.0)
    assert abs(report_rad.energy.total - nodal_energy) / nodal_energy < 0.01
    assert abs(report_dip.energy.total - report_rad.energy.total) \
        <= 1e-6 * abs(report_rad.energy.total)


def test_nodal_large_pitch_below_radial_branch():
    params = ModelParams(p=4.0, q=1, lam=50.0)
    cfg = SolveConfig(seed_kind=SEED_DIPOLE, grad_tol=1e-7, newton_refine=True)
    rep = solve_nodal(GRID, params, cfg)
    assert rep.converged
    c_inf, _, eps_star = limit_levels(4.0)
    assert rep.energy.total < 2 * c_inf + eps_star
    assert rep.nehari.plus == pytest.approx(0.0, abs=1e-10)


def test_level_ordering_beta_vs_alpha(ground_run, nodal_run):
    ground, params, _ = ground_run
    nodal, _ = nodal_run
    assert nodal.energy.total >= 2 * ground.energy.total - 1e-6


def test_sector_large_pitch_energy_near_free_level():
    # half disk at lam = 40, R = 40: level within 2% of the free-plane ground
    grid = build_grid(40.0, 512, 96, SectorKind.half_disk())
    params = ModelParams(p=4.0, q=1, lam=40.0)
    rep = solve_ground(grid, params, SolveConfig(grad_tol=1e-8, newton_refine=True))
    assert rep.converged
    oracle = shoot_ground(4.0)
    assert abs(rep.energy.total - oracle.energy) / oracle.energy < 0.02


def test_nodal_requires_full_disk():
    with pytest.raises(ValueError):
        solve_nodal(HALF, ModelParams(p=4.0, q=1, lam=1.0))


def test_nodal_rejects_one_signed_seed():
    seed = field_from_polar(GRID, lambda r, t: np.exp(-r) + 0 * t)
    cfg = SolveConfig(seed_kind=SEED_CUSTOM, seed_field=seed)
    with pytest.raises(OnePhaseMissing):
        solve_nodal(GRID, ModelParams(p=4.0, q=1, lam=1.0), cfg)


def test_max_iters_returns_best_iterate():
    cfg = SolveConfig(max_iters=3, grad_tol=1e-12)
    rep = solve_ground(GRID, ModelParams(p=4.0, q=1, lam=1.0), cfg)
    assert not rep.converged
    assert rep.iterations == 3
    assert np.all(np.isfinite(rep.field.values))


def test_newton_refine_fixed_point(ground_run):
    report, params, cfg = ground_run
    refined = newton_refine(report.field, params, tol=cfg.grad_tol)
    gn_in = lambda_norm(gradient(report.field, params), params)
    gn_out = lambda_norm(gradient(refined, params), params)
    assert gn_out <= gn_in * (1 + 1e-12)


def test_newton_refine_quadratic_polish():
    params = ModelParams(p=4.0, q=1, lam=1.0)
    rough = solve_ground(GRID, params, SolveConfig(grad_tol=1e-6, newton_refine=False))
    assert rough.converged
    refined = newton_refine(rough.field, params, tol=1e-12)
    gn = lambda_norm(gradient(refined, params), params)
    assert gn < 1e-12


def test_newton_refine_rejects_zero(params_q1, small_disk):
    z = Field(small_disk, np.zeros((small_disk.nr, small_disk.ntheta)))
    with pytest.raises(ZeroFieldError):
        newton_refine(z, params_q1, tol=1e-10)


def test_newton_refine_rejects_far_field(params_q1, small_disk, rng):
    u = Field(small_disk, 5.0 * rng.standard_normal((small_disk.nr, small_disk.ntheta)))
    with pytest.raises(ValueError):
        newton_refine(u, params_q1, tol=1e-10)


def test_deterministic_reports():
    params = ModelParams(p=4.0, q=1, lam=1.3)
    cfg = SolveConfig(grad_tol=1e-7, newton_refine=True)
    a = solve_ground(GRID, params, cfg)
    b = solve_ground(GRID, params, cfg)
    assert np.array_equal(a.field.values, b.field.values)
    assert a.energy.total == b.energy.total
    assert a.iterations == b.iterations


def test_invalid_solve_config():
    with pytest.raises(ValueError):
        SolveConfig(grad_tol=0.0)
    with pytest.raises(ValueError):
        SolveConfig(step=1.5)
