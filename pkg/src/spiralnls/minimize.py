"""Least-energy solves by Nehari-projected preconditioned descent.

Ground states (positive, level alpha on the disk / c_lambda on sectors)
descend along the pitch-metric gradient and re-project onto the Nehari set
after every step; sign-changing solves (level beta) re-project both signed
parts.  Backtracking halves the step whenever the projected energy rises and
doubles it after five consecutive accepts, clamped to [1e-4, 1].  The descent
tolerance can hand over to a Newton polish of the full Euler-Lagrange system,
solved matrix-free with the per-mode operator as preconditioner; that is what
makes tight tolerances affordable when the energy landscape is flat (large
pitch, translating bump).

The exact flow preserves the symmetries of its seed: a radial seed stays
radial, a reflection-even seed stays even in theta.  Runs started from such
seeds re-impose the symmetry on each iterate, which costs nothing in exact
arithmetic but deletes round-off excitation of the broken modes.  For the
radial seed this keeps the radial branch of the nodal problem computable on
its own; for even seeds it removes the rotational null direction that
otherwise stalls the Newton polish on the full disk.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.sparse.linalg import LinearOperator, gmres

from .diagnostics import nonradiality_index
from .energy import (
    EnergyBreakdown,
    energy,
    gradient,
    h1_norm_sq,
    lambda_norm,
    lp_integral,
)
from .errors import OnePhaseMissing, SeedCollapsed, ZeroFieldError
from .grid import Field, ModelParams, PolarGrid, solve_operator
from .nehari import NehariResidual, manifold_residual, nehari_scale, project_nodal
from .radial import shoot_nodal

log = logging.getLogger(__name__)

STEP_MIN = 1e-4
STEP_MAX = 1.0

SEED_RADIAL = "radial"
SEED_DIPOLE = "dipole"
SEED_RADIAL_NODAL = "radial-nodal"
SEED_CUSTOM = "custom"


@dataclass(frozen=True)
class SolveConfig:
    max_iters: int = 2000
    grad_tol: float = 1e-8
    step: float = 1.0
    seed_kind: str = SEED_RADIAL
    seed_field: Optional[Field] = None
    newton_refine: bool = False
    keep_trace: bool = False

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if not 0 < self.step <= 1:
            raise ValueError("step must lie in (0, 1]")


@dataclass
class SolveReport:
    field: Field
    energy: EnergyBreakdown
    nehari: NehariResidual
    linf: float
    h1: float
    lnorm: float
    lp: float
    iterations: int
    converged: bool
    nonradiality: float
    trace: Optional[list] = dc_field(default=None)


def _reflect_index(grid: PolarGrid) -> np.ndarray:
    """Node permutation realizing theta -> -theta exactly on the grid."""
    n = grid.ntheta
    if grid.sector.is_full:
        return (n - np.arange(n)) % n
    return n - 1 - np.arange(n)


def _evenized(grid: PolarGrid, vals: np.ndarray) -> np.ndarray:
    """Bit-exact reflection symmetrization (trig sampling alone is not)."""
    return 0.5 * (vals + vals[:, _reflect_index(grid)])


def make_seed(grid: PolarGrid, params: ModelParams, kind: str,
              custom: Optional[Field] = None) -> Field:
    """Starting fields for the two candidate symmetry classes.

    radial        positive bump (disk) / lowest-angular-mode bump (sector)
    dipole        w(r) cos(theta) with w a positive bump, disk only
    radial-nodal  the 1D oracle's one-node profile interpolated onto the disk

    Built-in seeds are exactly reflection-even so the solver can lock the
    symmetry class.
    """
    if kind == SEED_CUSTOM:
        if custom is None:
            raise ValueError("custom seed requires a field")
        return custom
    r = grid.radii[:, None]
    th = grid.angles[None, :]
    if kind == SEED_RADIAL:
        if grid.sector.is_full:
            vals = 2.0 * np.exp(-0.5 * r**2) * np.ones_like(th)
        else:
            # center tracks the expected peak: ~2 lam under concentration,
            # ~log(lam) when the bump migrates outward at large pitch
            if params.lam <= 1.0:
                center, width = 2.0 * params.lam, params.lam
                amp = 2.0 * params.lam ** (-2.0 / (params.p - 2.0))
            else:
                center, width = max(2.0, math.log(params.lam)), 1.0
                amp = 2.0
            center = min(center, 0.75 * grid.R)
            theta0 = grid.sector.half_angle
            lowest = np.sin(np.pi * (th + theta0) / (2 * theta0))
            vals = _evenized(grid, amp * np.exp(-0.5 * ((r - center) / width) ** 2) * lowest)
        return Field(grid, vals)
    if kind == SEED_DIPOLE:
        vals = _evenized(grid, 2.0 * r * np.exp(-0.5 * (r - 2.0) ** 2) * np.cos(th))
        return Field(grid, vals)
    if kind == SEED_RADIAL_NODAL:
        profile = shoot_nodal(params.p, 1)
        vals = profile(grid.radii)[:, None] * np.ones_like(th)
        return Field(grid, vals)
    raise ValueError(f"unknown seed kind {kind!r}")


def _constraint_for(seed: Field):
    """Symmetry projector preserved by the flow, inferred from the seed.

    Returns a values -> values map: angular mean for radial seeds, reflection
    symmetrization for theta-even seeds, identity otherwise.
    """
    grid = seed.grid
    ntheta = grid.ntheta
    reflect = _reflect_index(grid)

    if seed.is_radial():
        def radial_mean(values):
            return values.mean(axis=1, keepdims=True) * np.ones((1, ntheta))
        return radial_mean
    if np.array_equal(seed.values, seed.values[:, reflect]):
        def evenize(values):
            return 0.5 * (values + values[:, reflect])
        return evenize
    return None


def _descend(u: Field, params: ModelParams, cfg: SolveConfig, project, tol: float,
             trace: Optional[list], constrain):
    """Projected gradient descent with the spec'd backtracking policy."""
    eng = energy(u, params)
    step = cfg.step
    accepts_in_row = 0
    iterations = 0
    gn = math.inf
    for iterations in range(1, cfg.max_iters + 1):
        g = gradient(u, params)
        gn = lambda_norm(g, params)
        if trace is not None:
            trace.append((iterations, eng.total, gn))
        if gn <= tol:
            return u, eng, gn, iterations, True
        while True:
            trial_vals = u.values - step * g.values
            if constrain is not None:
                trial_vals = constrain(trial_vals)
            trial = Field(u.grid, trial_vals)
            if lp_integral(trial, params.p) == 0.0:
                raise SeedCollapsed("descent iterate vanished")
            trial = project(trial)
            trial_eng = energy(trial, params)
            if trial_eng.total <= eng.total + 1e-12 * (1.0 + abs(eng.total)):
                break
            if step <= STEP_MIN:
                # flat to round-off; nothing left for first-order steps
                return u, eng, gn, iterations, gn <= tol
            step = max(step / 2.0, STEP_MIN)
            accepts_in_row = 0
        u, eng = trial, trial_eng
        accepts_in_row += 1
        if accepts_in_row >= 5:
            step = min(step * 2.0, STEP_MAX)
            accepts_in_row = 0
    return u, eng, gn, iterations, gn <= tol


def _newton_polish(u: Field, params: ModelParams, tol: float, max_solves: int = 40,
                   constrain=None, project=None):
    """Newton polish of E'(u) = 0 along the manifold's energy valley.

    Solves ((1 + mu) I - L^{-1} D) delta = -g, D = (p-1)|u|^{p-2}, matrix-free
    with GMRES.  The candidate step is chosen by line-searching the PROJECTED
    energy along delta: soft valley directions (the translating bump at large
    pitch) curve in function space, so the raw residual can transiently grow
    along a productive step while the constrained energy keeps falling.  Once
    energy differences sink below round-off the residual itself decides, which
    is where quadratic convergence takes over.  mu grows only when a step
    fails both tests.  Returns (field, residual_norm, succeeded, solves).
    """
    grid = u.grid
    n = grid.nr * grid.ntheta
    if project is None:
        def project(v):
            return v
    u = project(u)
    g = gradient(u, params)
    gn = lambda_norm(g, params)
    e_now = energy(u, params).total
    mu = 0.0
    fails_here = 0
    solves = 0
    while solves < max_solves:
        if gn <= tol:
            return u, gn, True, solves
        weight = (params.p - 1.0) * np.abs(u.values) ** (params.p - 2.0)
        shift = 1.0 + mu

        def matvec(x):
            vals = x.reshape(grid.nr, grid.ntheta)
            out = shift * vals - solve_operator(grid, params, weight * vals)
            return out.ravel()

        op = LinearOperator((n, n), matvec=matvec)
        rhs = -g.values.ravel()
        rtol = min(0.1, max(1e-10, 0.01 * gn))
        delta, info = gmres(op, rhs, rtol=rtol, atol=0.0, restart=80, maxiter=600)
        solves += 1
        if not np.all(np.isfinite(delta)):
            log.warning("newton linear solve produced non-finite step")
            return u, gn, False, solves
        dvals = delta.reshape(grid.nr, grid.ntheta)

        candidates = []
        for t in (2.0, 1.5, 1.0, 0.75, 0.5, 0.25, 0.1):
            cand_vals = u.values + t * dvals
            if constrain is not None:
                cand_vals = constrain(cand_vals)
            try:
                cand = project(Field(grid, cand_vals))
            except (OnePhaseMissing, ZeroFieldError):
                continue
            candidates.append((energy(cand, params).total, cand))
        noise = 1e-13 * (1.0 + abs(e_now))
        by_energy = min(candidates, key=lambda c: c[0]) if candidates else None
        accepted = None
        if by_energy is not None and by_energy[0] < e_now - noise:
            accepted = by_energy
        else:
            # energy flat to round-off: fall back to residual decrease
            best_gn, best = gn, None
            for e_c, cand in candidates:
                gn_c = lambda_norm(gradient(cand, params), params)
                if gn_c < best_gn:
                    best_gn, best = gn_c, (e_c, cand)
            if best is not None:
                accepted = best
        if accepted is not None:
            e_now, u = accepted
            g = gradient(u, params)
            gn = lambda_norm(g, params)
            mu = 0.0 if mu < 1e-8 else mu * 0.25
            fails_here = 0
        else:
            mu = max(4.0 * mu, 1e-4)
            fails_here += 1
            if fails_here > 8:
                log.warning("newton stalled at residual %.3e (gmres info=%s)", gn, info)
                return u, gn, False, solves
    return u, gn, gn <= tol, solves


def newton_refine(u: Field, params: ModelParams, tol: float) -> Field:
    """Polish a near-critical field to residual < tol; returns input on stall.

    Requires the pitch-metric gradient already small (descent output); an
    indefinite-Hessian stall at sign-changing saddles is logged, not raised,
    since criticality rather than minimality is the target there.
    """
    norm = lambda_norm(u, params)
    if norm == 0.0:
        raise ZeroFieldError("newton_refine needs a nontrivial field")
    gn = lambda_norm(gradient(u, params), params)
    if gn > 1e-3 * (1.0 + norm):
        raise ValueError(f"not near a critical point: |grad| = {gn:.3e}")
    refined, _, ok, _ = _newton_polish(u, params, tol)
    if not ok:
        log.warning("newton_refine returned the best iterate without reaching %.1e", tol)
    return refined


def _finalize(u, eng, gn, iterations, converged, params, trace) -> SolveReport:
    return SolveReport(
        field=u,
        energy=eng,
        nehari=manifold_residual(u, params),
        linf=u.linf(),
        h1=math.sqrt(h1_norm_sq(u)),
        lnorm=math.sqrt(eng.norm_sq()),
        lp=lp_integral(u, params.p) ** (1.0 / params.p),
        iterations=iterations,
        converged=bool(converged),
        nonradiality=nonradiality_index(u, params),
        trace=trace,
    )


def _run(seed: Field, params: ModelParams, cfg: SolveConfig, project) -> SolveReport:
    trace = [] if cfg.keep_trace else None
    constrain = _constraint_for(seed)
    u = project(seed)

    switch_tol = cfg.grad_tol
    pre_cfg = cfg
    if cfg.newton_refine:
        # hand over to Newton once the iterate is merely in the neighborhood;
        # the energy line search makes the polish robust from moderate range
        switch_tol = max(cfg.grad_tol, 1e-4 * (1.0 + lambda_norm(u, params)))
        if cfg.max_iters > 300:
            pre_cfg = SolveConfig(max_iters=300, grad_tol=cfg.grad_tol,
                                  step=cfg.step, seed_kind=cfg.seed_kind,
                                  newton_refine=True, keep_trace=cfg.keep_trace)
    u, eng, gn, iters, converged = _descend(u, params, pre_cfg, project, switch_tol,
                                            trace, constrain)
    if cfg.newton_refine and gn > cfg.grad_tol:
        u, gn, ok, nsteps = _newton_polish(u, params, cfg.grad_tol,
                                           constrain=constrain, project=project)
        iters += nsteps
        eng = energy(u, params)
        converged = gn <= cfg.grad_tol
        if not ok and iters < cfg.max_iters:
            # stall: fall back to first-order steps for the remaining budget
            rem = SolveConfig(max_iters=cfg.max_iters - iters, grad_tol=cfg.grad_tol,
                              step=min(0.1, cfg.step), seed_kind=cfg.seed_kind,
                              newton_refine=False, keep_trace=False)
            u, eng, gn, extra, converged = _descend(u, params, rem, project,
                                                    cfg.grad_tol, trace, constrain)
            iters += extra
            if converged:
                eng = energy(u, params)
    return _finalize(u, eng, gn, iters, converged, params, trace)


def solve_ground(grid: PolarGrid, params: ModelParams, cfg: SolveConfig | None = None
                 ) -> SolveReport:
    """Least-energy positive solution: alpha level (disk) or c_lambda (sector)."""
    cfg = cfg or SolveConfig()
    seed = make_seed(grid, params, cfg.seed_kind, cfg.seed_field)
    if np.any(seed.values < 0) and cfg.seed_kind != SEED_CUSTOM:
        raise ValueError("ground solve needs a nonnegative seed")

    def project(v: Field) -> Field:
        return Field(grid, nehari_scale(v, params) * v.values)

    return _run(seed, params, cfg, project)


def solve_nodal(grid: PolarGrid, params: ModelParams, cfg: SolveConfig | None = None,
                max_restarts: int = 3) -> SolveReport:
    """Least-energy sign-changing solution on the full disk (beta level)."""
    cfg = cfg or SolveConfig(seed_kind=SEED_DIPOLE)
    if not grid.sector.is_full:
        raise ValueError("nodal solves run on the full disk")
    seed = make_seed(grid, params, cfg.seed_kind, cfg.seed_field)
    if not (np.any(seed.values > 0) and np.any(seed.values < 0)):
        raise OnePhaseMissing("nodal solve needs a sign-changing seed")

    def project(v: Field) -> Field:
        return project_nodal(v, params)

    rng_shift = 0
    while True:
        try:
            return _run(seed, params, cfg, project)
        except OnePhaseMissing:
            rng_shift += 1
            if rng_shift > max_restarts:
                raise
            log.warning("iterate lost one sign; restarting with a mixed seed (%d)",
                        rng_shift)
            other = SEED_RADIAL_NODAL if cfg.seed_kind == SEED_DIPOLE else SEED_DIPOLE
            mix = make_seed(grid, params, other)
            seed = Field(grid, seed.values + 0.5 * rng_shift * mix.values)
