"""Inner products, energy functionals, and the preconditioned gradient.

The pitch-weighted inner product

    <u, v> = integral( grad u . grad v + (1/lam^2) d_theta u d_theta v + q u v )

is evaluated as the quadratic form of the discrete operator: per angular mode
the Dirichlet part is the face sum  sum_f R_f dr (du/dr)(dv/dr)  plus the
boundary penalty from the r = R closure, the centrifugal and angular pieces
are exact Parseval sums, and the mass term is a plain mode sum.  Defining the
form this way (rather than by independent first-derivative stencils) makes the
gradient identity  <gradient(u), v> = E'(u) v  and the Nehari algebra exact at
the discrete level; agreement with first-difference quadrature is a separate
O(dr^2) consistency check in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Field, ModelParams, PolarGrid, check_same_grid, solve_operator


@dataclass(frozen=True)
class EnergyBreakdown:
    """Pieces of E = (dirichlet + angular + mass)/2 - potential."""

    dirichlet: float   # integral |grad u|^2
    angular: float     # (1/lam^2) integral |d_theta u|^2
    mass: float        # q integral u^2
    potential: float   # (1/p) integral |u|^p
    total: float

    def norm_sq(self) -> float:
        """Squared pitch-weighted norm ||u||^2_{lam,q}."""
        return self.dirichlet + self.angular + self.mass


def _raw_forms(grid: PolarGrid, U: np.ndarray, V: np.ndarray):
    """Bilinear building blocks from mode arrays (nr, nmodes).

    Returns (dirichlet, angular2, mass2) with angular2 = integral of
    d_theta u d_theta v and mass2 = integral of u v, both unscaled.
    """
    r = grid.radii
    dr = grid.dr
    faces = grid.face_radii
    mu = grid.mode_multipliers()
    cm = grid.mode_quad_coeffs()
    wr = r * dr

    prod_faces = np.real(np.conj(U[1:] - U[:-1]) * (V[1:] - V[:-1]))  # (nr-1, nm)
    grad_r = (faces[1:-1, None] / dr) * prod_faces
    # Dirichlet boundary: ghost = -u_last adds 2 R u_last v_last / dr
    bnd = 2 * faces[-1] / dr * np.real(np.conj(U[-1]) * V[-1])
    prod_nodes = np.real(np.conj(U) * V)                              # (nr, nm)
    centrifugal = (mu[None, :] / r[:, None]) * dr * prod_nodes
    dirichlet = float(cm @ (grad_r.sum(axis=0) + bnd + centrifugal.sum(axis=0)))

    angular2 = float(cm @ (mu[None, :] * wr[:, None] * prod_nodes).sum(axis=0))
    mass2 = float(cm @ (wr[:, None] * prod_nodes).sum(axis=0))
    return dirichlet, angular2, mass2


def _pieces(u: Field, v: Field, params: ModelParams):
    U = u.grid.to_modes(u.values)
    V = v.grid.to_modes(v.values)
    d, a2, m2 = _raw_forms(u.grid, U, V)
    return d, a2 / params.lam**2, params.q * m2


def lambda_inner(u: Field, v: Field, params: ModelParams) -> float:
    """Pitch-weighted scalar product <u, v>_{lam,q}; symmetric and bilinear."""
    check_same_grid(u, v)
    d, a, m = _pieces(u, v, params)
    return d + a + m


def lambda_norm(u: Field, params: ModelParams) -> float:
    return float(np.sqrt(max(lambda_inner(u, u, params), 0.0)))


def lp_integral(u: Field, p: float) -> float:
    """integral |u|^p by grid quadrature."""
    return u.grid.quad(np.abs(u.values) ** p)


def h1_norm_sq(u: Field) -> float:
    """Plain H^1 norm squared (Dirichlet energy + full mass term)."""
    U = u.grid.to_modes(u.values)
    d, _, m2 = _raw_forms(u.grid, U, U)
    return d + m2


def energy(u: Field, params: ModelParams) -> EnergyBreakdown:
    """Energy breakdown for E(u) = 0.5 ||u||^2_{lam,q} - (1/p) |u|_p^p."""
    if not np.all(np.isfinite(u.values)):
        raise FloatingPointError("field has non-finite values")
    d, a, m = _pieces(u, u, params)
    pot = lp_integral(u, params.p) / params.p
    total = 0.5 * (d + a + m) - pot
    return EnergyBreakdown(d, a, m, pot, total)


def nonlinearity(values: np.ndarray, p: float) -> np.ndarray:
    """|u|^{p-2} u, valid for non-integer p."""
    return np.sign(values) * np.abs(values) ** (p - 1.0)


def gradient(u: Field, params: ModelParams) -> Field:
    """Riesz representative of E'(u) in the pitch metric.

    Solves <g, v> = E'(u) v for all v, i.e. g = u - L^{-1}(|u|^{p-2} u),
    via per-mode tridiagonal solves.
    """
    rhs = nonlinearity(u.values, params.p)
    sol = solve_operator(u.grid, params, rhs)
    return Field(u.grid, u.values - sol)


def directional_derivative(u: Field, v: Field, params: ModelParams) -> float:
    """E'(u) v evaluated directly from the weak form."""
    check_same_grid(u, v)
    inner = lambda_inner(u, v, params)
    return inner - u.grid.quad(nonlinearity(u.values, params.p) * v.values)


def h1_fd_norm_sq(u: Field, include_boundary: bool = False) -> float:
    """Independent H^1 check: first-difference stencils in both directions.

    Interior faces only by default; serves as the O(dr^2) cross-check of the
    operator-based forms, and as the metric for recentred profile distances
    where the comparison field need not satisfy the sector's boundary
    conditions.
    """
    g = u.grid
    vals = u.values
    dr, dth = g.dr, g.dtheta
    faces = g.face_radii
    rad = np.sum(faces[1:-1, None] * (vals[1:] - vals[:-1]) ** 2) / dr
    if include_boundary:
        rad += 2 * faces[-1] / dr * np.sum(vals[-1] ** 2)
    if g.sector.is_full:
        dth_vals = np.diff(np.concatenate([vals, vals[:, :1]], axis=1), axis=1)
    else:
        dth_vals = np.diff(vals, axis=1)
    ang = np.sum((dth_vals**2 / g.radii[:, None]) * dr) / dth
    mass = g.quad(vals**2)
    return float(rad * dth + ang + mass)
