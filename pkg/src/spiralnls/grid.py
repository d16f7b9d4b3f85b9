"""Truncated polar grids and the discrete linear operator.

The computational domain is a disk of radius R (or an angular sector of it)
with homogeneous Dirichlet data at r = R.  Radial nodes are staggered,
r_j = (j + 1/2) dr, so no node sits on the coordinate singularity; the radial
part of the operator is the conservative second-order finite-volume stencil

    (L_r u)_j = -[ R_{j+1} (u_{j+1} - u_j) - R_j (u_j - u_{j-1}) ] / (r_j dr^2)

with face radii R_f = f dr.  The inner face R_0 = 0 kills the ghost value, so
the pole needs no special casing.  The angular direction is spectral: a real
Fourier series on the full disk, a DST-I sine series on Dirichlet sectors.
Per angular mode the operator

    -d^2/dr^2 - (1/r) d/dr + (1/lambda^2 + 1/r^2) mu + q

is tridiagonal (mu = m^2 on the disk, mu = (n pi / 2 theta0)^2 on sectors),
which is what makes preconditioned solves cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.fft import dst, idst
from scipy.linalg import solve_banded

from .errors import GridMismatchError

FULL = "full"
HALF = "half"
CONE = "cone"


@dataclass(frozen=True)
class SectorKind:
    """Angular extent of the domain: full disk, half disk, or cone."""

    kind: str
    half_angle: float  # half opening of the theta interval; pi for the full disk

    @staticmethod
    def full_disk() -> "SectorKind":
        return SectorKind(FULL, np.pi)

    @staticmethod
    def half_disk() -> "SectorKind":
        return SectorKind(HALF, np.pi / 2)

    @staticmethod
    def cone(alpha: float) -> "SectorKind":
        if not 0.0 < alpha < np.pi:
            raise ValueError(f"cone half-angle must lie in (0, pi), got {alpha}")
        return SectorKind(CONE, float(alpha))

    @property
    def is_full(self) -> bool:
        return self.kind == FULL

    def label(self) -> str:
        if self.kind == CONE:
            return f"cone:{self.half_angle!r}"
        return self.kind


def sector_from_label(text: str) -> SectorKind:
    text = text.strip()
    if text == FULL:
        return SectorKind.full_disk()
    if text == HALF:
        return SectorKind.half_disk()
    if text.startswith("cone:"):
        return SectorKind.cone(float(text.split(":", 1)[1]))
    raise ValueError(f"unknown sector {text!r}")


@dataclass(frozen=True)
class ModelParams:
    """Equation parameters: exponent p > 2, mass switch q in {0, 1}, pitch lambda > 0."""

    p: float
    q: float
    lam: float

    def __post_init__(self):
        if not self.p > 2:
            raise ValueError(f"p must exceed 2, got {self.p}")
        if self.q not in (0, 1, 0.0, 1.0):
            raise ValueError(f"q must be 0 or 1, got {self.q}")
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")


@dataclass(frozen=True)
class PolarGrid:
    """Staggered polar grid with quadrature weights for integral r dr dtheta."""

    R: float
    nr: int
    ntheta: int
    sector: SectorKind
    radii: np.ndarray      # (nr,) staggered nodes (j + 1/2) dr
    angles: np.ndarray     # (ntheta,) angular nodes, open at Dirichlet rays
    weights: np.ndarray    # (nr, ntheta) quadrature weights r dr dtheta

    @property
    def dr(self) -> float:
        return self.R / self.nr

    @property
    def dtheta(self) -> float:
        if self.sector.is_full:
            return 2 * np.pi / self.ntheta
        return 2 * self.sector.half_angle / (self.ntheta + 1)

    @property
    def face_radii(self) -> np.ndarray:
        return np.arange(self.nr + 1) * self.dr

    def mode_multipliers(self) -> np.ndarray:
        """Squared angular frequencies mu per spectral mode (ascending)."""
        if self.sector.is_full:
            m = np.arange(self.ntheta // 2 + 1)
            return (m * m).astype(float)
        omega = np.arange(1, self.ntheta + 1) * np.pi / (2 * self.sector.half_angle)
        return omega * omega

    def mode_quad_coeffs(self) -> np.ndarray:
        """Coefficients c_m with sum_k u_k v_k dtheta = sum_m c_m Re(U_m conj(V_m))."""
        if self.sector.is_full:
            c = np.full(self.ntheta // 2 + 1, 2.0)
            c[0] = 1.0
            c[-1] = 1.0
            return c * self.dtheta / self.ntheta
        return np.full(self.ntheta, self.dtheta / (2 * (self.ntheta + 1)))

    def to_modes(self, values: np.ndarray) -> np.ndarray:
        """Angular transform: rfft on the full disk, DST-I on sectors."""
        if self.sector.is_full:
            return np.fft.rfft(values, axis=1)
        return dst(values, type=1, axis=1)

    def from_modes(self, modes: np.ndarray) -> np.ndarray:
        if self.sector.is_full:
            return np.fft.irfft(modes, n=self.ntheta, axis=1)
        return idst(modes, type=1, axis=1)

    def quad(self, samples: np.ndarray) -> float:
        """Quadrature of point samples against the r dr dtheta measure."""
        return float(np.sum(self.weights * samples))


@dataclass(frozen=True)
class Field:
    """Real samples on a polar grid, indexed (radial j, angular k)."""

    grid: PolarGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.nr, self.grid.ntheta):
            raise GridMismatchError(
                f"values shape {self.values.shape} does not match grid "
                f"({self.grid.nr}, {self.grid.ntheta})"
            )

    def is_radial(self, tol: float = 0.0) -> bool:
        """True when the angular variance vanishes at every radius."""
        spread = np.ptp(self.values, axis=1)
        scale = np.max(np.abs(self.values), initial=0.0)
        return bool(np.all(spread <= tol * max(scale, 1.0)))

    def linf(self) -> float:
        return float(np.max(np.abs(self.values)))


def build_grid(R: float, nr: int, ntheta: int, sector: SectorKind) -> PolarGrid:
    """Construct a staggered polar grid with midpoint-in-r, uniform-in-theta nodes.

    The angular nodes exclude Dirichlet rays on sectors; on the full disk the
    node count must be even so real Fourier modes pair up.  Quadrature of the
    constant 1 over the full disk reproduces pi R^2 exactly (midpoint rule is
    exact for the linear integrand r).
    """
    if not R > 0:
        raise ValueError(f"truncation radius must be positive, got {R}")
    if nr < 2:
        raise ValueError(f"need at least 2 radial nodes, got {nr}")
    if ntheta < 2:
        raise ValueError(f"need at least 2 angular nodes, got {ntheta}")
    if sector.is_full and ntheta % 2 != 0:
        raise ValueError("ntheta must be even on the full disk")

    dr = R / nr
    radii = (np.arange(nr) + 0.5) * dr
    if sector.is_full:
        dtheta = 2 * np.pi / ntheta
        angles = -np.pi + dtheta * np.arange(ntheta)
    else:
        theta0 = sector.half_angle
        dtheta = 2 * theta0 / (ntheta + 1)
        angles = -theta0 + dtheta * np.arange(1, ntheta + 1)
    weights = np.outer(radii * dr, np.full(ntheta, dtheta))
    for arr in (radii, angles, weights):
        arr.setflags(write=False)
    return PolarGrid(float(R), int(nr), int(ntheta), sector, radii, angles, weights)


def field_from_polar(grid: PolarGrid, fn) -> Field:
    """Sample fn(r, theta) on the grid nodes."""
    rr, tt = np.meshgrid(grid.radii, grid.angles, indexing="ij")
    return Field(grid, np.asarray(fn(rr, tt), dtype=float))


def zero_field(grid: PolarGrid) -> Field:
    return Field(grid, np.zeros((grid.nr, grid.ntheta)))


def check_same_grid(u: Field, v: Field) -> None:
    if u.grid is v.grid:
        return
    a, b = u.grid, v.grid
    if (a.R, a.nr, a.ntheta, a.sector) != (b.R, b.nr, b.ntheta, b.sector):
        raise GridMismatchError("fields live on different grids")


def operator_bands(grid: PolarGrid, params: ModelParams) -> np.ndarray:
    """Tridiagonal radial operator per angular mode, stacked mode-major.

    Returns a (3, nmodes * nr) array in solve_banded layout for the operator
    -d2/dr2 - (1/r) d/dr + (1/lam^2 + 1/r^2) mu + q with Dirichlet closure at
    r = R (ghost value -u_last, i.e. the midpoint boundary condition).
    """
    r = grid.radii
    dr = grid.dr
    faces = grid.face_radii
    mu = grid.mode_multipliers()
    nm, nr = mu.size, grid.nr

    lower = -faces[1:-1] / (r[1:] * dr * dr)            # coupling to j-1
    upper = -faces[1:-1] / (r[:-1] * dr * dr)           # coupling to j+1
    diag_r = (faces[:-1] + faces[1:]) / (r * dr * dr)
    diag_r = diag_r.copy()
    # Dirichlet at r = R: ghost = -u_last turns the outer face flux R(u_ghost - u)
    # into -2R u, one extra R beyond the regular face already in the base diagonal
    diag_r[-1] += faces[-1] / (r[-1] * dr * dr)

    coef = 1.0 / params.lam**2 + 1.0 / r**2             # (nr,)
    diag = diag_r[None, :] + mu[:, None] * coef[None, :] + params.q

    ab = np.zeros((3, nm * nr))
    ab[1] = diag.ravel()
    up = np.zeros((nm, nr))
    up[:, 1:] = upper
    lo = np.zeros((nm, nr))
    lo[:, :-1] = lower
    # solve_banded layout: ab[0, j] = A[j-1, j], ab[2, j] = A[j+1, j]
    ab[0] = up.ravel()
    ab[2] = lo.ravel()
    return ab


def apply_operator(u: Field, params: ModelParams) -> Field:
    """Apply the linear part L = -Laplacian - (1/lam^2) d_theta^2 + q per mode."""
    grid = u.grid
    modes = grid.to_modes(u.values)               # (nr, nmodes)
    r = grid.radii
    dr = grid.dr
    faces = grid.face_radii
    mu = grid.mode_multipliers()

    # radial part, same stencil for every mode
    flux = np.zeros((grid.nr + 1, modes.shape[1]), dtype=modes.dtype)
    flux[1:-1] = faces[1:-1, None] * (modes[1:] - modes[:-1]) / dr
    flux[-1] = faces[-1] * (-2.0 * modes[-1]) / dr          # ghost = -u_last
    out = -(flux[1:] - flux[:-1]) / (r[:, None] * dr)
    coef = 1.0 / params.lam**2 + 1.0 / r**2
    out += (coef[:, None] * mu[None, :]) * modes
    out += params.q * modes
    result = grid.from_modes(out)
    if not np.all(np.isfinite(result)):
        raise FloatingPointError("operator application produced non-finite values")
    return Field(grid, result)


def solve_operator(grid: PolarGrid, params: ModelParams, rhs_values: np.ndarray) -> np.ndarray:
    """Solve L u = rhs (physical-space samples) via per-mode tridiagonal solves."""
    modes = grid.to_modes(rhs_values)             # (nr, nmodes)
    ab = operator_bands(grid, params)
    nm = modes.shape[1]
    stacked = np.ascontiguousarray(modes.T).reshape(nm * grid.nr)
    if np.iscomplexobj(stacked):
        b = np.column_stack([stacked.real, stacked.imag])
        x = solve_banded((1, 1), ab, b)
        sol = (x[:, 0] + 1j * x[:, 1]).reshape(nm, grid.nr).T
    else:
        sol = solve_banded((1, 1), ab, stacked).reshape(nm, grid.nr).T
    out = grid.from_modes(sol)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("per-mode tridiagonal solve produced non-finite values")
    return out


def apply_angular_derivative(u: Field) -> Field:
    """Spectral d/dtheta: Fourier multiplier i m on the disk, cosine series on sectors.

    On the full disk the Nyquist mode is dropped (standard real-derivative
    convention); quadratic forms elsewhere use the m^2 multiplier directly and
    keep it.
    """
    grid = u.grid
    if grid.sector.is_full:
        modes = np.fft.rfft(u.values, axis=1)
        m = np.arange(modes.shape[1])
        modes *= 1j * m
        modes[:, -1] = 0.0
        return Field(grid, np.fft.irfft(modes, n=grid.ntheta, axis=1))
    n = grid.ntheta
    theta0 = grid.sector.half_angle
    coeff = dst(u.values, type=1, axis=1) / (n + 1)   # sine coefficients b_n
    omega = np.arange(1, n + 1) * np.pi / (2 * theta0)
    shifted = grid.angles + theta0                    # in (0, 2 theta0)
    cosmat = np.cos(np.outer(omega, shifted))         # (modes, nodes)
    return Field(grid, (coeff * omega) @ cosmat)
