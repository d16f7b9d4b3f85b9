"""Screw-invariant 3D reconstruction and legacy VTK volume export.

A planar profile u(r, theta) generates the spiraling field
v(r, phi, t) = u(r, phi - t/lambda), invariant under
(x, t) -> (R_omega x, t + lambda omega) and 2 pi lambda - periodic in t.
Sector solutions are first extended to the full circle by odd reflection
across the rays; the half-disk sine nodes interleave exactly with a uniform
full-circle grid, so the extension is sample-exact and the only
interpolation anywhere is radial (cubic, per Fourier mode).  The nodal set
of an odd-extended solution contains the helicoid traced by the rotating
zero rays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import SectorError
from .grid import Field, ModelParams

_HEADER = "# vtk DataFile Version 3.0"


@dataclass(frozen=True)
class SpiralField3D:
    """v(x1, x2, t) sampled on a regular lattice covering one turn period."""

    nx: int
    ny: int
    nt: int
    origin: tuple
    spacing: tuple
    values: np.ndarray   # (nx, ny, nt)
    lam: float


class SpiralEvaluator:
    """Pointwise evaluator of the screw-invariant field built from a solution.

    Full-disk fields use their Fourier modes directly; half-disk fields are
    odd-reflected into full-circle Fourier modes first.  Evaluation at
    (x1, x2, t) rotates by the phase factor e^{-i m t / lambda} per mode.
    """

    def __init__(self, u: Field, params: ModelParams):
        grid = u.grid
        self.lam = params.lam
        self.R = grid.R
        if grid.sector.is_full:
            full_vals = u.values
            self.offset = float(grid.angles[0])
        elif grid.sector.kind == "half":
            n = grid.ntheta
            nfull = 2 * (n + 1)
            full_vals = np.zeros((grid.nr, nfull))
            full_vals[:, 1:n + 1] = u.values
            # theta in (pi/2, 3pi/2): odd image of the source nodes
            src = 2 * n + 1 - np.arange(n + 2, nfull)
            full_vals[:, n + 2:] = -u.values[:, src]
            self.offset = float(grid.angles[0] - grid.dtheta)  # -pi/2
        else:
            raise SectorError("3D reconstruction expects a full disk or half disk")
        modes = np.fft.rfft(full_vals, axis=1)
        self.nfull = full_vals.shape[1]
        self.m = np.arange(modes.shape[1])
        self.coeff = np.full(modes.shape[1], 2.0)
        self.coeff[0] = 1.0
        if self.nfull % 2 == 0:
            self.coeff[-1] = 1.0
        self.spline = CubicSpline(grid.radii, modes, axis=0)

    def modes_at(self, radius: np.ndarray) -> np.ndarray:
        """Radially interpolated Fourier modes; zero outside the disk."""
        radius = np.asarray(radius, dtype=float)
        vals = self.spline(np.clip(radius, None, self.R))
        vals[radius > self.R] = 0.0
        return vals

    def __call__(self, x1, x2, t):
        """Sample v at broadcastable coordinate arrays."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        t = np.asarray(t, dtype=float)
        r = np.hypot(x1, x2)
        phi = np.arctan2(x2, x1)
        modes = self.modes_at(r.ravel())
        phase = np.exp(1j * np.outer(
            (phi - self.offset).ravel(), self.m))
        twist = np.exp(-1j * np.outer(t.ravel() / self.lam, self.m))
        contrib = self.coeff * modes * phase * twist
        out = contrib.sum(axis=1).real / self.nfull
        return out.reshape(np.broadcast(x1, x2, t).shape)


def reconstruct3d(u: Field, params: ModelParams, nt: int,
                  nxy: int = 64, extent: float | None = None) -> SpiralField3D:
    """Sample the spiraling field over one turn period t in [0, 2 pi lambda).

    Radial profiles (no angular content) give t-independent volumes; odd
    reflected sector solutions vanish on the helicoid swept by the zero rays.
    """
    if nt < 2 or nxy < 2:
        raise ValueError("need at least 2 samples per axis")
    ev = SpiralEvaluator(u, params)
    if extent is None:
        extent = 0.75 * u.grid.R
    xs = np.linspace(-extent, extent, nxy)
    ts = np.arange(nt) * (2 * math.pi * params.lam / nt)
    x1, x2 = np.meshgrid(xs, xs, indexing="ij")

    r = np.hypot(x1, x2).ravel()
    phi = np.arctan2(x2, x1).ravel()
    modes = ev.modes_at(r)
    base = ev.coeff * modes * np.exp(1j * np.outer(phi - ev.offset, ev.m))
    twist = np.exp(-1j * np.outer(ev.m, ts / params.lam))
    vol = (base @ twist).real / ev.nfull          # (nxy*nxy, nt)
    values = vol.reshape(nxy, nxy, nt)

    dx = xs[1] - xs[0]
    dt = ts[1] - ts[0]
    return SpiralField3D(
        nx=nxy, ny=nxy, nt=nt,
        origin=(float(xs[0]), float(xs[0]), 0.0),
        spacing=(float(dx), float(dx), float(dt)),
        values=values, lam=params.lam,
    )


def helicoid_deviation(u: Field, params: ModelParams, n_samples: int = 100,
                       x_extent: float | None = None) -> float:
    """Largest |v| over points of the helicoid swept by the sector's zero rays.

    The screw motion carries the t = 0 zero set {x1 = 0} to
    {(-x sin s, x cos s, lam s)}; for an odd-reflected sector solution this
    surface lies in the nodal set, so the sampled values gauge reconstruction
    fidelity.
    """
    ev = SpiralEvaluator(u, params)
    if x_extent is None:
        x_extent = 0.6 * u.grid.R
    rng = np.random.default_rng(7)
    xs = rng.uniform(-x_extent, x_extent, n_samples)
    ss = rng.uniform(0.0, 2 * math.pi, n_samples)
    x1 = -xs * np.sin(ss)
    x2 = xs * np.cos(ss)
    t = params.lam * ss
    return float(np.max(np.abs(ev(x1, x2, t))))


def export_vtk(field3d: SpiralField3D, path) -> None:
    """Write a legacy ASCII structured-points volume (scalar array "v").

    One value per line, x-fastest ordering, 12 significant digits,
    locale-independent formatting.
    """
    vals = field3d.values
    if vals.shape != (field3d.nx, field3d.ny, field3d.nt):
        raise ValueError(
            f"value block {vals.shape} does not match dimensions "
            f"({field3d.nx}, {field3d.ny}, {field3d.nt})")
    lines = [
        _HEADER,
        "spiraling field, one turn period",
        "ASCII",
        "DATASET STRUCTURED_POINTS",
        f"DIMENSIONS {field3d.nx} {field3d.ny} {field3d.nt}",
        "ORIGIN {:.12g} {:.12g} {:.12g}".format(*field3d.origin),
        "SPACING {:.12g} {:.12g} {:.12g}".format(*field3d.spacing),
        f"POINT_DATA {field3d.nx * field3d.ny * field3d.nt}",
        "SCALARS v double 1",
        "LOOKUP_TABLE default",
    ]
    flat = np.transpose(vals, (2, 1, 0)).ravel()   # x fastest
    lines.extend("{:.11e}".format(x) for x in flat)
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"VTK export to {path} failed: {exc}") from exc


def read_vtk(path) -> SpiralField3D:
    """Minimal reader for the files export_vtk writes (round-trip checks)."""
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh]
    if lines[0] != _HEADER or lines[3] != "DATASET STRUCTURED_POINTS":
        raise ValueError(f"{path}: not a structured-points file from this package")
    dims = tuple(int(x) for x in lines[4].split()[1:])
    origin = tuple(float(x) for x in lines[5].split()[1:])
    spacing = tuple(float(x) for x in lines[6].split()[1:])
    count = int(lines[7].split()[1])
    data = np.array([float(x) for x in lines[10:10 + count]])
    values = data.reshape(dims[2], dims[1], dims[0]).transpose(2, 1, 0)
    return SpiralField3D(nx=dims[0], ny=dims[1], nt=dims[2], origin=origin,
                         spacing=spacing, values=values, lam=math.nan)
