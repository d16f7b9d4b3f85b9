"""Independent 1D radial oracle for the limit equation -u'' - u'/r + u = |u|^{p-2} u.

Ground and nodal profiles are found by bisection on the initial amplitude
u(0): the number of sign changes of the shot trajectory is a step function of
the amplitude, jumping from k to k+1 exactly at the k-node decaying solution.
Integration leaves the singular point at r = eps with the series
u(r) = u(0) + (u(0) - u(0)^{p-1}) r^2 / 4 and uses an adaptive 4(5)
Dormand-Prince stepper (hand-unrolled scalar arithmetic; the shooting loop
runs a few thousand integrations per profile and per-call overhead of a
generic IVP driver dominates otherwise).  Past the last sign change the
trajectory is grafted onto the exact linearized decay c K_0(r), which pins
|u| below 1e-10 at the far boundary where bisection round-off would otherwise
re-excite the growing mode.

Everything here is deliberately one-dimensional and self-contained so it can
serve as ground truth for the 2D solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline
from scipy.special import k0e, k1e

from .errors import BisectionBracketFailure

_EPS0 = 1e-6         # launch radius for the series start
_RMAX_SHOOT = 60.0   # classification horizon; divergence triggers far earlier


@dataclass(frozen=True)
class RadialProfile:
    """Decaying radial solution sampled on a uniform grid."""

    radii: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    energy: float        # E_* over R^2 (2 pi r dr measure)
    mass: float          # integral u^2
    kind: str            # "ground" | "nodal"
    nodes: int           # interior sign changes
    amplitude: float     # u(0)
    p: float

    def interpolator(self) -> CubicSpline:
        """Clamped cubic spline (u'(0) = 0); evaluate as 0 beyond the grid."""
        return CubicSpline(self.radii, self.values,
                           bc_type=((1, 0.0), (1, float(self.slopes[-1]))))

    def __call__(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        inside = r <= self.radii[-1]
        out[inside] = self.interpolator()(r[inside])
        return out


def _integrate(a: float, p: float, rtol: float, record: bool = False,
               rmax: float = _RMAX_SHOOT):
    """Shoot from u(0) = a.  Returns (crossings, samples or None).

    Terminates once |u| exceeds 3|a| + 1 (divergence).  samples is a list of
    accepted (r, u, u') triples when record is set.
    """
    pm1 = p - 1.0
    atol = rtol * 1e-3
    r = _EPS0
    fa = a - math.copysign(abs(a) ** pm1, a)
    u = a + fa * r * r / 4.0
    v = fa * r / 2.0
    bound = 3.0 * abs(a) + 1.0
    h = 1e-3
    crossings = 0
    samples = [(r, u, v)] if record else None

    k1u = v
    k1v = -v / r + u - math.copysign(abs(u) ** pm1, u)
    while r < rmax:
        if h > rmax - r:
            h = rmax - r
        r2 = r + 0.2 * h
        uu = u + h * 0.2 * k1u
        vv = v + h * 0.2 * k1v
        k2u = vv
        k2v = -vv / r2 + uu - math.copysign(abs(uu) ** pm1, uu)
        r3 = r + 0.3 * h
        uu = u + h * (0.075 * k1u + 0.225 * k2u)
        vv = v + h * (0.075 * k1v + 0.225 * k2v)
        k3u = vv
        k3v = -vv / r3 + uu - math.copysign(abs(uu) ** pm1, uu)
        r4 = r + 0.8 * h
        uu = u + h * (0.9777777777777777 * k1u - 3.7333333333333334 * k2u
                      + 3.5555555555555554 * k3u)
        vv = v + h * (0.9777777777777777 * k1v - 3.7333333333333334 * k2v
                      + 3.5555555555555554 * k3v)
        k4u = vv
        k4v = -vv / r4 + uu - math.copysign(abs(uu) ** pm1, uu)
        r5 = r + 0.8888888888888888 * h
        uu = u + h * (2.9525986892242035 * k1u - 11.595793324188385 * k2u
                      + 9.822892851699436 * k3u - 0.2908093278463649 * k4u)
        vv = v + h * (2.9525986892242035 * k1v - 11.595793324188385 * k2v
                      + 9.822892851699436 * k3v - 0.2908093278463649 * k4v)
        k5u = vv
        k5v = -vv / r5 + uu - math.copysign(abs(uu) ** pm1, uu)
        r6 = r + h
        uu = u + h * (2.8462752525252526 * k1u - 10.757575757575758 * k2u
                      + 8.906422717743473 * k3u + 0.2784090909090909 * k4u
                      - 0.2735313036020583 * k5u)
        vv = v + h * (2.8462752525252526 * k1v - 10.757575757575758 * k2v
                      + 8.906422717743473 * k3v + 0.2784090909090909 * k4v
                      - 0.2735313036020583 * k5v)
        k6u = vv
        k6v = -vv / r6 + uu - math.copysign(abs(uu) ** pm1, uu)
        u5 = u + h * (0.09114583333333333 * k1u + 0.44923629829290207 * k3u
                      + 0.6510416666666666 * k4u - 0.322376179245283 * k5u
                      + 0.13095238095238096 * k6u)
        v5 = v + h * (0.09114583333333333 * k1v + 0.44923629829290207 * k3v
                      + 0.6510416666666666 * k4v - 0.322376179245283 * k5v
                      + 0.13095238095238096 * k6v)
        k7u = v5
        k7v = -v5 / r6 + u5 - math.copysign(abs(u5) ** pm1, u5)
        eu = h * (0.0012326388888888888 * k1u - 0.0042527702905061394 * k3u
                  + 0.03697916666666666 * k4u - 0.05086379716981132 * k5u
                  + 0.0419047619047619 * k6u - 0.025 * k7u)
        ev = h * (0.0012326388888888888 * k1v - 0.0042527702905061394 * k3v
                  + 0.03697916666666666 * k4v - 0.05086379716981132 * k5v
                  + 0.0419047619047619 * k6v - 0.025 * k7v)
        su = atol + rtol * max(abs(u), abs(u5))
        sv = atol + rtol * max(abs(v), abs(v5))
        e1 = eu / su
        e2 = ev / sv
        err = math.sqrt(0.5 * (e1 * e1 + e2 * e2))
        if err <= 1.0:
            if (u > 0.0) != (u5 > 0.0):
                crossings += 1
            r += h
            u, v = u5, v5
            k1u, k1v = k7u, k7v
            if record:
                samples.append((r, u, v))
            if abs(u) > bound:
                break
        h *= min(5.0, max(0.2, 0.9 * err ** -0.2)) if err > 0.0 else 5.0
    return crossings, samples


def _crossings(a: float, p: float, rtol: float) -> int:
    return _integrate(a, p, rtol)[0]


def _bisect_band(p: float, k: int, lo: float, hi: float, rtol: float,
                 max_iter: int):
    """Narrow [lo, hi] onto the k -> k+1 crossing-count jump."""
    if _crossings(lo, p, rtol) > k:
        raise BisectionBracketFailure(f"lower amplitude {lo} already crosses > {k} times")
    attempts = 0
    while _crossings(hi, p, rtol) <= k:
        hi *= 2.0
        attempts += 1
        if attempts > 60:
            raise BisectionBracketFailure(
                f"amplitude doubling found no {k + 1}-crossing trajectory (p={p})")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if _crossings(mid, p, rtol) <= k:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _shoot_amplitude(p: float, k: int, tol: float) -> float:
    """Two-stage amplitude bisection: coarse sweep, then tight refinement."""
    lo, hi = _bisect_band(p, k, 0.25, 1.0, rtol=1e-9, max_iter=34)
    pad = max(4.0 * (hi - lo), 1e-8 * hi)
    lo2, hi2 = max(lo - pad, 0.5 * lo), hi + pad
    rtol = min(tol, 1e-12)
    if _crossings(lo2, p, rtol) > k:      # coarse band missed; restart tight
        lo2, hi2 = 0.25, 1.0
    lo, hi = _bisect_band(p, k, lo2, hi2, rtol=rtol, max_iter=200)
    return lo


def _assemble_profile(a: float, p: float, k: int, r1d: float, dr1d: float,
                      rtol: float) -> RadialProfile:
    crossings, samples = _integrate(a, p, rtol, record=True)
    rs = np.array([s[0] for s in samples])
    us = np.array([s[1] for s in samples])
    vs = np.array([s[2] for s in samples])

    # graft point: first |u| below threshold after the final sign change
    last_cross = 0.0
    sign_flips = np.nonzero(np.diff(np.signbit(us)))[0]
    if sign_flips.size:
        last_cross = rs[sign_flips[-1] + 1]
    tail = rs > last_cross
    gt = 1e-5 * max(1.0, abs(a))
    small = tail & (np.abs(us) <= gt)
    if not np.any(small):
        # fall back to the flattest point of the tail
        idx = np.argmin(np.where(tail, np.abs(us), np.inf))
    else:
        idx = np.nonzero(small)[0][0]
    r_g, u_g = float(rs[idx]), float(us[idx])

    radii = np.arange(0.0, r1d + 0.5 * dr1d, dr1d)
    hermite = CubicSpline(rs, us)  # dense accepted steps; plain cubic suffices
    hermite_v = CubicSpline(rs, vs)
    vals = np.empty_like(radii)
    slopes = np.empty_like(radii)

    series = radii < rs[0]
    fa = a - math.copysign(abs(a) ** (p - 1.0), a)
    vals[series] = a + fa * radii[series] ** 2 / 4.0
    slopes[series] = fa * radii[series] / 2.0
    inner = (~series) & (radii <= r_g)
    vals[inner] = hermite(radii[inner])
    slopes[inner] = hermite_v(radii[inner])
    outer = radii > r_g
    # decaying Bessel tail: u = c K0(r), u' = -c K1(r)
    c = u_g / k0e(r_g)
    damp = np.exp(-(radii[outer] - r_g))
    vals[outer] = c * k0e(radii[outer]) * damp
    slopes[outer] = -c * k1e(radii[outer]) * damp

    w = radii
    mass = 2 * np.pi * simpson(vals**2 * w, x=radii)
    grad2 = 2 * np.pi * simpson(slopes**2 * w, x=radii)
    lp = 2 * np.pi * simpson(np.abs(vals) ** p * w, x=radii)
    e_star = 0.5 * (grad2 + mass) - lp / p

    for arr in (radii, vals, slopes):
        arr.setflags(write=False)
    return RadialProfile(
        radii=radii, values=vals, slopes=slopes, energy=float(e_star),
        mass=float(mass), kind="ground" if k == 0 else "nodal", nodes=k,
        amplitude=float(a), p=float(p),
    )


@lru_cache(maxsize=32)
def _shoot_cached(p: float, k: int, tol: float, r1d: float, dr1d: float) -> RadialProfile:
    a = _shoot_amplitude(p, k, tol)
    return _assemble_profile(a, p, k, r1d, dr1d, rtol=min(tol, 1e-12))


def shoot_ground(p: float, tol: float = 1e-12, r1d: float = 40.0,
                 dr1d: float = 0.01) -> RadialProfile:
    """Positive decaying solution (unique up to the amplitude found here)."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    return _shoot_cached(float(p), 0, float(tol), float(r1d), float(dr1d))


def shoot_nodal(p: float, k: int = 1, tol: float = 1e-12, r1d: float = 40.0,
                dr1d: float = 0.01) -> RadialProfile:
    """Decaying solution with exactly k interior sign changes."""
    if not p > 2:
        raise ValueError(f"p must exceed 2, got {p}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return _shoot_cached(float(p), int(k), float(tol), float(r1d), float(dr1d))


def profile_identities(profile: RadialProfile) -> dict:
    """Relative defects of the Pohozaev and Nehari identities (dimension 2)."""
    radii, vals, slopes, p = profile.radii, profile.values, profile.slopes, profile.p
    w = radii
    mass = 2 * np.pi * simpson(vals**2 * w, x=radii)
    grad2 = 2 * np.pi * simpson(slopes**2 * w, x=radii)
    lp = 2 * np.pi * simpson(np.abs(vals) ** p * w, x=radii)
    return {
        "pohozaev": float((mass - (2.0 / p) * lp) / mass),
        "nehari": float((grad2 + mass - lp) / (grad2 + mass)),
        "mass": float(mass),
        "grad_sq": float(grad2),
        "lp": float(lp),
    }


def count_interior_zeros(profile: RadialProfile, floor: float = 1e-8) -> int:
    """Sign changes of the profile, ignoring sub-noise tail wiggle."""
    v = profile.values[np.abs(profile.values) > floor * abs(profile.amplitude)]
    return int(np.count_nonzero(np.diff(np.signbit(v))))


def limit_levels(p: float, tol: float = 1e-12):
    """(c_inf, radial nodal energy, eps_star): the energy-doubling gap data."""
    ground = shoot_ground(p, tol)
    nodal = shoot_nodal(p, 1, tol)
    c_inf = ground.energy
    eps_star = nodal.energy - 2.0 * c_inf
    return c_inf, nodal.energy, eps_star
