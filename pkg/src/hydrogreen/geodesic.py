"""Geodesics of radially symmetric conformal metrics sigma(|x|)^2 |dx|^2 and horizontal geodesics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._smooth import Smooth1D
from .errors import BaseAtSingularPoint, OutOfDomain, StepTooLarge
from .surface import TWO_PI, Generatrix, RadialConformalFactor, WarpedProfile

RANGE_EXHAUSTED = "range exhausted"
SINGULAR_POINT = "singular point reached"
CLOSED_LOOP = "closed loop detected"

SINGULAR_TOL = 1e-9
DRIFT_TOL = 1e-6


class GeodesicState(NamedTuple):
    x1: float
    x2: float
    v1: float
    v2: float


@dataclass(frozen=True)
class GeodesicTrajectory:
    s: np.ndarray
    states: np.ndarray  # (n, 4): x1, x2, v1, v2
    h: float
    reason: str

    def endpoint(self):
        return GeodesicState(*self.states[-1])

    def to_csv_rows(self):
        return [(float(s), *map(float, st)) for s, st in zip(self.s, self.states)]


def _dlog_partials(sigma: RadialConformalFactor, x1, x2):
    r = math.hypot(x1, x2)
    if not sigma.contains(r):
        raise OutOfDomain(f"radius {r:.6g} outside ({sigma.r_lo}, {sigma.r_hi})")
    if r == 0.0:
        return 0.0, 0.0
    g = float(sigma.dlog(r))
    return g * x1 / r, g * x2 / r


def geodesic_rhs(sigma: RadialConformalFactor, state) -> GeodesicState:
    """Time derivative of a geodesic state for the metric sigma(|x|)^2 (dx1^2 + dx2^2).

    On the real axis this is exactly the reduced pair
    x1'' + d1 log(sigma) (v1^2 - v2^2) = 0 and x2'' + 2 d1 log(sigma) v1 v2 = 0.
    """
    x1, x2, v1, v2 = state
    l1, l2 = _dlog_partials(sigma, x1, x2)
    a1 = -l1 * (v1 * v1 - v2 * v2) - 2.0 * l2 * v1 * v2
    a2 = -l2 * (v2 * v2 - v1 * v1) - 2.0 * l1 * v1 * v2
    return GeodesicState(v1, v2, a1, a2)


def metric_speed_sq(sigma, state):
    x1, x2, v1, v2 = state
    s = float(sigma(math.hypot(x1, x2)))
    return s * s * (v1 * v1 + v2 * v2)


def _rk4_step(sigma, y, h):
    k1 = np.array(geodesic_rhs(sigma, y))
    k2 = np.array(geodesic_rhs(sigma, y + 0.5 * h * k1))
    k3 = np.array(geodesic_rhs(sigma, y + 0.5 * h * k2))
    k4 = np.array(geodesic_rhs(sigma, y + h * k3))
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _orbit_speed(sigma, y, tau):
    r = math.hypot(y[0], y[1])
    return (TWO_PI / tau) * float(sigma(r)) * r


def integrate_geodesic(
    sigma: RadialConformalFactor,
    state0,
    s_max: float,
    h: float = 1e-3,
    *,
    tau: float = TWO_PI,
    singular_tol: float = SINGULAR_TOL,
    stop_on_drift: bool = False,
    loop_radius: float | None = None,
) -> GeodesicTrajectory:
    """Classical RK4 integration of a geodesic for arc parameter s in [0, s_max].

    Stops early when the Killing orbit radius (2 pi / tau) sigma(r) r drops below
    singular_tol, when the next step would leave the radial range of sigma, or when
    the radius crosses loop_radius (the image of the base orbit on a torus).
    A step whose relative metric-speed drift exceeds 1e-6 raises StepTooLarge, or
    ends the trajectory as a singular approach when stop_on_drift is set.
    """
    if not h > 0:
        raise ValueError("step size must be positive")
    y = np.array(state0, dtype=float)
    r0 = math.hypot(y[0], y[1])
    if not sigma.contains(r0):
        raise OutOfDomain(f"initial radius {r0:.6g} outside the radial range")
    e0 = metric_speed_sq(sigma, y)
    if e0 == 0.0:
        raise ValueError("initial velocity must be non-zero")
    n_max = int(math.floor(s_max / h + 1e-9))
    s_list = [0.0]
    ys = [y.copy()]
    reason = RANGE_EXHAUSTED
    prev_e = e0
    for k in range(1, n_max + 1):
        try:
            y_new = _rk4_step(sigma, y, h)
        except OutOfDomain:
            reason = RANGE_EXHAUSTED if _orbit_speed(sigma, y, tau) > 1e-3 else SINGULAR_POINT
            break
        r_new = math.hypot(y_new[0], y_new[1])
        if not np.all(np.isfinite(y_new)) or not sigma.contains(r_new):
            reason = RANGE_EXHAUSTED
            break
        # passing through the origin means passing through a fixed point of the rotation
        if y[0] * y_new[0] < 0.0 and abs(y[1]) < 1e-12 and abs(y_new[1]) < 1e-12:
            reason = SINGULAR_POINT
            break
        e_new = metric_speed_sq(sigma, y_new)
        if abs(e_new - prev_e) / e0 > DRIFT_TOL:
            if stop_on_drift:
                reason = SINGULAR_POINT
                break
            raise StepTooLarge(f"metric speed drift {abs(e_new - prev_e) / e0:.3g} per step at s = {k * h:.6g}")
        prev_e = e_new
        y = y_new
        s_list.append(k * h)
        ys.append(y.copy())
        if _orbit_speed(sigma, y, tau) < singular_tol:
            reason = SINGULAR_POINT
            break
        if loop_radius is not None:
            r_prev = math.hypot(*ys[-2][:2])
            if (r_prev - loop_radius) * (r_new - loop_radius) <= 0.0:
                reason = CLOSED_LOOP
                break
    return GeodesicTrajectory(np.asarray(s_list), np.asarray(ys), h, reason)


def horizontal_geodesic(
    sigma: RadialConformalFactor,
    o: float,
    direction: int = 1,
    *,
    tau: float = TWO_PI,
    h: float = 1e-3,
    s_max: float = 50.0,
    rho: float | None = None,
) -> WarpedProfile:
    """Horizontal geodesic through the point o > 0 of the positive real axis.

    The geodesic is integrated with unit metric speed in both directions and the
    orbit speed f(s) = (2 pi / tau) sigma(r(s)) r(s) is sampled along it. With
    direction = +1 the parameter s increases with the radius, with -1 it decreases.
    When rho is given (torus in polar form) the profile is closed at the radius o / rho.
    """
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if not sigma.contains(o) or o <= SINGULAR_TOL:
        raise BaseAtSingularPoint(f"base radius {o!r} is a singular point or outside the radial range")
    if (TWO_PI / tau) * float(sigma(o)) * o < SINGULAR_TOL:
        raise BaseAtSingularPoint("Killing field vanishes at the base point")
    v = 1.0 / float(sigma(o))
    if rho is not None:
        fwd = integrate_geodesic(sigma, (o, 0.0, v, 0.0), s_max, h, tau=tau, loop_radius=o / rho)
        if fwd.reason != CLOSED_LOOP:
            raise ValueError("horizontal geodesic did not return to the base orbit")
        s = fwd.s
        r = np.hypot(fwd.states[:, 0], fwd.states[:, 1])
        f = (TWO_PI / tau) * sigma(r) * r
        # locate the loop parameter inside the last step by cubic Hermite interpolation
        target = o / rho
        r0, r1 = r[-2], r[-1]
        d0, d1 = fwd.states[-2, 2] * h, fwd.states[-1, 2] * h
        t = (target - r0) / (r1 - r0)
        for _ in range(50):
            h00 = 2 * t**3 - 3 * t**2 + 1
            h10 = t**3 - 2 * t**2 + t
            h01 = -2 * t**3 + 3 * t**2
            h11 = t**3 - t**2
            val = h00 * r0 + h10 * d0 + h01 * r1 + h11 * d1 - target
            der = (6 * t**2 - 6 * t) * r0 + (3 * t**2 - 4 * t + 1) * d0 + (-6 * t**2 + 6 * t) * r1 + (3 * t**2 - 2 * t) * d1
            t -= val / der
            if abs(val) < 1e-15 * target:
                break
        s_loop = s[-2] + t * h
        keep = s[:-1] < s_loop - 0.1 * h
        s_closed = np.append(s[:-1][keep], s_loop)
        f_closed = np.append(f[:-1][keep], f[0])
        prof = Smooth1D.from_samples(s_closed, f_closed, periodic=True)
        return WarpedProfile(1.0, prof, 0.0, closed=True)
    fwd = integrate_geodesic(sigma, (o, 0.0, v, 0.0), s_max, h, tau=tau, stop_on_drift=True)
    bwd = integrate_geodesic(sigma, (o, 0.0, -v, 0.0), s_max, h, tau=tau, stop_on_drift=True)
    s = np.concatenate([-bwd.s[:0:-1], fwd.s])
    xs = np.concatenate([bwd.states[:0:-1, 0], fwd.states[:, 0]])
    r = np.abs(xs)
    f = (TWO_PI / tau) * sigma(r) * r
    if direction == -1:
        s = -s[::-1]
        f = f[::-1]
    prof = Smooth1D.from_samples(s, f)
    return WarpedProfile(1.0, prof, 0.0)


def meridian_of_revolution(g: Generatrix) -> WarpedProfile:
    """Profile f = R1 with a = r read straight off an arc-length generatrix."""
    if g.speed is None:
        raise ValueError("generatrix must be arc-length normalized first")
    return WarpedProfile(g.speed, g.R1, g.base(), closed=g.closed)
