"""Surface descriptions: class index, generatrices, radial conformal factors, warped profiles."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Union

import numpy as np

from ._smooth import Smooth1D, gauss_legendre
from .errors import DegenerateCurve, InvalidClassIndex, NonPositiveRadius

TWO_PI = 2.0 * math.pi

RHO_CLASSES = frozenset({2, 3, 8, 10})
GAMMA_CLASSES = frozenset({6, 7, 9, 11, 12})
CLOSED_CLASSES = frozenset({0, 3})
TRANSLATIONAL_CLASSES = frozenset({4, 5, 6, 11, 12})
# classes whose flat model has the unit circle as boundary or outer end
UNIT_CIRCLE_CLASSES = frozenset({1, 2, 5, 7, 8, 9, 10})

AXIS_TOL = 1e-9
CLOSURE_TOL = 1e-9


@dataclass(frozen=True)
class SurfaceClassIndex:
    """Declared conformal class S_i of the surface and its parameters.

    rho may be left as None for i in {2, 3, 8, 10}; it is then derived from the chart.
    translational selects the strip/plane model for i in {4, 5, 6} and is forced for 11, 12.
    """

    i: int
    tau: float = TWO_PI
    rho: Optional[float] = None
    gamma_end: Optional[float] = None
    varpi: Optional[float] = None
    translational: bool = False

    def __post_init__(self):
        if not isinstance(self.i, (int, np.integer)) or not 0 <= self.i <= 12:
            raise InvalidClassIndex(f"class index must be an integer in 0..12, got {self.i!r}")
        if not self.tau > 0:
            raise InvalidClassIndex("tau must be positive")
        if self.rho is not None:
            if self.i not in RHO_CLASSES:
                raise InvalidClassIndex(f"rho is only meaningful for classes {sorted(RHO_CLASSES)}")
            if not 0.0 < self.rho < 1.0:
                raise InvalidClassIndex("rho must lie in (0, 1)")
        if self.gamma_end is not None and self.i not in GAMMA_CLASSES:
            raise InvalidClassIndex(f"gamma_end is only meaningful for classes {sorted(GAMMA_CLASSES)}")
        if self.gamma_end is None and self.i in GAMMA_CLASSES:
            object.__setattr__(self, "gamma_end", 0.0)
        if self.varpi is not None and self.i != 3:
            raise InvalidClassIndex("varpi is only meaningful for class 3")
        if self.i == 3:
            if self.varpi is None:
                object.__setattr__(self, "varpi", 0.0)
            if not 0.0 <= self.varpi < self.tau:
                raise InvalidClassIndex("varpi must lie in [0, tau)")
        if self.i in (11, 12):
            object.__setattr__(self, "translational", True)
        if self.translational and self.i not in TRANSLATIONAL_CLASSES:
            raise InvalidClassIndex(f"class {self.i} admits no translational Killing field")

    @property
    def closed(self):
        return self.i in CLOSED_CLASSES

    def with_rho(self, rho):
        return replace(self, rho=float(rho))


@dataclass(frozen=True)
class Generatrix:
    """Profile curve theta -> (R1, R2) of a surface of revolution.

    speed is the constant arc-length speed r once normalized, None before.
    """

    R1: Smooth1D
    R2: Smooth1D
    lo: float
    hi: float
    speed: Optional[float] = None
    closed: bool = False
    s_base: Optional[float] = None
    name: str = "custom"

    def __post_init__(self):
        if not self.hi > self.lo:
            raise DegenerateCurve("empty parameter interval")

    def base(self):
        if self.s_base is not None:
            return self.s_base
        if math.isfinite(self.lo) and math.isfinite(self.hi):
            return 0.5 * (self.lo + self.hi)
        if math.isfinite(self.lo):
            return self.lo + 1.0
        if math.isfinite(self.hi):
            return self.hi - 1.0
        return 0.0

    def speed_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.hypot(self.R1.deriv(theta), self.R2.deriv(theta))

    def axis_contacts(self):
        """(lower end touches axis, upper end touches axis)."""
        scale = self.speed if self.speed else 1.0
        out = []
        for end in (self.lo, self.hi):
            if not math.isfinite(end) or self.closed:
                out.append(False)
            else:
                out.append(abs(float(self.R1(end))) < AXIS_TOL * scale)
        return tuple(out)


@dataclass(frozen=True)
class RadialConformalFactor:
    """Conformal factor sigma(|z|) of a radially symmetric metric sigma^2 |dz|^2 on r_lo < |z| < r_hi."""

    sigma: Smooth1D
    r_lo: float = 0.0
    r_hi: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        if not (0.0 <= self.r_lo < self.r_hi):
            raise ValueError("radial range must satisfy 0 <= r_lo < r_hi")

    def __call__(self, r):
        return self.sigma(r)

    def dlog(self, r):
        r = np.asarray(r, dtype=float)
        return self.sigma.deriv(r) / self.sigma(r)

    def d2log(self, r):
        r = np.asarray(r, dtype=float)
        s = self.sigma(r)
        d1 = self.sigma.deriv(r) / s
        return self.sigma.deriv(r, 2) / s - d1 * d1

    def contains(self, r):
        if r == 0.0 and self.r_lo == 0.0:
            # the origin belongs to the domain when the metric is regular there
            with np.errstate(divide="ignore", invalid="ignore"):
                s0 = float(self.sigma(0.0))
            return math.isfinite(s0) and s0 > 0
        return self.r_lo < r < self.r_hi


@dataclass(frozen=True)
class WarpedProfile:
    """Warped product a^2 ds^2 + f(s)^2 dt^2 over the horizontal geodesic's interval I."""

    a: float
    f: Smooth1D
    s_base: float = 0.0
    closed: bool = False

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("a = |gamma'(0)| must be positive")

    @property
    def lo(self):
        return self.f.lo

    @property
    def hi(self):
        return self.f.hi


Payload = Union[Generatrix, RadialConformalFactor, WarpedProfile]


@dataclass(frozen=True)
class SurfaceSpec:
    kind: str
    payload: Payload
    cls: SurfaceClassIndex
    window: Optional[tuple] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = {"revolution": Generatrix, "radial": RadialConformalFactor, "warped": WarpedProfile}
        if self.kind not in expected:
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if not isinstance(self.payload, expected[self.kind]):
            raise TypeError(f"kind {self.kind!r} needs a {expected[self.kind].__name__} payload")
        if self.kind == "revolution" and abs(self.cls.tau - TWO_PI) > 1e-12:
            raise InvalidClassIndex("surfaces of revolution have tau = 2*pi")


class Diagnostic(NamedTuple):
    code: str
    message: str


# ---------------------------------------------------------------------------
# arc-length normalization


def _arc_length(g, a, b):
    return float(gauss_legendre(g.speed_at, a, b))


def _cumulative_arc_length(g, nodes):
    seg = gauss_legendre(g.speed_at, nodes[:-1], nodes[1:])
    return np.concatenate([[0.0], np.cumsum(seg)])


def arc_length_normalize(g: Generatrix, n: int = 2001) -> Generatrix:
    """Reparametrize a generatrix to constant speed r over its original parameter interval.

    A generatrix whose speed is already constant to 1e-8 is returned with only its
    speed recorded, which makes the operation idempotent.
    """
    finite = math.isfinite(g.lo) and math.isfinite(g.hi)
    if finite:
        probe = np.linspace(g.lo, g.hi, 257)
        interior = probe[1:-1]
    else:
        lo = g.lo if math.isfinite(g.lo) else g.base() - 50.0
        hi = g.hi if math.isfinite(g.hi) else g.base() + 50.0
        probe = np.linspace(lo, hi, 257)
        interior = probe[1:-1]
    r1 = g.R1(interior)
    if np.any(r1 <= 0):
        bad = interior[np.argmax(r1 <= 0)]
        raise NonPositiveRadius(f"R1 <= 0 at interior parameter {bad:.6g}")
    sp = g.speed_at(probe)
    mean = float(np.mean(sp))
    if mean == 0.0:
        raise DegenerateCurve("generatrix has zero length")
    if float(np.std(sp)) / mean < 1e-8:
        return replace(g, speed=mean)
    if not finite:
        raise DegenerateCurve("cannot resample an unbounded generatrix with non-constant speed")

    fine = np.linspace(g.lo, g.hi, 64 * n + 1)
    ell = _cumulative_arc_length(g, fine)
    total = ell[-1]
    if total <= 0:
        raise DegenerateCurve("generatrix has zero length")
    r = total / (g.hi - g.lo)
    theta_new = np.linspace(g.lo, g.hi, n)
    target = (theta_new - g.lo) * r
    # invert the arc-length map: linear guess, then Newton on the exact quadrature
    old = np.interp(target, ell, fine)
    for _ in range(20):
        k = np.clip(np.searchsorted(fine, old) - 1, 0, fine.size - 2)
        cur = ell[k] + gauss_legendre(g.speed_at, fine[k], old)
        step = (cur - target) / g.speed_at(old)
        old = np.clip(old - step, g.lo, g.hi)
        if np.max(np.abs(cur - target)) < 1e-14 * max(1.0, total):
            break
    R1 = Smooth1D.from_samples(theta_new, g.R1(old), periodic=g.closed)
    R2 = Smooth1D.from_samples(theta_new, g.R2(old), periodic=False)
    s_base = None
    if g.s_base is not None:
        s_base = g.lo + _arc_length(g, g.lo, g.s_base) / r
    return Generatrix(R1, R2, g.lo, g.hi, speed=r, closed=g.closed, s_base=s_base, name=g.name)


def generatrix_from_samples(theta, R1, R2, closed=None, name="samples", s_base=None):
    """Build a cubic-spline generatrix from (theta, R1, R2) rows."""
    theta = np.asarray(theta, dtype=float)
    R1 = np.asarray(R1, dtype=float)
    R2 = np.asarray(R2, dtype=float)
    if closed is None:
        closed = bool(abs(R1[0] - R1[-1]) < CLOSURE_TOL and abs(R2[0] - R2[-1]) < CLOSURE_TOL)
    if closed:
        # a closed meridian: R2 may carry a net drift (helical data is rejected)
        if abs(R2[-1] - R2[0]) > CLOSURE_TOL:
            raise DegenerateCurve("closed generatrix endpoints do not coincide")
        r1 = Smooth1D.from_samples(theta, R1, periodic=True)
        r2 = Smooth1D.from_samples(theta, R2, periodic=True)
        d0 = np.array([r1.deriv(theta[0]), r2.deriv(theta[0])])
        d1 = np.array([r1.deriv(theta[-1]), r2.deriv(theta[-1])])
        if np.linalg.norm(d0 - d1) > 1e-6 * max(1.0, np.linalg.norm(d0)):
            raise DegenerateCurve("closed generatrix tangents do not align")
    else:
        r1 = Smooth1D.from_samples(theta, R1)
        r2 = Smooth1D.from_samples(theta, R2)
    return Generatrix(r1, r2, float(theta[0]), float(theta[-1]), closed=closed, name=name, s_base=s_base)


# ---------------------------------------------------------------------------
# named primitives


def _trig(amp, phase_cos, offset=0.0, freq=1.0):
    """amp * cos(freq*t) (phase_cos) or amp * sin(freq*t) plus offset, with derivatives."""
    if phase_cos:
        return (
            lambda t: offset + amp * np.cos(freq * t),
            lambda t: -amp * freq * np.sin(freq * t),
            lambda t: -amp * freq * freq * np.cos(freq * t),
        )
    return (
        lambda t: offset + amp * np.sin(freq * t),
        lambda t: amp * freq * np.cos(freq * t),
        lambda t: -amp * freq * freq * np.sin(freq * t),
    )


def _linear(slope, offset, lo=-np.inf, hi=np.inf):
    return Smooth1D(
        f=lambda t: offset + slope * np.asarray(t, dtype=float),
        df=lambda t: np.full_like(np.asarray(t, dtype=float), slope),
        d2f=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        lo=lo,
        hi=hi,
    )


def sphere_generatrix(radius=1.0):
    f, df, d2f = _trig(radius, False)
    g, dg, d2g = _trig(radius, True)
    return Generatrix(
        Smooth1D(f, df, d2f, 0.0, math.pi),
        Smooth1D(g, dg, d2g, 0.0, math.pi),
        0.0,
        math.pi,
        speed=float(radius),
        s_base=0.5 * math.pi,
        name="sphere",
    )


def torus_generatrix(R=math.sqrt(2.0), r=1.0):
    """Meridian circle of radius r centred at distance R from the axis (R > r)."""
    if not R > r > 0:
        raise NonPositiveRadius("torus needs R > r > 0")
    f, df, d2f = _trig(r, True, offset=R)
    g, dg, d2g = _trig(r, False)
    return Generatrix(
        Smooth1D(f, df, d2f, 0.0, TWO_PI, period=TWO_PI),
        Smooth1D(g, dg, d2g, 0.0, TWO_PI, period=TWO_PI),
        0.0,
        TWO_PI,
        speed=float(r),
        closed=True,
        s_base=0.0,
        name="torus",
    )


def cylinder_generatrix(radius=1.0, lo=-math.inf, hi=math.inf):
    return Generatrix(
        Smooth1D.constant(radius, lo, hi),
        _linear(1.0, 0.0, lo, hi),
        lo,
        hi,
        speed=1.0,
        s_base=0.0 if lo < 0 < hi else None,
        name="cylinder",
    )


def catenoid_generatrix(c=1.0):
    """Unit-speed meridian of the catenoid: R1 = sqrt(c^2 + s^2), R2 = c asinh(s/c)."""
    c = float(c)
    return Generatrix(
        Smooth1D(
            lambda s: np.sqrt(c * c + s * s),
            lambda s: s / np.sqrt(c * c + s * s),
            lambda s: c * c / (c * c + s * s) ** 1.5,
        ),
        Smooth1D(
            lambda s: c * np.arcsinh(s / c),
            lambda s: c / np.sqrt(c * c + s * s),
            lambda s: -c * s / (c * c + s * s) ** 1.5,
        ),
        -math.inf,
        math.inf,
        speed=1.0,
        s_base=0.0,
        name="catenoid",
    )


def cone_generatrix(half_angle=math.pi / 4):
    """Unit-speed cone meridian from the apex: R1 = s sin(alpha), R2 = -s cos(alpha)."""
    sa, ca = math.sin(half_angle), math.cos(half_angle)
    return Generatrix(_linear(sa, 0.0, 0.0), _linear(-ca, 0.0, 0.0), 0.0, math.inf, speed=1.0, s_base=1.0, name="cone")


def plane_generatrix():
    return Generatrix(_linear(1.0, 0.0, 0.0), Smooth1D.constant(0.0, 0.0), 0.0, math.inf, speed=1.0, s_base=1.0, name="plane")


def disc_generatrix(radius=1.0, inner=0.0):
    """Flat disc (inner = 0) or flat annulus inner <= |z| <= radius, traced from the outer rim inwards."""
    length = radius - inner
    return Generatrix(
        _linear(-1.0, radius, 0.0, length),
        Smooth1D.constant(0.0, 0.0, length),
        0.0,
        length,
        speed=1.0,
        s_base=0.0,
        name="disc" if inner == 0 else "annulus",
    )


GENERATRIX_PRIMITIVES = {
    "sphere": sphere_generatrix,
    "torus": torus_generatrix,
    "cylinder": cylinder_generatrix,
    "catenoid": catenoid_generatrix,
    "cone": cone_generatrix,
    "plane": plane_generatrix,
    "disc": disc_generatrix,
}


def _radial(f, df, d2f, r_lo, r_hi, name):
    return RadialConformalFactor(Smooth1D(f, df, d2f, r_lo, r_hi), r_lo, r_hi, name)


def flat_factor(r_lo=0.0, r_hi=math.inf, c=1.0):
    return RadialConformalFactor(Smooth1D.constant(c, r_lo, r_hi), r_lo, r_hi, "flat")


def sphere_factor(curvature=1.0):
    """2 / (1 + K r^2): the round sphere of curvature K in stereographic coordinates."""
    K = float(curvature)
    return _radial(
        lambda r: 2.0 / (1.0 + K * r * r),
        lambda r: -4.0 * K * r / (1.0 + K * r * r) ** 2,
        lambda r: (12.0 * K * K * r * r - 4.0 * K) / (1.0 + K * r * r) ** 3,
        0.0,
        math.inf,
        "sphere",
    )


def hyperbolic_factor():
    """2 / (1 - r^2): the Poincare disc."""
    return _radial(
        lambda r: 2.0 / (1.0 - r * r),
        lambda r: 4.0 * r / (1.0 - r * r) ** 2,
        lambda r: (4.0 + 12.0 * r * r) / (1.0 - r * r) ** 3,
        0.0,
        1.0,
        "hyperbolic",
    )


def inverse_radius_factor(r_lo=0.0, r_hi=math.inf):
    """1 / r: a flat cylinder written in polar form."""
    return _radial(
        lambda r: 1.0 / r,
        lambda r: -1.0 / (r * r),
        lambda r: 2.0 / (r * r * r),
        r_lo,
        r_hi,
        "inv_r",
    )


RADIAL_PRIMITIVES = {
    "flat": flat_factor,
    "sphere": sphere_factor,
    "hyperbolic": hyperbolic_factor,
    "inv_r": inverse_radius_factor,
}


def radial_from_samples(r, sigma, r_lo=None, r_hi=None):
    r = np.asarray(r, dtype=float)
    sm = Smooth1D.from_samples(r, sigma)
    if np.any(np.asarray(sigma) <= 0):
        raise NonPositiveRadius("sigma samples must be positive")
    return RadialConformalFactor(sm, float(r[0]) if r_lo is None else r_lo, float(r[-1]) if r_hi is None else r_hi, "samples")


def profile_from_samples(s, f, a=1.0, s_base=None, closed=False):
    s = np.asarray(s, dtype=float)
    sm = Smooth1D.from_samples(s, f, periodic=closed)
    base = float(s[0]) if s_base is None else float(s_base)
    return WarpedProfile(float(a), sm, base, closed)


# ---------------------------------------------------------------------------
# class validation


def _expected_revolution_classes(g: Generatrix):
    if g.closed:
        return {3}
    lo_axis, hi_axis = g.axis_contacts()
    if lo_axis and hi_axis:
        return {0}
    if lo_axis or hi_axis:
        other = g.hi if lo_axis else g.lo
        # a finite rim with R1 > 0 is a boundary circle; an infinite end is an open end
        return {1} if math.isfinite(other) else {4, 5}
    ends_finite = (math.isfinite(g.lo), math.isfinite(g.hi))
    if all(ends_finite):
        return {2}
    if any(ends_finite):
        return {9, 10}
    return {6, 7, 8}


def _expected_radial_classes(s: RadialConformalFactor):
    lo0 = s.r_lo == 0.0
    hi_inf = math.isinf(s.r_hi)
    hi1 = abs(s.r_hi - 1.0) < 1e-12
    if lo0 and hi_inf:
        return {0, 4, 6}
    if lo0 and hi1:
        return {1, 5, 7, 9}
    if s.r_lo > 0 and hi1:
        return {2, 3, 8, 10}
    return set()


def validate_class(spec: SurfaceSpec) -> list:
    """Decidable consistency checks between the declared class and the payload.

    Returns a list of Diagnostic tuples; an empty list means every check passed.
    """
    out = []
    c = spec.cls
    p = spec.payload
    if spec.kind == "revolution":
        allowed = _expected_revolution_classes(p)
        if c.i not in allowed:
            out.append(Diagnostic("TopologyMismatch", f"generatrix topology allows classes {sorted(allowed)}, declared {c.i}"))
        if p.closed and c.varpi not in (None, 0.0):
            out.append(Diagnostic("ShearMismatch", "a closed meridian of a surface of revolution has varpi = 0"))
    elif spec.kind == "radial":
        allowed = _expected_radial_classes(p)
        if c.i not in allowed:
            out.append(Diagnostic("TopologyMismatch", f"radial range ({p.r_lo}, {p.r_hi}) allows classes {sorted(allowed)}, declared {c.i}"))
        if c.i in RHO_CLASSES and c.rho is not None and abs(c.rho - p.r_lo) > 1e-9:
            out.append(Diagnostic("RhoMismatch", f"declared rho {c.rho} differs from inner radius {p.r_lo}"))
        if c.i == 3:
            x_per = -math.log(p.r_lo)
            s0 = float(p.sigma(1.0))
            s1 = float(p.sigma(p.r_lo)) * p.r_lo
            if abs(s0 - s1) > 1e-9 * max(1.0, s0):
                out.append(Diagnostic("NotPeriodic", f"sigma_cyl(0) != sigma_cyl({x_per:.6g})"))
    else:
        prof = p
        if c.i == 3 and not prof.closed:
            out.append(Diagnostic("TopologyMismatch", "class 3 needs a closed (periodic) profile"))
        if prof.closed and c.i != 3:
            out.append(Diagnostic("TopologyMismatch", "a periodic profile forces class 3"))
    if c.translational and spec.kind != "warped":
        out.append(Diagnostic("TranslationalPayload", "translational classes need a warped profile"))
    return out
