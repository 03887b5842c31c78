"""Cylindrical coordinate charts: the rescaling T1, the conformal factor sigma_i and transition maps."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from ._smooth import _GL10, _GL20
from .errors import NonPositiveProfile, OutOfWindow, ZeroArgument
from .surface import (
    TWO_PI,
    UNIT_CIRCLE_CLASSES,
    RadialConformalFactor,
    SurfaceClassIndex,
    WarpedProfile,
)

SINGULAR_END_TOL = 1e-9
DEFAULT_WINDOW_EPS = 1e-8
DEFAULT_HALF_WIDTH = 40.0


def _gl(func, a, b, rule=_GL20):
    xi, wi = rule
    half = 0.5 * (b - a)
    u = (0.5 * (a + b))[..., None] + half[..., None] * xi
    return half * np.sum(wi * func(u), axis=-1)


class ParamTable:
    """Running integrals of a chart along its generating parameter s.

    Tabulates x(s) = int dx/ds, E(s) = int dE/ds and V(s) = int E dx from the base
    point s0 on adaptively refined nodes; between nodes a 20-point Gauss-Legendre
    rule (nested for V) restores full accuracy. x(s) is strictly increasing and is
    inverted by safeguarded Newton iteration.
    """

    def __init__(self, dx_ds, de_ds, lo, hi, s0, knots=(), tol=1e-15, max_nodes=200_000, refine_e=True):
        if not (lo <= s0 <= hi):
            raise ValueError("base point outside the parameter window")
        self.dx_ds = dx_ds
        self.de_ds = de_ds
        self.lo = float(lo)
        self.hi = float(hi)
        self.s0 = float(s0)
        init = np.linspace(lo, hi, 65)
        init = np.union1d(init, np.asarray(knots, dtype=float))
        init = init[(init >= lo) & (init <= hi)]
        init = np.union1d(init, [lo, hi, s0])
        nodes = self._refine(init, tol, max_nodes, (dx_ds, de_ds) if refine_e else (dx_ds,))
        self.nodes = nodes
        dx = _gl(dx_ds, nodes[:-1], nodes[1:])
        if np.any(dx <= 0):
            raise NonPositiveProfile("dx/ds must be positive on the parameter window")
        de = _gl(de_ds, nodes[:-1], nodes[1:])
        dv = self._v_increment(nodes[:-1], nodes[1:], np.zeros(nodes.size - 1))
        k0 = int(np.searchsorted(nodes, s0))
        x = np.concatenate([[0.0], np.cumsum(dx)])
        e = np.concatenate([[0.0], np.cumsum(de)])
        x -= x[k0]
        e -= e[k0]
        # V_{k+1} = V_k + E_k dx_k + (int of (E - E_k) dx over the cell)
        v = np.zeros(nodes.size)
        inc = e[:-1] * dx + dv
        v[1:] = np.cumsum(inc)
        v -= v[k0]
        self.x_nodes = x
        self.e_nodes = e
        self.v_nodes = v

    def _refine(self, nodes, tol, max_nodes, funcs):
        for _ in range(80):
            a, b = nodes[:-1], nodes[1:]
            bad = np.zeros(a.size, dtype=bool)
            for fn in funcs:
                whole = _gl(fn, a, b)
                mid = 0.5 * (a + b)
                halves = _gl(fn, a, mid) + _gl(fn, mid, b)
                scale = np.maximum(np.abs(halves), 1e-300) + np.abs(_gl(fn, a, b, _GL10))
                bad |= ~(np.abs(whole - halves) <= tol * np.maximum(scale, 1.0) * 4)
            if not bad.any():
                return nodes
            nodes = np.union1d(nodes, 0.5 * (a[bad] + b[bad]))
            if nodes.size > max_nodes:
                break
        return nodes

    def _v_increment(self, a, b, e_a):
        """int_a^b (E(u) - E(a)) x'(u) du + e_a * (x(b) - x(a)) with nested Gauss-Legendre."""
        xi, wi = _GL20
        half = 0.5 * (b - a)
        u = (0.5 * (a + b))[..., None] + half[..., None] * xi  # (..., 20)
        inner = _gl(self.de_ds, np.broadcast_to(a[..., None], u.shape), u)
        e_u = e_a[..., None] + inner
        return half * np.sum(wi * e_u * self.dx_ds(u), axis=-1)

    def _locate(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < self.lo - 1e-13 * max(1.0, abs(self.lo))) or np.any(s > self.hi + 1e-13 * max(1.0, abs(self.hi))):
            raise OutOfWindow("parameter outside the tabulated window")
        s = np.clip(s, self.lo, self.hi)
        k = np.clip(np.searchsorted(self.nodes, s, side="right") - 1, 0, self.nodes.size - 2)
        return s, k

    def x(self, s):
        s, k = self._locate(s)
        return self.x_nodes[k] + _gl(self.dx_ds, self.nodes[k], s)

    def E(self, s):
        s, k = self._locate(s)
        return self.e_nodes[k] + _gl(self.de_ds, self.nodes[k], s)

    def V(self, s):
        s, k = self._locate(s)
        return self.v_nodes[k] + self._v_increment(self.nodes[k], s, self.e_nodes[k]) - 0.0 * s

    @property
    def x_lo(self):
        return float(self.x_nodes[0])

    @property
    def x_hi(self):
        return float(self.x_nodes[-1])

    def s_of_x(self, x):
        """Inverse of x(s) to ~1e-14 relative accuracy."""
        x = np.asarray(x, dtype=float)
        tol_edge = 1e-12 * max(1.0, abs(self.x_lo), abs(self.x_hi))
        if np.any(x < self.x_lo - tol_edge) or np.any(x > self.x_hi + tol_edge):
            raise OutOfWindow(f"x1 outside the chart window [{self.x_lo:.6g}, {self.x_hi:.6g}]")
        x = np.clip(x, self.x_lo, self.x_hi)
        k = np.clip(np.searchsorted(self.x_nodes, x, side="right") - 1, 0, self.nodes.size - 2)
        a, b = self.nodes[k], self.nodes[k + 1]
        xa, xb = self.x_nodes[k], self.x_nodes[k + 1]
        s = a + (b - a) * (x - xa) / (xb - xa)
        for _ in range(60):
            cur = xa + _gl(self.dx_ds, a, s)
            err = cur - x
            step = err / self.dx_ds(s)
            s_new = np.clip(s - step, a, b)
            done = np.abs(err) <= 1e-15 * np.maximum(1.0, np.abs(x)) * 4
            s = np.where(done, s, s_new)
            if done.all():
                break
        return s


@dataclass(frozen=True)
class CylindricalChart:
    """Cylindrical coordinate (x1, x2) on M minus Sing(X) with metric sigma_i(x1)^2 (dx1^2 + dx2^2).

    The chart is backed by a generating parameter s: the geodesic arc parameter for
    profile charts, or x1 itself for charts built from a radial factor. x1 queries are
    served inside the finite window [x1_lo, x1_hi]; open_lo/open_hi flag ends that
    extend to infinity. For class 3, x1_period is the x1-length of one lattice period.
    """

    cls: SurfaceClassIndex
    table: ParamTable
    kind: str
    sigma_s: Callable  # s -> sigma_i
    dlog_s: Callable  # s -> d log sigma_i / dx1
    d2log_s: Callable  # s -> d^2 log sigma_i / dx1^2
    open_lo: bool = False
    open_hi: bool = False
    x1_period: Optional[float] = None
    base_offset: float = 0.0
    area_tails: tuple = (0.0, 0.0)  # E beyond the window ends (closed classes)
    profile: Optional[WarpedProfile] = None
    radial: Optional[RadialConformalFactor] = None
    notes: tuple = field(default_factory=tuple)

    @property
    def x1_lo(self):
        return self.table.x_lo

    @property
    def x1_hi(self):
        return self.table.x_hi if self.x1_period is None else self.table.x_lo + self.x1_period

    @property
    def x1_range(self):
        return (-math.inf if self.open_lo else self.x1_lo, math.inf if self.open_hi else self.x1_hi)

    @property
    def tau(self):
        return self.cls.tau

    @property
    def modulus(self):
        """Conformal modulus A (x1 length / 2 pi) for annulus- and torus-type classes."""
        if self.cls.i == 3:
            return self.x1_period / TWO_PI
        if self.cls.i in (2, 8, 10):
            return (self.x1_hi - self.x1_lo) / TWO_PI
        return None

    @property
    def rho(self):
        """exp(-2 pi A) computed from the geometry, or None for classes without a modulus."""
        a = self.modulus
        return None if a is None else math.exp(-TWO_PI * a)

    def reduce_x1(self, x1):
        x1 = np.asarray(x1, dtype=float)
        if self.x1_period is None:
            return x1
        return self.x1_lo + np.mod(x1 - self.x1_lo, self.x1_period)

    def s_of_x1(self, x1):
        return self.table.s_of_x(self.reduce_x1(x1))

    def x1_of_s(self, s):
        return self.table.x(s)

    def sigma(self, x1):
        return self.sigma_s(self.s_of_x1(x1))

    def dlog_sigma(self, x1):
        return self.dlog_s(self.s_of_x1(x1))

    def d2log_sigma(self, x1):
        return self.d2log_s(self.s_of_x1(x1))

    def log_sigma_derivs(self, x1):
        s = self.s_of_x1(x1)
        return self.sigma_s(s), self.dlog_s(s), self.d2log_s(s)

    def in_window(self, x1):
        x1 = np.asarray(x1, dtype=float)
        if self.x1_period is not None:
            return np.ones(x1.shape, dtype=bool)
        return (x1 >= self.x1_lo) & (x1 <= self.x1_hi)

    def with_class(self, cls):
        return replace(self, cls=cls)


# ---------------------------------------------------------------------------
# T1 construction


def _is_singular_end(profile, end):
    if not math.isfinite(end):
        return True
    return abs(float(profile.f(end))) < SINGULAR_END_TOL * max(1.0, profile.a)


def profile_window(profile: WarpedProfile, eps=DEFAULT_WINDOW_EPS, half_width=DEFAULT_HALF_WIDTH):
    """Finite parameter window inside I, stepping eps*|I| (or half_width) away from singular ends."""
    lo, hi = profile.lo, profile.hi
    if profile.f.is_sampled:
        return lo, hi, False, False
    span = (hi - lo) if (math.isfinite(lo) and math.isfinite(hi)) else 1.0
    w_lo, w_hi = lo, hi
    open_lo = open_hi = False
    if not math.isfinite(lo):
        w_lo = profile.s_base - half_width
        open_lo = True
    elif _is_singular_end(profile, lo):
        w_lo = lo + eps * span
        open_lo = True
    if not math.isfinite(hi):
        w_hi = profile.s_base + half_width
        open_hi = True
    elif _is_singular_end(profile, hi):
        w_hi = hi - eps * span
        open_hi = True
    return w_lo, w_hi, open_lo, open_hi


def build_T1(profile: WarpedProfile, tau: float = TWO_PI, base: Optional[float] = None, window=None, refine_e=True) -> ParamTable:
    """Tabulate T1(s) = int (2 pi / tau) a / f(u) du together with its inverse.

    The integral is based at `base` (the profile's base point by default) instead of
    the lower end of I, which keeps it finite when f vanishes there.
    """
    a = profile.a
    c = TWO_PI / tau
    if window is None:
        w_lo, w_hi, _, _ = profile_window(profile)
    else:
        w_lo, w_hi = window
    probe = np.linspace(w_lo, w_hi, 513)
    if profile.f.is_sampled:
        probe = np.union1d(probe, profile.f.knots())
    fv = profile.f(probe)
    if np.any(~np.isfinite(fv)) or np.any(fv[1:-1] <= 0):
        bad = probe[1:-1][np.argmax(~(fv[1:-1] > 0))]
        raise NonPositiveProfile(f"profile f <= 0 at interior node s = {bad:.6g}")
    s0 = profile.s_base if base is None else base
    s0 = min(max(s0, w_lo), w_hi)

    def dx_ds(s):
        return c * a / profile.f(s)

    def de_ds(s):
        return a * profile.f(s) / c

    return ParamTable(dx_ds, de_ds, w_lo, w_hi, s0, knots=profile.f.knots(), refine_e=refine_e)


def _quad_tail(func, a, b):
    if a == b:
        return 0.0
    val, _ = integrate.quad(func, a, b, epsabs=1e-14, epsrel=1e-13, limit=200)
    return val


def chart_from_profile(profile: WarpedProfile, cls: SurfaceClassIndex, *, window_eps=DEFAULT_WINDOW_EPS, half_width=DEFAULT_HALF_WIDTH) -> CylindricalChart:
    """Cylindrical chart with sigma_i(x1) = (tau / 2 pi) f(T1^{-1}(x1)).

    x1 = 0 sits at the lower end of I for classes whose flat model has the unit
    circle as an end (that end must be regular), and at the profile's base point
    otherwise; base_offset records the parameter used.
    """
    tau = cls.tau
    c = TWO_PI / tau
    a = profile.a
    notes = []
    if profile.closed or cls.i == 3:
        if not profile.closed:
            raise NonPositiveProfile("class 3 needs a periodic profile")
        lo = profile.lo
        period = profile.f.period if profile.f.period is not None else profile.hi - profile.lo
        hi = lo + period
        table = ParamTable(
            lambda s: c * a / profile.f(s),
            lambda s: a * profile.f(s) / c,
            lo,
            hi,
            lo,
            knots=profile.f.knots(),
        )
        x_period = table.x_hi - table.x_lo
        chart_cls = cls if cls.rho is not None else cls.with_rho(math.exp(-x_period))
        return CylindricalChart(
            cls=chart_cls,
            table=table,
            kind="profile",
            sigma_s=lambda s: profile.f(s) / c,
            dlog_s=lambda s: profile.f.deriv(s) / (c * a),
            d2log_s=lambda s: profile.f(s) * profile.f.deriv(s, 2) / (c * a) ** 2,
            x1_period=x_period,
            base_offset=lo,
            profile=profile,
            notes=tuple(notes),
        )

    w_lo, w_hi, open_lo, open_hi = profile_window(profile, window_eps, half_width)
    base = profile.s_base
    if cls.i in UNIT_CIRCLE_CLASSES and not cls.translational:
        if open_lo and not open_hi and math.isfinite(profile.hi):
            # the unit-circle end must come first: flip the parameter
            g = profile.f
            flipped = type(g)(
                f=lambda s, g=g, L=profile.lo + profile.hi: g(L - s),
                df=lambda s, g=g, L=profile.lo + profile.hi: -g.deriv(L - s),
                d2f=lambda s, g=g, L=profile.lo + profile.hi: g.deriv(L - s, 2),
                lo=profile.lo,
                hi=profile.hi,
            )
            profile = replace(profile, f=flipped, s_base=profile.lo + profile.hi - profile.s_base)
            w_lo, w_hi, open_lo, open_hi = profile_window(profile, window_eps, half_width)
            notes.append("profile reversed so that the unit-circle end is at x1 = 0")
        if open_lo:
            notes.append("lower end is not regular; x1 = 0 placed at the window edge")
        base = w_lo
    elif cls.i in (2, 8, 10) or (cls.translational and cls.i in (5, 11, 12)):
        base = w_lo
    table = build_T1(profile, tau, base=base, window=(w_lo, w_hi), refine_e=cls.i == 0)
    chart_cls = cls
    if cls.i in (2, 8, 10) and cls.rho is None:
        chart_cls = cls.with_rho(math.exp(-(table.x_hi - table.x_lo)))

    tails = (0.0, 0.0)
    if cls.i == 0:
        fa = lambda s: a * float(profile.f(s)) / c
        lo_t = _quad_tail(fa, profile.lo, w_lo) if math.isfinite(profile.lo) else math.inf
        hi_t = _quad_tail(fa, w_hi, profile.hi) if math.isfinite(profile.hi) else math.inf
        tails = (lo_t, hi_t)

    return CylindricalChart(
        cls=chart_cls,
        table=table,
        kind="profile",
        sigma_s=lambda s: profile.f(s) / c,
        dlog_s=lambda s: profile.f.deriv(s) / (c * a),
        d2log_s=lambda s: profile.f(s) * profile.f.deriv(s, 2) / (c * a) ** 2,
        open_lo=open_lo,
        open_hi=open_hi,
        base_offset=float(base),
        area_tails=tails,
        profile=profile,
        notes=tuple(notes),
    )


def cyl_from_polar(sigma: RadialConformalFactor, cls: SurfaceClassIndex, *, half_width=DEFAULT_HALF_WIDTH) -> CylindricalChart:
    """Chart with sigma_cyl(x1) = sigma(e^{-x1}) e^{-x1} on x1 in -log(radial range).

    The generating parameter is -log r itself; the chart coordinate is that value minus
    base_offset (zero except for a torus whose outer radius differs from 1).
    """
    x_lo = -math.log(sigma.r_hi) if math.isfinite(sigma.r_hi) else -half_width
    x_hi = -math.log(sigma.r_lo) if sigma.r_lo > 0 else half_width
    open_lo = not math.isfinite(sigma.r_hi)
    open_hi = sigma.r_lo == 0.0
    # a radial factor singular at r_hi (e.g. the Poincare disc) is an open end as well
    with np.errstate(divide="ignore", invalid="ignore"):
        edge_val = float(sigma(sigma.r_hi)) if math.isfinite(sigma.r_hi) else 0.0
    if math.isfinite(sigma.r_hi) and not np.isfinite(edge_val):
        open_lo = True
        x_lo = -math.log(sigma.r_hi) + math.exp(-half_width / 2)

    def sig(x):
        r = np.exp(-x)
        return sigma(r) * r

    def d1(x):
        r = np.exp(-x)
        return -r * sigma.dlog(r) - 1.0

    def d2(x):
        r = np.exp(-x)
        return r * sigma.dlog(r) + r * r * sigma.d2log(r)

    # x1 = -log r is kept as the chart coordinate, so the table is based at x1 = 0 when
    # possible; annulus and torus tables start at their first end instead
    base = x_lo if cls.i == 3 else min(max(0.0, x_lo), x_hi)
    table = ParamTable(lambda x: np.ones_like(x), lambda x: sig(x) ** 2, x_lo, x_hi, base, refine_e=cls.i in (0, 3))
    x_period = None
    chart_cls = cls
    if cls.i == 3:
        x_period = x_hi - x_lo
    if cls.i in (2, 3, 8, 10) and cls.rho is None:
        chart_cls = cls.with_rho(math.exp(-(x_hi - x_lo)))
    tails = (0.0, 0.0)
    if cls.i == 0:
        f2 = lambda x: float(sig(x)) ** 2
        tails = (_quad_tail(f2, -math.inf, x_lo), _quad_tail(f2, x_hi, math.inf))
    return CylindricalChart(
        cls=chart_cls,
        table=table,
        kind="polar",
        sigma_s=sig,
        dlog_s=d1,
        d2log_s=d2,
        open_lo=open_lo,
        open_hi=open_hi,
        x1_period=x_period,
        base_offset=float(base),
        area_tails=tails,
        radial=sigma,
    )


def w_map(x1, x2):
    """Chart point -> z = exp(-x1 - i x2)."""
    return np.exp(-np.asarray(x1, dtype=float) - 1j * np.asarray(x2, dtype=float))


def w_inv(z):
    """z -> chart point (x1, x2) with x2 in (-pi, pi]."""
    z = np.asarray(z, dtype=complex)
    if np.any(z == 0):
        raise ZeroArgument("w_inv is undefined at z = 0")
    return -np.log(np.abs(z)), -np.angle(z)


def chart_for_spec(spec) -> CylindricalChart:
    """Build the chart for any SurfaceSpec payload."""
    from .geodesic import meridian_of_revolution
    from .surface import arc_length_normalize

    if spec.kind == "revolution":
        g = arc_length_normalize(spec.payload)
        return chart_from_profile(meridian_of_revolution(g), spec.cls)
    if spec.kind == "radial":
        return cyl_from_polar(spec.payload, spec.cls)
    return chart_from_profile(spec.payload, spec.cls)
