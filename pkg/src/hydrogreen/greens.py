"""Hydrodynamic Green's functions G_i on a cylindrical chart, for every class i = 0..12."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chart import CylindricalChart
from .errors import AtZeroOfPrime, CoincidentPoints, DivergentArea, OutOfDomain
from .prime import PrimeFunction
from .surface import CLOSED_CLASSES, RHO_CLASSES, TWO_PI, SurfaceClassIndex

INV_2PI = 1.0 / TWO_PI
COINCIDE_TOL = 1e-14
PRODUCT_CLASSES = frozenset(RHO_CLASSES)
IMAGE_CLASSES = frozenset({1, 2, 5, 7, 8, 9, 10, 11, 12})


# ---------------------------------------------------------------------------
# flat-model formulas


def prime_for(cls: SurfaceClassIndex, tol: float = 1e-12) -> PrimeFunction:
    """The prime function used by class `cls` (plain 1 - z outside the annulus/torus classes)."""
    if cls.i in PRODUCT_CLASSES:
        if cls.rho is None:
            raise ValueError(f"class {cls.i} needs rho")
        if cls.i == 3:
            return PrimeFunction(cls.rho, tol, TWO_PI * cls.varpi / cls.tau)
        # annulus rho <= |z| <= 1: images of z0 sit at rho^{2m} z0 and rho^{2m} / conj(z0),
        # so the product runs over rho^{2n} (with rho^n the image term would vanish at
        # rho / conj(z0), inside the annulus)
        return PrimeFunction(cls.rho**2, tol)
    return PrimeFunction(0.0, tol)


def _log_abs_shifted(prime: PrimeFunction, z, z0):
    """log|z0 P(z / z0)|, using log|z0 - z| directly when P = 1 - z."""
    if prime.rho == 0.0:
        d = np.abs(z0 - z)
        return np.log(d)
    return np.log(np.abs(z0)) + prime.log_abs(z / z0)


def _strip_term(z, z0):
    """Im log(-(1 - z)(1 - z0) / ((1 + z)(1 + z0))) on the principal branch."""
    return np.angle(-(1.0 - z) * (1.0 - z0) / ((1.0 + z) * (1.0 + z0)))


def phi(cls: SurfaceClassIndex, z, z0, prime: Optional[PrimeFunction] = None, strip_term=None):
    """Phi_i(z, z0) in the flat model of class i.

    strip_term overrides the Im log term of classes 11 and 12 (the evaluator passes the
    continuous branch Re w + Re w0 computed in the strip model).
    """
    z = np.asarray(z, dtype=complex)
    z0 = np.asarray(z0, dtype=complex)
    if np.any(np.abs(z - z0) < COINCIDE_TOL):
        raise CoincidentPoints("z and z0 coincide")
    p = prime_for(cls) if prime is None else prime
    i = cls.i
    gam = cls.gamma_end or 0.0
    try:
        main = _log_abs_shifted(p, z, z0)
        bracket = main
        if i in IMAGE_CLASSES:
            bracket = bracket - p.log_abs(z * np.conj(z0))
        if i == 0:
            bracket = bracket - 0.5 * np.log(np.abs(z * z0))
        elif i == 3:
            bracket = bracket - np.log(np.abs(z)) * np.log(np.abs(z0)) / math.log(p.rho)
        elif i in (6, 7, 9):
            bracket = bracket - gam * np.log(np.abs(z * z0))
        elif i in (11, 12):
            term = _strip_term(z, z0) if strip_term is None else strip_term
            bracket = bracket - 2.0 * gam * term
    except AtZeroOfPrime as exc:
        raise CoincidentPoints("z coincides with a lattice image of z0") from exc
    return -INV_2PI * bracket


# ---------------------------------------------------------------------------
# chart -> flat model


@dataclass(frozen=True)
class FlatModel:
    """Conformal map from chart coordinates zeta = x1 + i x2 to the flat model variable z.

    Rotational classes use z = exp(-zeta). With a translational Killing field the
    plane class uses z = zeta, the cylinder class z = exp(i kappa zeta) with kappa
    2 pi over the x1 period, and the disc and strip classes pass through the strip
    w = (pi / W)(zeta - x1_lo), 0 <= Re w <= pi, followed by z = (1 + i e^{iw}) / (1 - i e^{iw}).
    """

    kind: str  # rot | plane | cyl | strip
    x1_lo: float = 0.0
    scale: float = 1.0

    @classmethod
    def for_chart(cls, chart: CylindricalChart):
        c = chart.cls
        if not c.translational:
            return cls("rot")
        if c.i == 4:
            return cls("plane")
        if c.i == 6:
            if chart.x1_period is None:
                raise OutOfDomain("a translational cylinder needs a periodic x1 profile")
            return cls("cyl", chart.x1_lo, TWO_PI / chart.x1_period)
        if chart.open_lo or chart.open_hi:
            raise OutOfDomain("a strip model needs a finite x1 interval")
        return cls("strip", chart.x1_lo, math.pi / (chart.x1_hi - chart.x1_lo))

    def w(self, x1, x2):
        return self.scale * ((np.asarray(x1) - self.x1_lo) + 1j * np.asarray(x2))

    def z(self, x1, x2):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.kind == "rot":
            return np.exp(-x1 - 1j * x2)
        if self.kind == "plane":
            return x1 + 1j * x2
        if self.kind == "cyl":
            return np.exp(1j * self.w(x1, x2))
        u = np.exp(1j * self.w(x1, x2))
        return (1.0 + 1j * u) / (1.0 - 1j * u)

    def log_abs_dz(self, x1, x2):
        """log|dz / dzeta|."""
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.kind == "rot":
            return -x1 + 0.0 * x2
        if self.kind == "plane":
            return np.zeros(np.broadcast(x1, x2).shape)
        if self.kind == "cyl":
            return math.log(self.scale) - self.scale * x2 + 0.0 * x1
        u = np.exp(1j * self.w(x1, x2))
        return math.log(2.0 * self.scale) + np.log(np.abs(u)) - 2.0 * np.log(np.abs(1.0 - 1j * u))


# ---------------------------------------------------------------------------
# metric potential


@dataclass(frozen=True)
class MetricPotential:
    """E(x1) = int_0^x1 sigma_i^2 and V(x1) = int_0^x1 E for a closed class, plus the area.

    `slope` is subtracted from V as slope * x1 so that G is smooth at both poles
    (class 0) or invariant under the lattice (class 3); see the project notes.
    """

    chart: CylindricalChart
    area: float
    e_lo: float  # E at the far lower end (class 0)
    e_hi: float
    slope: float
    e_period: float = 0.0  # class 3: E over one period
    v_period: float = 0.0  # class 3: V at the end of one period

    def _split(self, x1):
        x1 = np.asarray(x1, dtype=float)
        if self.chart.x1_period is None:
            return np.zeros_like(x1), x1
        L = self.chart.x1_period
        lo = self.chart.x1_lo
        k = np.floor((x1 - lo) / L)
        r = x1 - k * L
        r = np.clip(r, lo, lo + L)
        return k, r

    def E(self, x1):
        k, r = self._split(x1)
        t = self.chart.table
        return k * self.e_period + t.E(t.s_of_x(r))

    def V(self, x1):
        """Uncorrected running double integral of sigma_i^2."""
        k, r = self._split(x1)
        t = self.chart.table
        base = t.V(t.s_of_x(r))
        if self.chart.x1_period is None:
            return base
        L = self.chart.x1_period
        rr = r - self.chart.x1_lo
        return self.e_period * L * 0.5 * k * (k - 1) + k * self.v_period + k * self.e_period * rr + base

    def V_eff(self, x1):
        x1 = np.asarray(x1, dtype=float)
        return self.V(x1) - self.slope * x1


def metric_potential(chart: CylindricalChart) -> MetricPotential:
    """E, V and |M| for a closed class (i = 0 or 3)."""
    i = chart.cls.i
    if i not in CLOSED_CLASSES:
        raise ValueError("the metric potential is only defined for closed classes")
    t = chart.table
    if i == 3:
        L = chart.x1_period
        if abs(chart.x1_lo) > 1e-12:
            raise ValueError("torus tables must be based at the start of the period")
        e_p = float(t.E(t.hi))
        v_p = float(t.V(t.hi))
        area = TWO_PI * e_p
        return MetricPotential(chart, area, 0.0, e_p, v_p / L, e_p, v_p)
    lo_tail, hi_tail = chart.area_tails
    e_lo = float(t.E(t.lo)) - lo_tail
    e_hi = float(t.E(t.hi)) + hi_tail
    if not (math.isfinite(e_lo) and math.isfinite(e_hi)):
        raise DivergentArea("the area integral diverges", partial_sums=(float(t.E(t.lo)), float(t.E(t.hi))))
    area = TWO_PI * (e_hi - e_lo)
    if not area > 0:
        raise DivergentArea("non-positive area", partial_sums=(e_lo, e_hi))
    return MetricPotential(chart, area, e_lo, e_hi, 0.5 * (e_hi + e_lo))


# ---------------------------------------------------------------------------
# evaluator


@dataclass(frozen=True)
class GreensEvaluator:
    """Assembled G_i on a chart: class data, prime function, flat model and metric potential."""

    cls: SurfaceClassIndex
    chart: CylindricalChart
    prime: PrimeFunction
    model: FlatModel
    potential: Optional[MetricPotential] = None

    @classmethod
    def build(cls, chart: CylindricalChart, klass: Optional[SurfaceClassIndex] = None, prime_tol: float = 1e-12, gamma_end=None):
        """klass defaults to the chart's class (with rho taken from the geometry when undeclared)."""
        k = chart.cls if klass is None else klass
        if k.i in RHO_CLASSES and k.rho is None:
            k = k.with_rho(chart.rho)
        if gamma_end is not None:
            from dataclasses import replace

            k = replace(k, gamma_end=float(gamma_end))
        pot = metric_potential(chart) if k.i in CLOSED_CLASSES else None
        return cls(k, chart, prime_for(k, prime_tol), FlatModel.for_chart(chart), pot)

    @property
    def area(self):
        return None if self.potential is None else self.potential.area

    @property
    def lattice(self):
        """Chart translation (dx1, dx2) generating the torus identification, else None."""
        if self.cls.i != 3:
            return None
        return (self.chart.x1_period, TWO_PI * self.cls.varpi / self.cls.tau)

    def z(self, x1, x2):
        return self.model.z(x1, x2)

    def _strip(self, x1, x2, y1, y2):
        if self.cls.i not in (11, 12) or self.model.kind != "strip":
            return None
        return np.real(self.model.w(x1, x2)) + np.real(self.model.w(y1, y2))

    def phi(self, x1, x2, y1, y2):
        z = self.z(x1, x2)
        z0 = self.z(y1, y2)
        return phi(self.cls, z, z0, self.prime, self._strip(x1, x2, y1, y2))

    def greens(self, x1, x2, y1, y2):
        """G(x, x0) for chart points x = (x1, x2), x0 = (y1, y2); array arguments broadcast."""
        val = self.phi(x1, x2, y1, y2)
        if self.potential is not None:
            val = val + (self.potential.V_eff(x1) + self.potential.V_eff(y1)) / self.potential.area
        return val

    def _near_representative(self, x1, x2, y1, y2):
        """Shift x by lattice vectors so that x1 lies within half a period of y1."""
        if self.cls.i != 3:
            return np.asarray(x1, dtype=float), np.asarray(x2, dtype=float)
        L, th = self.lattice
        m = np.round((np.asarray(x1) - y1) / L)
        return x1 - m * L, x2 - m * th

    def robin_part(self, x1, x2, y1, y2):
        """G(x, x0) + (1/2 pi) log|z - z0|, continued to x = x0."""
        x1, x2 = self._near_representative(x1, x2, y1, y2)
        z = self.z(x1, x2)
        z0 = self.z(y1, y2)
        i = self.cls.i
        p = self.prime
        gam = self.cls.gamma_end or 0.0
        # log|z0 P(z/z0)| - log|z0 - z| = log|z0| + log|P(w)/(1 - w)|
        bracket = np.log(np.abs(z0)) + p.log_abs_cofactor(z / z0)
        if p.rho == 0.0:
            bracket = np.zeros(np.broadcast(z, z0).shape)
        if i in IMAGE_CLASSES:
            bracket = bracket - p.log_abs(z * np.conj(z0))
        if i == 0:
            bracket = bracket - 0.5 * np.log(np.abs(z * z0))
        elif i == 3:
            bracket = bracket - np.log(np.abs(z)) * np.log(np.abs(z0)) / math.log(p.rho)
        elif i in (6, 7, 9):
            bracket = bracket - gam * np.log(np.abs(z * z0))
        elif i in (11, 12):
            st = self._strip(x1, x2, y1, y2)
            bracket = bracket - 2.0 * gam * (_strip_term(z, z0) if st is None else st)
        val = -INV_2PI * bracket
        if self.potential is not None:
            val = val + (self.potential.V_eff(x1) + self.potential.V_eff(y1)) / self.potential.area
        return val

    def regular_part_chart(self, x1, x2, y1, y2):
        """G(x, x0) + (1/2 pi) log|zeta - zeta0| at the chart level, continued to x = x0."""
        x1, x2 = self._near_representative(x1, x2, y1, y2)
        z = self.z(x1, x2)
        z0 = self.z(y1, y2)
        dz = np.abs(z - z0)
        dzeta = np.hypot(np.asarray(x1) - y1, np.asarray(x2) - y2)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(dzeta > 0, np.log(dz) - np.log(dzeta), self.model.log_abs_dz(y1, y2))
        return self.robin_part(x1, x2, y1, y2) - INV_2PI * ratio


def greens(ev: GreensEvaluator, x, x0):
    return ev.greens(x[0], x[1], x0[0], x0[1])


def robin_part(ev: GreensEvaluator, x, x0):
    return ev.robin_part(x[0], x[1], x0[0], x0[1])
