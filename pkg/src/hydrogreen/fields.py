"""Scalar fields on a chart: curvature, Killing speed, pressure, vorticity, potential-flow speed, G*K."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .chart import CylindricalChart
from .errors import DivergentConvolution, NonHolomorphic
from .surface import TWO_PI

CR_TOL = 1e-4
CR_STEP = 1e-4


@dataclass(frozen=True)
class Grid:
    """Cell-centred n1 x n2 grid on [a, b] x [c, d] of chart coordinates."""

    n1: int
    n2: int
    window: tuple

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("grid counts must be at least 2")
        a, b, c, d = self.window
        if not (b > a and d > c):
            raise ValueError("grid window must have positive extent")

    @property
    def h1(self):
        return (self.window[1] - self.window[0]) / self.n1

    @property
    def h2(self):
        return (self.window[3] - self.window[2]) / self.n2

    @property
    def x1(self):
        return self.window[0] + (np.arange(self.n1) + 0.5) * self.h1

    @property
    def x2(self):
        return self.window[2] + (np.arange(self.n2) + 0.5) * self.h2

    def mesh(self):
        return np.meshgrid(self.x1, self.x2, indexing="ij")


def default_window(chart: CylindricalChart, half_width: float = 8.0):
    """A finite x1 window for the chart; x2 spans one period 2 pi."""
    if chart.x1_period is not None:
        lo, hi = chart.x1_lo, chart.x1_lo + chart.x1_period
    else:
        lo = max(chart.x1_lo, -half_width)
        hi = min(chart.x1_hi, half_width)
    return (lo, hi, 0.0, TWO_PI)


@dataclass(frozen=True)
class ScalarField:
    """A real function of chart points, optionally sampled on a grid."""

    chart: CylindricalChart
    func: Callable
    name: str = "field"
    x1_only: bool = False
    grid: Optional[Grid] = None
    values: Optional[np.ndarray] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, x1, x2=0.0):
        x1 = np.asarray(x1, dtype=float)
        x2 = np.asarray(x2, dtype=float)
        if self.x1_only:
            return np.broadcast_to(self.func(x1), np.broadcast(x1, x2).shape).copy()
        return self.func(x1, x2)

    def sample(self, grid: Grid) -> "ScalarField":
        X1, X2 = grid.mesh()
        if self.x1_only:
            vals = np.repeat(np.asarray(self.func(grid.x1))[:, None], grid.n2, axis=1)
        else:
            vals = self.func(X1, X2)
        return ScalarField(self.chart, self.func, self.name, self.x1_only, grid, np.asarray(vals, dtype=float), dict(self.meta))


# ---------------------------------------------------------------------------
# Killing-field quantities


def gaussian_curvature(chart: CylindricalChart, x1):
    """K = -sigma_i^{-2} (log sigma_i)''."""
    s, _, d2 = chart.log_sigma_derivs(x1)
    return -d2 / (s * s)


def killing_speed(chart: CylindricalChart, x1, x2=None):
    return (TWO_PI / chart.tau) * chart.sigma(x1)


def killing_pressure(chart: CylindricalChart, x1, x2=None, rho0: float = 1.0, p0: float = 0.0):
    """Bernoulli pressure p0 + (rho0 / 2)|X|^2 of the steady Killing flow."""
    if not rho0 > 0:
        raise ValueError("rho0 must be positive")
    v = killing_speed(chart, x1)
    return p0 + 0.5 * rho0 * v * v


def vorticity(chart: CylindricalChart, x1, x2=None):
    """omega = d/dx1 log|X|^2 in units where X = (2 pi / tau) d/dx2; equals 2 (log sigma_i)' at tau = 2 pi."""
    return (TWO_PI / chart.tau) * 2.0 * chart.dlog_sigma(x1)


def curvature_field(chart):
    return ScalarField(chart, lambda x1: gaussian_curvature(chart, x1), "K", x1_only=True)


def speed_field(chart):
    return ScalarField(chart, lambda x1: killing_speed(chart, x1), "speed", x1_only=True)


def pressure_field(chart, rho0=1.0, p0=0.0):
    return ScalarField(chart, lambda x1: killing_pressure(chart, x1, rho0=rho0, p0=p0), "pressure", x1_only=True, meta={"rho0": rho0, "p0": p0})


def vorticity_field(chart):
    return ScalarField(chart, lambda x1: vorticity(chart, x1), "vorticity", x1_only=True)


# ---------------------------------------------------------------------------
# potential flows


def cauchy_riemann_residual(func, x, y, h=CR_STEP):
    """|d_x F + i d_y F| / max(1, |d_x F|) by central differences; zero for holomorphic F."""
    dx = (func(x + h, y) - func(x - h, y)) / (2 * h)
    dy = (func(x, y + h) - func(x, y - h)) / (2 * h)
    return np.abs(dx + 1j * dy) / np.maximum(1.0, np.abs(dx))


def potential_speed(chart: CylindricalChart, dw, x1, x2, convention: str = "chart", z_of=None, check: bool = True):
    """|X_pot| for the complex potential w with derivative dw.

    convention "chart": dw(x1, x2) is dw/dzeta at zeta = x1 + i x2, and |X_pot| = |dw| / sigma_i.
    convention "z": dw(z) is dw/dz in z = exp(-zeta), and |X_pot| = |dw| e^{-x1} / sigma_i.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if convention == "chart":
        F = lambda a, b: np.asarray(dw(a, b), dtype=complex)
        if check and np.any(cauchy_riemann_residual(F, x1, x2) > CR_TOL):
            raise NonHolomorphic("dw fails the Cauchy-Riemann check")
        mag = np.abs(F(x1, x2))
    elif convention == "z":
        z = np.exp(-x1 - 1j * x2) if z_of is None else z_of(x1, x2)
        if check:
            G = lambda a, b: np.asarray(dw(a + 1j * b), dtype=complex)
            if np.any(cauchy_riemann_residual(G, z.real, z.imag) > CR_TOL):
                raise NonHolomorphic("dw fails the Cauchy-Riemann check")
        mag = np.abs(np.asarray(dw(z), dtype=complex)) * np.exp(-x1)
    else:
        raise ValueError("convention must be 'chart' or 'z'")
    return mag / chart.sigma(x1)


# ---------------------------------------------------------------------------
# convolution with the Green's function


def _cell_avg_log(a, b):
    """Mean of log|zeta| over the a x b rectangle centred at the origin."""
    A, B = 0.5 * a, 0.5 * b
    F = A * B * (math.log(A * A + B * B) - 3.0) + A * A * math.atan(B / A) + B * B * math.atan(A / B)
    return 0.5 * F / (A * B)


def convolve_curvature(ev, chart: CylindricalChart, grid: Grid, tail_tol: float = 1e-3) -> ScalarField:
    """(G * K)(x) = int G(x, y) K(y) dVol(y) by the midpoint rule on `grid`.

    The grid is both the quadrature grid and the target grid. The cell containing the
    source uses the exact cell average of the logarithm plus the regular part. Since K
    and the measure depend on x1 only, each x1 row is computed once and copied along x2.
    For non-closed classes the curvature mass in the outer tenth of the window must be
    below tail_tol times the total, otherwise DivergentConvolution is raised.
    """
    x1, x2 = grid.x1, grid.x2
    h1, h2 = grid.h1, grid.h2
    K = gaussian_curvature(chart, x1)
    w = K * chart.sigma(x1) ** 2 * h1 * h2  # per-cell weight, one per x1 row
    closed_period = chart.x1_period is not None and abs(grid.window[1] - grid.window[0] - chart.x1_period) < 1e-9
    if not closed_period:
        mass = np.abs(w) * grid.n2
        edge = max(1, grid.n1 // 10)
        partial = (float(mass.sum()), float(mass[:edge].sum() + mass[-edge:].sum()))
        if partial[0] > 0 and partial[1] > tail_tol * max(partial[0], 1e-300):
            raise DivergentConvolution("curvature mass does not decay inside the window", partial_sums=partial)
    Y1, Y2 = np.meshgrid(x1, x2, indexing="ij")
    y1f, y2f = Y1.ravel(), Y2.ravel()
    wf = np.repeat(w, grid.n2)
    out = np.empty(grid.n1)
    singular_log = _cell_avg_log(h1, h2)
    t2 = x2[0]
    pot = getattr(ev, "potential", None)
    # G = Phi + (V(y) + V(x)) / |M|: the potential part is tabulated once per row
    vrow = pot.V_eff(x1) / pot.area if pot is not None else np.zeros(grid.n1)
    vf = np.repeat(vrow, grid.n2)
    for i, t1 in enumerate(x1):
        src = np.ones(y1f.size, dtype=bool)
        src[i * grid.n2] = False  # the cell at (t1, t2)
        g = ev.phi(y1f[src], y2f[src], t1, t2) + vf[src] + vrow[i]
        acc = float(np.dot(g, wf[src]))
        reg = float(ev.regular_part_chart(t1, t2, t1, t2))
        acc += (reg - singular_log / TWO_PI) * w[i]
        out[i] = acc
    vals = np.repeat(out[:, None], grid.n2, axis=1)
    table_x1 = x1.copy()

    def interp(a, b=None):
        return np.interp(a, table_x1, out)

    return ScalarField(chart, interp, "convolution", x1_only=True, grid=grid, values=vals, meta={"n1": grid.n1, "n2": grid.n2})


def gauss_bonnet_integral(chart: CylindricalChart, grid: Grid) -> float:
    """Midpoint-rule value of int K dVol over the grid window."""
    K = gaussian_curvature(chart, grid.x1)
    return float(np.sum(K * chart.sigma(grid.x1) ** 2) * grid.h1 * grid.h2 * grid.n2)
