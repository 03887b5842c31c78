"""Numerical oracles: finite-difference Laplace-Beltrami, circulations, symmetry, ends, lattice.

Every oracle treats the Green's function as a black box `G(x1, x2, y1, y2)`; an object
with a `greens` method is accepted as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import OutOfWindow
from .surface import TWO_PI


# Five-point stencils on log|x - x0| carry a truncation error of about h^2 / (2 pi r^4);
# at h = 1e-3 this stays below 1e-5 once r >= 0.4.
EXCLUSION_RADIUS = 0.4


def _as_fn(green) -> Callable:
    return green.greens if hasattr(green, "greens") else green


def _require_window(chart, x1_values):
    if chart is None:
        return
    lo, hi = chart.x1_lo, chart.x1_hi
    if chart.x1_period is not None:
        return
    x = np.asarray(x1_values, dtype=float)
    if np.any(x < lo) or np.any(x > hi):
        raise OutOfWindow(f"stencil leaves the chart window [{lo:.6g}, {hi:.6g}]")


def fd_laplace_beltrami(field, chart, x1, x2, h=1e-3, sigma=None):
    """sigma^{-2} (five-point flat Laplacian) of field(x1, x2); chart supplies sigma_i and the window.

    With chart=None a flat metric (or the explicit `sigma` callable) is used.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    _require_window(chart, [np.min(x1) - h, np.max(x1) + h])
    c = field(x1, x2)
    lap = (field(x1 + h, x2) + field(x1 - h, x2) + field(x1, x2 + h) + field(x1, x2 - h) - 4.0 * c) / (h * h)
    if chart is not None:
        s = chart.sigma(x1)
    elif sigma is not None:
        s = sigma(x1)
    else:
        s = 1.0
    return lap / (s * s)


def _normal_derivative(fn, x1, x2, nx, ny, delta):
    """Fourth-order central difference of fn along the unit direction (nx, ny)."""
    f = lambda t: fn(x1 + t * nx, x2 + t * ny)
    return (-f(2 * delta) + 8 * f(delta) - 8 * f(-delta) + f(-2 * delta)) / (12.0 * delta)


def circulation(green, x0, eps=1e-2, n_samples=1024, chart=None):
    """-(contour integral of dG/dn) over the chart circle |x - x0| = eps, counterclockwise.

    Conformal invariance makes the flat-chart flux equal to the metric flux.
    """
    G = _as_fn(green)
    y1, y2 = x0
    _require_window(chart, [y1 - 1.1 * eps, y1 + 1.1 * eps])
    t = TWO_PI * np.arange(n_samples) / n_samples
    nx, ny = np.cos(t), np.sin(t)
    px, py = y1 + eps * nx, y2 + eps * ny
    fn = lambda a, b: G(a, b, y1, y2)
    dn = _normal_derivative(fn, px, py, nx, ny, eps / 100.0)
    return float(-np.sum(dn) * eps * TWO_PI / n_samples)


def disc_area(chart, x0, eps, n=64):
    """Metric area of the chart disc |x - x0| <= eps (Gauss-Legendre in radius, uniform in angle)."""
    r, wr = np.polynomial.legendre.leggauss(n)
    r = 0.5 * eps * (r + 1.0)
    wr = 0.5 * eps * wr
    t = TWO_PI * np.arange(2 * n) / (2 * n)
    R, T = np.meshgrid(r, t, indexing="ij")
    s = chart.sigma(x0[0] + R * np.cos(T))
    return float(np.sum((s * s * R) * wr[:, None]) * TWO_PI / (2 * n))


def end_circulation(green, x0, x1_line, toward, n_samples=1024, delta=1e-4):
    """Flux -int dG/dn dx2 over the line x1 = x1_line, x2 in [0, 2 pi), with n pointing along
    +x1 (toward = +1) or -x1 (toward = -1), i.e. into the end being encircled."""
    G = _as_fn(green)
    y1, y2 = x0
    t = TWO_PI * (np.arange(n_samples) + 0.5) / n_samples
    xs = np.full_like(t, float(x1_line))
    fn = lambda a, b: G(a, b, y1, y2)
    dn = _normal_derivative(fn, xs, t, float(toward), 0.0, delta)
    return float(-np.sum(dn) * TWO_PI / n_samples)


def symmetry_residual(green, pairs):
    """max |G(x, x0) - G(x0, x)| over pairs given as an (n, 4) array (x1, x2, y1, y2)."""
    G = _as_fn(green)
    p = np.asarray(pairs, dtype=float)
    a = G(p[:, 0], p[:, 1], p[:, 2], p[:, 3])
    b = G(p[:, 2], p[:, 3], p[:, 0], p[:, 1])
    return float(np.max(np.abs(a - b)))


def lattice_residual(green, pairs, lattice, shifts=((1, 0), (0, 1), (2, -1), (-3, 2))):
    """max |G(x + k v, x0 + k0 v) - G(x, x0)| for the lattice vector v = (dx1, dx2) and x2 period 2 pi."""
    G = _as_fn(green)
    p = np.asarray(pairs, dtype=float)
    base = G(p[:, 0], p[:, 1], p[:, 2], p[:, 3])
    L, th = lattice
    worst = 0.0
    for k, k0 in shifts:
        moved = G(p[:, 0] + k * L, p[:, 1] + k * th + TWO_PI * k0, p[:, 2] + k0 * L, p[:, 3] + k0 * th - TWO_PI * k)
        worst = max(worst, float(np.max(np.abs(moved - base))))
    return worst


@dataclass(frozen=True)
class EndReport:
    kind: str  # parabolic | hyperbolic
    limit: float
    deviation: float
    passed: bool
    values: tuple = ()


def end_behavior(green, x0, kind, samples, gamma=0.0, tol=1e-5):
    """Check an end of the surface.

    parabolic: samples are x1 values increasing toward |z| -> 0 on the ray x2 = 0; the
    quantity G - (gamma / 2 pi) log|z| (log|z| = -x1) must settle (Cauchy) within tol.
    hyperbolic: samples are x2 values on a boundary line x1 = const given as
    (x1_line, x2_values); the oscillation of G must stay below tol.
    """
    G = _as_fn(green)
    y1, y2 = x0
    if kind == "parabolic":
        xs = np.asarray(samples, dtype=float)
        vals = G(xs, np.zeros_like(xs), y1, y2) + gamma * xs / TWO_PI
        diffs = np.abs(np.diff(vals))
        dev = float(diffs[-1]) if diffs.size else 0.0
        return EndReport(kind, float(vals[-1]), dev, dev < tol, tuple(map(float, vals)))
    if kind == "hyperbolic":
        x1_line, x2s = samples
        x2s = np.asarray(x2s, dtype=float)
        vals = G(np.full_like(x2s, float(x1_line)), x2s, y1, y2)
        dev = float(np.max(vals) - np.min(vals))
        return EndReport(kind, float(np.mean(vals)), dev, dev < tol, tuple(map(float, vals)))
    raise ValueError("kind must be 'parabolic' or 'hyperbolic'")


# ---------------------------------------------------------------------------
# reports


@dataclass
class VerificationReport:
    """Named residuals, each stored with the tolerance it was compared against."""

    entries: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def add(self, check_id: str, residual: float, tol: float):
        residual = float(residual)
        ok = bool(np.isfinite(residual) and residual <= tol)
        self.entries.append((check_id, residual, float(tol), ok))
        return ok

    @property
    def passed(self):
        return all(e[3] for e in self.entries)

    def failures(self):
        return [e[0] for e in self.entries if not e[3]]

    def to_text(self) -> str:
        lines = [f"{k} = {v}" for k, v in sorted(self.meta.items())]
        for cid, res, tol, ok in self.entries:
            lines.append(f"{cid}.residual = {res:.6e}")
            lines.append(f"{cid}.tol = {tol:.3e}")
            lines.append(f"{cid}.status = {'pass' if ok else 'fail'}")
        lines.append(f"overall = {'pass' if self.passed else 'fail'}")
        return "\n".join(lines) + "\n"


def _sample_points(chart, rng, n, margin=0.5, half_width=4.0):
    lo = chart.x1_lo if chart.x1_period is not None else max(chart.x1_lo + margin, -half_width)
    hi = chart.x1_lo + chart.x1_period if chart.x1_period is not None else min(chart.x1_hi - margin, half_width)
    if hi <= lo:
        lo, hi = chart.x1_lo, chart.x1_hi
    x1 = rng.uniform(lo, hi, n)
    x2 = rng.uniform(0.0, TWO_PI, n)
    return x1, x2


def interior_point(chart) -> float:
    """A representative x1 well inside the chart window."""
    if chart.x1_period is not None:
        return chart.x1_lo + 0.37 * chart.x1_period
    width = chart.x1_hi - chart.x1_lo
    if width < 8.0:
        return chart.x1_lo + 0.37 * width
    return float(np.clip(0.3, chart.x1_lo + 1.0, chart.x1_hi - 1.0))


def run_suite(ev, *, tol: float = 1e-6, seed: int = 0, n_pairs: int = 200, h: float = 1e-3) -> VerificationReport:
    """Run every oracle that applies to the evaluator's class and collect residuals."""
    from .fields import gaussian_curvature, killing_speed  # local: keeps verify free of import cycles

    chart = ev.chart
    cls = ev.cls
    rng = np.random.default_rng(seed)
    rep = VerificationReport(meta={"class": cls.i, "tau": cls.tau, "h": h, "eps": 1e-2, "n_samples": 1024, "seed": seed})
    if cls.rho is not None:
        rep.meta["rho"] = cls.rho
    rep.meta["prime_N"] = ev.prime.N
    G = ev.greens

    a1, a2 = _sample_points(chart, rng, n_pairs)
    b1, b2 = _sample_points(chart, rng, n_pairs)
    keep = np.hypot(a1 - b1, a2 - b2) > 1e-3
    pairs = np.column_stack([a1, a2, b1, b2])[keep]
    rep.add("symmetry", symmetry_residual(G, pairs), 1e-10)

    # delta normalization at an interior point
    x0 = (interior_point(chart), 1.1)
    circ = circulation(G, x0, 1e-2, 1024, chart)
    if ev.area is not None:
        circ += disc_area(chart, x0, 1e-2) / ev.area
    rep.add("circulation", abs(circ - 1.0), tol)

    # harmonicity of G away from the source (closed classes: -Lap G = -1/|M|)
    p1, p2 = _sample_points(chart, rng, 20, margin=0.5)
    far = np.hypot(p1 - x0[0], p2 - x0[1]) > EXCLUSION_RADIUS
    p1, p2 = p1[far], p2[far]
    fld = lambda a, b: G(a, b, x0[0], x0[1])
    lap = fd_laplace_beltrami(fld, chart, p1, p2, h)
    target = 1.0 / ev.area if ev.area is not None else 0.0
    rep.add("harmonicity", float(np.max(np.abs(lap - target))), 1e-4)

    # curvature-speed formula
    q1, _ = _sample_points(chart, rng, 20, margin=0.5)
    logspeed = lambda a, b: np.log(killing_speed(chart, a)) + 0.0 * b
    lap_s = fd_laplace_beltrami(logspeed, chart, q1, np.zeros_like(q1), h)
    rep.add("curvature_speed", float(np.max(np.abs(-lap_s - gaussian_curvature(chart, q1)))), 1e-4)

    if cls.i == 3:
        rep.add("lattice", lattice_residual(G, pairs, ev.lattice), 1e-9)
    if cls.i in (1, 2, 5, 8, 10) and not cls.translational:
        x2s = np.linspace(0.0, TWO_PI, 257)
        rep.add("boundary_outer", end_behavior(G, x0, "hyperbolic", (0.0, x2s)).deviation, tol)
        if cls.i in (2, 10) and chart.x1_period is None:
            rep.add("boundary_inner", end_behavior(G, x0, "hyperbolic", (chart.x1_hi, x2s)).deviation, tol)
    if cls.i in (6, 7, 9) and not cls.translational:
        gam = cls.gamma_end or 0.0
        inner = end_circulation(G, x0, min(chart.x1_hi, 30.0), +1)
        rep.add("circulation_inner_end", abs(inner - gam), tol)
    return rep
