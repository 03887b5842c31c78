"""CSV and report writers shared by the library and the command line."""
from __future__ import annotations

import io
import math

import numpy as np

from .surface import TWO_PI

FMT = "%.17g"


def _header(meta: dict) -> str:
    return "".join(f"# {k} = {v}\n" for k, v in meta.items())


def _fmt(v) -> str:
    v = float(v)
    return "nan" if not math.isfinite(v) else FMT % v


def chart_metadata(chart, area=None) -> dict:
    c = chart.cls
    meta = {"class": c.i, "tau": FMT % c.tau}
    if c.rho is not None:
        meta["rho"] = FMT % c.rho
    if chart.modulus is not None:
        meta["modulus"] = FMT % chart.modulus
    if c.gamma_end is not None:
        meta["gamma_end"] = FMT % c.gamma_end
    if c.varpi is not None:
        meta["varpi"] = FMT % c.varpi
    meta["translational"] = str(c.translational).lower()
    meta["base_offset"] = FMT % chart.base_offset
    meta["x1_window"] = f"{FMT % chart.x1_lo},{FMT % chart.x1_hi}"
    meta["open_ends"] = f"{str(chart.open_lo).lower()},{str(chart.open_hi).lower()}"
    if area is not None:
        meta["area"] = FMT % area
    return meta


def chart_csv(chart, n: int = 201, area=None, window=None) -> str:
    """Table (s, x1, sigma_i) at n equally spaced x1 values across the chart window."""
    lo, hi = (chart.x1_lo, chart.x1_hi) if window is None else window
    x1 = np.linspace(lo, hi, n)
    s = chart.s_of_x1(x1)
    sig = chart.sigma_s(s)
    out = io.StringIO()
    out.write(_header(chart_metadata(chart, area)))
    out.write("s,x1,sigma_i\n")
    for row in zip(s, x1, sig):
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()


def _is_source(ev, X1, X2, x0):
    d1 = X1 - x0[0]
    d2 = np.mod(X2 - x0[1] + math.pi, TWO_PI) - math.pi
    if ev.lattice is not None:
        L, th = ev.lattice
        m = np.round(d1 / L)
        d1 = d1 - m * L
        d2 = np.mod(d2 - m * th + math.pi, TWO_PI) - math.pi
    return np.hypot(d1, d2) < 1e-12


def green_grid(ev, x0, grid):
    """G(., x0) on the grid; the node at the source (if any) is nan."""
    X1, X2 = grid.mesh()
    mask = _is_source(ev, X1, X2, x0) if ev.model.kind in ("rot", "cyl") else np.hypot(X1 - x0[0], X2 - x0[1]) < 1e-12
    vals = np.full(X1.shape, np.nan)
    vals[~mask] = ev.greens(X1[~mask], X2[~mask], x0[0], x0[1])
    return X1, X2, vals


def green_csv(ev, x0, grid) -> str:
    X1, X2, vals = green_grid(ev, x0, grid)
    meta = chart_metadata(ev.chart, ev.area)
    meta["x0"] = f"{FMT % x0[0]},{FMT % x0[1]}"
    meta["prime_N"] = ev.prime.N
    meta["grid"] = f"{grid.n1}x{grid.n2}"
    return _grid_csv(meta, X1, X2, vals, "G")


def field_csv(field, grid, extra_meta=None) -> str:
    f = field.sample(grid) if field.values is None or field.grid != grid else field
    X1, X2 = grid.mesh()
    meta = chart_metadata(field.chart)
    meta["field"] = field.name
    meta["grid"] = f"{grid.n1}x{grid.n2}"
    meta.update(field.meta)
    meta.update(extra_meta or {})
    return _grid_csv(meta, X1, X2, f.values, field.name)


def _grid_csv(meta, X1, X2, vals, name) -> str:
    out = io.StringIO()
    out.write(_header(meta))
    out.write(f"x1,x2,{name}\n")
    for a, b, v in zip(X1.ravel(), X2.ravel(), vals.ravel()):
        out.write(f"{_fmt(a)},{_fmt(b)},{_fmt(v)}\n")
    return out.getvalue()


def trajectory_csv(traj) -> str:
    out = io.StringIO()
    out.write(f"# h = {FMT % traj.h}\n# reason = {traj.reason}\n")
    out.write("s,x1,x2,v1,v2\n")
    for row in traj.to_csv_rows():
        out.write(",".join(_fmt(v) for v in row) + "\n")
    return out.getvalue()
