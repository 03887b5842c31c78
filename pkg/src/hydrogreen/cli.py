"""Command line: hydrogreen {chart,green,field,verify} --spec FILE [options]."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from . import export
from .chart import chart_for_spec
from .errors import HydroGreenError, OutOfWindow
from .fields import (
    Grid,
    convolve_curvature,
    curvature_field,
    default_window,
    pressure_field,
    speed_field,
    vorticity_field,
)
from .greens import GreensEvaluator
from .specfile import load_spec
from .surface import validate_class
from .verify import interior_point, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
FIELDS = ("K", "speed", "pressure", "vorticity", "convolution")
VALUE_FLAGS = ("--window", "--x0", "--gamma-end", "--p0", "--tol", "--prime-tol", "--rho0")


@dataclass(frozen=True)
class RunConfig:
    spec: Path
    command: str
    grid: tuple = (64, 64)
    window: Optional[tuple] = None
    x0: Optional[tuple] = None
    out: Optional[Path] = None
    tol: float = 1e-6
    prime_tol: float = 1e-12
    gamma_end: Optional[float] = None
    which: Optional[str] = None
    rho0: float = 1.0
    p0: float = 0.0
    rows: int = 201


def _pair(text, n, conv=float, sep=","):
    parts = text.split(sep)
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"expected {n} values separated by {sep!r}, got {text!r}")
    try:
        return tuple(conv(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _grid(text):
    g = _pair(text.lower(), 2, int, "x")
    if min(g) < 2:
        raise argparse.ArgumentTypeError("grid counts must be at least 2")
    return g


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, type=Path, help="surface description file")
    common.add_argument("--out", type=Path, help="output file (default: standard output)")
    common.add_argument("--grid", type=_grid, default=(64, 64), help="N1xN2 grid (default 64x64)")
    common.add_argument("--window", type=lambda t: _pair(t, 4), help="a,b,c,d: x1 in [a,b], x2 in [c,d]")
    common.add_argument("--x0", type=lambda t: _pair(t, 2), help="source point u,v in chart coordinates")
    common.add_argument("--tol", type=float, default=1e-6, help="verification tolerance for circulations and boundaries")
    common.add_argument("--prime-tol", type=float, default=1e-12, help="prime-function truncation accuracy")
    common.add_argument("--gamma-end", type=float, help="end circulation for classes 6, 7, 9, 11, 12")

    p = argparse.ArgumentParser(prog="hydrogreen", description="Cylindrical charts and hydrodynamic Green's functions of Killing-symmetric surfaces.")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("chart", parents=[common], help="tabulate (s, x1, sigma_i)")
    c.add_argument("--rows", type=int, default=201, help="number of table rows")
    sub.add_parser("green", parents=[common], help="grid of G(., x0)")
    f = sub.add_parser("field", parents=[common], help="grid of a scalar field")
    f.add_argument("which", choices=FIELDS)
    f.add_argument("--rho0", type=float, default=1.0, help="fluid density for the pressure field")
    f.add_argument("--p0", type=float, default=0.0, help="pressure constant")
    sub.add_parser("verify", parents=[common], help="run the oracle suite; exit 1 on failure")
    return p


def config_from_args(ns) -> RunConfig:
    return RunConfig(
        spec=ns.spec,
        command=ns.command,
        grid=ns.grid,
        window=ns.window,
        x0=ns.x0,
        out=ns.out,
        tol=ns.tol,
        prime_tol=ns.prime_tol,
        gamma_end=ns.gamma_end,
        which=getattr(ns, "which", None),
        rho0=getattr(ns, "rho0", 1.0),
        p0=getattr(ns, "p0", 0.0),
        rows=getattr(ns, "rows", 201),
    )


def _load(cfg: RunConfig):
    spec = load_spec(cfg.spec)
    if cfg.gamma_end is not None:
        spec = replace(spec, cls=replace(spec.cls, gamma_end=cfg.gamma_end))
    chart = chart_for_spec(spec)
    return spec, chart


def _grid_of(cfg, chart):
    win = cfg.window or default_window(chart)
    if chart.x1_period is None and (win[0] < chart.x1_lo or win[1] > chart.x1_hi):
        raise OutOfWindow(f"window x1 range [{win[0]:.6g}, {win[1]:.6g}] leaves the chart window [{chart.x1_lo:.6g}, {chart.x1_hi:.6g}]")
    return Grid(cfg.grid[0], cfg.grid[1], win)


def _x0_of(cfg, chart):
    return cfg.x0 if cfg.x0 is not None else (interior_point(chart), 0.0)


def cmd_chart(cfg: RunConfig):
    """Returns (csv text, summary lines)."""
    spec, chart = _load(cfg)
    ev = GreensEvaluator.build(chart, spec.cls, cfg.prime_tol) if spec.cls.i in (0, 3) else None
    area = ev.area if ev is not None else None
    text = export.chart_csv(chart, cfg.rows, area)
    summary = [f"class = {chart.cls.i}", f"tau = {chart.tau:.17g}"]
    if chart.rho is not None:
        summary.append(f"rho = {chart.rho:.17g}")
        summary.append(f"modulus = {chart.modulus:.17g}")
    if area is not None:
        summary.append(f"area = {area:.17g}")
    for d in validate_class(spec):
        summary.append(f"diagnostic {d.code}: {d.message}")
    return text, summary


def cmd_green(cfg: RunConfig):
    spec, chart = _load(cfg)
    ev = GreensEvaluator.build(chart, spec.cls, cfg.prime_tol)
    return export.green_csv(ev, _x0_of(cfg, chart), _grid_of(cfg, chart)), []


def cmd_field(cfg: RunConfig):
    spec, chart = _load(cfg)
    grid = _grid_of(cfg, chart)
    which = cfg.which
    if which == "convolution":
        ev = GreensEvaluator.build(chart, spec.cls, cfg.prime_tol)
        fld = convolve_curvature(ev, chart, grid)
    else:
        fld = {
            "K": lambda: curvature_field(chart),
            "speed": lambda: speed_field(chart),
            "pressure": lambda: pressure_field(chart, cfg.rho0, cfg.p0),
            "vorticity": lambda: vorticity_field(chart),
        }[which]()
    return export.field_csv(fld, grid), []


def cmd_verify(cfg: RunConfig):
    spec, chart = _load(cfg)
    ev = GreensEvaluator.build(chart, spec.cls, cfg.prime_tol)
    rep = run_suite(ev, tol=cfg.tol)
    diags = validate_class(spec)
    for d in diags:
        rep.add(f"class_check.{d.code}", 1.0, 0.0)
    return rep.to_text(), rep


COMMANDS = {"chart": cmd_chart, "green": cmd_green, "field": cmd_field, "verify": cmd_verify}


def _emit(text, out):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _join_negative_values(argv):
    """Turn `--window -1,1,0,2` into `--window=-1,1,0,2` so argparse keeps the value."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is not None and nxt.startswith("-"):
                out.append(f"{tok}={nxt}")
                continue
            out.append(tok)
            if nxt is not None:
                out.append(nxt)
            continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        ns = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = config_from_args(ns)
    try:
        text, extra = COMMANDS[cfg.command](cfg)
    except (HydroGreenError, ValueError, OSError) as exc:
        print(f"hydrogreen: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(text, cfg.out)
    if cfg.command == "verify":
        return EXIT_OK if extra.passed else EXIT_FAIL
    stream = sys.stdout if cfg.out is not None else sys.stderr
    for line in extra:
        print(line, file=stream)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
