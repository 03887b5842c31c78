"""Reader for surface description files.

Grammar (line based, UTF-8)::

    # comment                        anywhere; blank lines are ignored
    key = value                      scalar entry, keys are dotted names
    [block.name]                     starts a numeric table; rows follow
    1.0, 2.0, 3.0                    a table row, comma and/or whitespace separated

A table ends at the next `key = value` line or `[block]` header.

Recognised keys:

    kind                 revolution | radial | warped
    class.i              integer 0..12 (required)
    class.tau            positive real, default 2 pi (must stay 2 pi for revolution)
    class.rho            real in (0, 1)          classes 2, 3, 8, 10
    class.gamma_end      real                    classes 6, 7, 9, 11, 12
    class.varpi          real in [0, tau)        class 3
    class.translational  true | false

    generatrix.primitive sphere | torus | cylinder | catenoid | cone | plane | disc
    generatrix.<param>   keyword argument of the primitive (e.g. generatrix.R = 1.4142)
    generatrix.closed    true | false (samples only; detected when omitted)
    [generatrix.samples] rows theta, R1, R2

    sigma.primitive      flat | sphere | hyperbolic | inv_r
    sigma.<param>        keyword argument of the primitive (e.g. sigma.r_lo = 0.3)
    sigma.r_lo, sigma.r_hi   radial range for sampled factors
    [sigma.samples]      rows r, sigma

    profile.a            positive real (default 1)
    profile.s_base       base parameter (default: first sample)
    profile.closed       true | false
    profile.constant     c: constant profile f = c on [profile.lo, profile.hi]
    [profile.samples]    rows s, f

    name                 free text label
"""
from __future__ import annotations

import math
import re
from pathlib import Path

import numpy as np

from ._smooth import Smooth1D
from .errors import HydroGreenError, SpecParseError
from .surface import (
    GENERATRIX_PRIMITIVES,
    RADIAL_PRIMITIVES,
    TWO_PI,
    SurfaceClassIndex,
    SurfaceSpec,
    WarpedProfile,
    generatrix_from_samples,
    profile_from_samples,
    radial_from_samples,
)

_HEADER = re.compile(r"^\[([A-Za-z_][\w.]*)\]$")
_ENTRY = re.compile(r"^([A-Za-z_][\w.]*)\s*=\s*(.*)$")
_TABLES = {"generatrix.samples": 3, "sigma.samples": 2, "profile.samples": 2}
_CONTROL = {
    "generatrix": {"primitive", "closed", "s_base"},
    "sigma": {"primitive", "r_lo", "r_hi"},
    "profile": {"a", "s_base", "closed", "constant", "lo", "hi"},
}


def _number(text, line, path):
    t = text.strip().lower()
    consts = {"pi": math.pi, "2pi": TWO_PI, "inf": math.inf, "-inf": -math.inf, "+inf": math.inf}
    if t in consts:
        return consts[t]
    try:
        return float(t)
    except ValueError:
        pass
    m = re.fullmatch(r"([-+]?[\d.eE+-]*)\s*\*?\s*pi", t)
    if m:
        coef = m.group(1)
        try:
            return (float(coef) if coef not in ("", "+", "-") else float(coef + "1")) * math.pi
        except ValueError:
            pass
    m = re.fullmatch(r"sqrt\(([\d.eE+-]+)\)", t)
    if m:
        return math.sqrt(float(m.group(1)))
    raise SpecParseError(f"expected a number, got {text.strip()!r}", line, path)


def _bool(text, line, path):
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise SpecParseError(f"expected true/false, got {text.strip()!r}", line, path)


def parse_spec_text(text: str, path=None) -> SurfaceSpec:
    """Parse the contents of a surface description file into a SurfaceSpec."""
    entries = {}  # key -> (value, line)
    tables = {}  # name -> (rows, first line)
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _HEADER.match(line)
        if m:
            name = m.group(1)
            if name not in _TABLES:
                raise SpecParseError(f"unknown table [{name}]", lineno, path)
            if name in tables:
                raise SpecParseError(f"table [{name}] given twice", lineno, path)
            tables[name] = ([], lineno)
            current = name
            continue
        m = _ENTRY.match(line)
        if m:
            key, val = m.group(1), m.group(2).strip()
            if key in entries:
                raise SpecParseError(f"key {key!r} given twice", lineno, path)
            entries[key] = (val, lineno)
            current = None
            continue
        if current is None:
            raise SpecParseError(f"cannot parse line {raw.strip()!r}", lineno, path)
        cells = [c for c in re.split(r"[,\s]+", line) if c]
        if len(cells) != _TABLES[current]:
            raise SpecParseError(f"[{current}] rows need {_TABLES[current]} columns, got {len(cells)}", lineno, path)
        tables[current][0].append([_number(c, lineno, path) for c in cells])

    def get(key, conv=None, default=None, required=False):
        if key not in entries:
            if required:
                raise SpecParseError(f"missing required key {key!r}", None, path)
            return default
        val, ln = entries[key]
        if conv is None:
            return val
        return conv(val, ln, path)

    kind = get("kind", required=True).lower()
    if kind not in ("revolution", "radial", "warped"):
        raise SpecParseError(f"unknown kind {kind!r}", entries["kind"][1], path)

    def as_int(v, ln, p):
        try:
            return int(v)
        except ValueError as exc:
            raise SpecParseError(f"expected an integer, got {v!r}", ln, p) from exc

    try:
        cls = SurfaceClassIndex(
            i=get("class.i", as_int, required=True),
            tau=get("class.tau", _number, TWO_PI),
            rho=get("class.rho", _number),
            gamma_end=get("class.gamma_end", _number),
            varpi=get("class.varpi", _number),
            translational=get("class.translational", _bool, False),
        )
    except SpecParseError:
        raise
    except HydroGreenError as exc:
        raise SpecParseError(str(exc), entries.get("class.i", (None, None))[1], path) from exc

    prefix = {"revolution": "generatrix", "radial": "sigma", "warped": "profile"}[kind]
    for key, (_, ln) in entries.items():
        head = key.split(".", 1)[0]
        if head in _CONTROL and head != prefix:
            raise SpecParseError(f"key {key!r} does not belong to kind {kind!r}", ln, path)
    params = {
        k.split(".", 1)[1]: get(k, _number)
        for k in entries
        if k.startswith(prefix + ".") and k.split(".", 1)[1] not in _CONTROL[prefix]
    }
    table = tables.get(prefix + ".samples")
    primitive = get(prefix + ".primitive")
    name = get("name", default=primitive or "samples")

    try:
        payload = _build_payload(kind, prefix, primitive, params, table, get, path, entries)
        spec = SurfaceSpec(kind, payload, cls, meta={"name": name, "path": str(path) if path else None})
    except SpecParseError:
        raise
    except (HydroGreenError, ValueError, TypeError) as exc:
        ln = (entries.get(prefix + ".primitive") or (None, table[1] if table else None))[1]
        raise SpecParseError(str(exc), ln, path) from exc
    return spec


def _build_payload(kind, prefix, primitive, params, table, get, path, entries):
    if primitive is not None and table is not None:
        raise SpecParseError(f"give either {prefix}.primitive or [{prefix}.samples], not both", table[1], path)
    if kind == "revolution":
        if primitive is not None:
            if primitive not in GENERATRIX_PRIMITIVES:
                raise SpecParseError(f"unknown generatrix primitive {primitive!r}", entries[prefix + ".primitive"][1], path)
            return GENERATRIX_PRIMITIVES[primitive](**params)
        rows = _rows(table, prefix, path)
        return generatrix_from_samples(rows[:, 0], rows[:, 1], rows[:, 2], closed=get("generatrix.closed", _bool), s_base=get("generatrix.s_base", _number))
    if kind == "radial":
        if primitive is not None:
            if primitive not in RADIAL_PRIMITIVES:
                raise SpecParseError(f"unknown sigma primitive {primitive!r}", entries[prefix + ".primitive"][1], path)
            extra = {k: get("sigma." + k, _number) for k in ("r_lo", "r_hi") if "sigma." + k in entries}
            return RADIAL_PRIMITIVES[primitive](**params, **extra)
        rows = _rows(table, prefix, path)
        return radial_from_samples(rows[:, 0], rows[:, 1], get("sigma.r_lo", _number), get("sigma.r_hi", _number))
    a = get("profile.a", _number, 1.0)
    closed = get("profile.closed", _bool, False)
    const = get("profile.constant", _number)
    if const is not None:
        lo = get("profile.lo", _number, -math.inf)
        hi = get("profile.hi", _number, math.inf)
        base = get("profile.s_base", _number, lo if math.isfinite(lo) else 0.0)
        f = Smooth1D.constant(const, lo, hi)
        if closed:
            f = Smooth1D(f.f, f.df, f.d2f, lo, hi, period=hi - lo)
        return WarpedProfile(a, f, base, closed)
    rows = _rows(table, prefix, path)
    return profile_from_samples(rows[:, 0], rows[:, 1], a=a, s_base=get("profile.s_base", _number), closed=closed)


def _rows(table, prefix, path):
    if table is None:
        raise SpecParseError(f"kind needs {prefix}.primitive or a [{prefix}.samples] table", None, path)
    rows, ln = table
    if len(rows) < 4:
        raise SpecParseError(f"[{prefix}.samples] needs at least 4 rows", ln, path)
    return np.asarray(rows, dtype=float)


def load_spec(path) -> SurfaceSpec:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecParseError(f"cannot read file: {exc.strerror}", None, p) from exc
    return parse_spec_text(text, p)
