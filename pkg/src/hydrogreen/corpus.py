"""Analytic test surfaces, one or more per class index."""
from __future__ import annotations

import math

from ._smooth import Smooth1D
from .surface import (
    SurfaceClassIndex,
    SurfaceSpec,
    WarpedProfile,
    disc_generatrix,
    flat_factor,
    hyperbolic_factor,
    inverse_radius_factor,
    sphere_generatrix,
    torus_generatrix,
)

ANNULUS_RHO = 0.3


def _strip_profile(width=math.pi):
    return WarpedProfile(1.0, Smooth1D.constant(1.0, 0.0, width), 0.0)


def corpus() -> dict:
    """name -> SurfaceSpec for the bundled analytic surfaces (all 13 classes)."""
    C = SurfaceClassIndex
    return {
        "sphere": SurfaceSpec("revolution", sphere_generatrix(), C(0)),
        "disc": SurfaceSpec("revolution", disc_generatrix(1.0), C(1)),
        "annulus": SurfaceSpec("revolution", disc_generatrix(1.0, ANNULUS_RHO), C(2)),
        "torus": SurfaceSpec("revolution", torus_generatrix(), C(3)),
        "plane": SurfaceSpec("radial", flat_factor(), C(4)),
        "hyperbolic_disc": SurfaceSpec("radial", hyperbolic_factor(), C(5)),
        "flat_cylinder": SurfaceSpec("radial", inverse_radius_factor(), C(6)),
        "punctured_open_disc": SurfaceSpec("radial", flat_factor(0.0, 1.0), C(7, gamma_end=0.3)),
        "open_annulus": SurfaceSpec("radial", flat_factor(ANNULUS_RHO, 1.0), C(8, rho=ANNULUS_RHO)),
        "punctured_disc": SurfaceSpec("radial", flat_factor(0.0, 1.0), C(9, gamma_end=0.2)),
        "semi_annulus": SurfaceSpec("radial", flat_factor(ANNULUS_RHO, 1.0), C(10, rho=ANNULUS_RHO)),
        "strip": SurfaceSpec("warped", _strip_profile(), C(11, gamma_end=0.25)),
        "semi_strip": SurfaceSpec("warped", _strip_profile(), C(12, gamma_end=0.1)),
    }
