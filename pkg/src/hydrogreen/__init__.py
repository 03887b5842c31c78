"""Cylindrical charts and hydrodynamic Green's functions on surfaces with a Killing symmetry."""
from .chart import CylindricalChart, chart_for_spec, chart_from_profile, cyl_from_polar
from .corpus import corpus
from .errors import AccuracyDegraded, HydroGreenError, SpecParseError
from .fields import (
    Grid,
    ScalarField,
    convolve_curvature,
    curvature_field,
    gauss_bonnet_integral,
    gaussian_curvature,
    killing_pressure,
    killing_speed,
    potential_speed,
    pressure_field,
    speed_field,
    vorticity,
    vorticity_field,
)
from .geodesic import geodesic_rhs, horizontal_geodesic, integrate_geodesic, meridian_of_revolution
from .greens import GreensEvaluator, greens, metric_potential, phi, robin_part
from .prime import PrimeFunction, log_abs_prime, prime_eval, truncation_order
from .specfile import load_spec, parse_spec_text
from .surface import (
    Generatrix,
    RadialConformalFactor,
    SurfaceClassIndex,
    SurfaceSpec,
    WarpedProfile,
    arc_length_normalize,
    validate_class,
)
from .verify import VerificationReport, circulation, fd_laplace_beltrami, run_suite

__version__ = "0.1.0"

__all__ = [
    "AccuracyDegraded",
    "CylindricalChart",
    "Generatrix",
    "GreensEvaluator",
    "Grid",
    "HydroGreenError",
    "PrimeFunction",
    "RadialConformalFactor",
    "ScalarField",
    "SpecParseError",
    "SurfaceClassIndex",
    "SurfaceSpec",
    "VerificationReport",
    "WarpedProfile",
    "arc_length_normalize",
    "chart_for_spec",
    "chart_from_profile",
    "circulation",
    "convolve_curvature",
    "corpus",
    "curvature_field",
    "cyl_from_polar",
    "fd_laplace_beltrami",
    "gauss_bonnet_integral",
    "gaussian_curvature",
    "geodesic_rhs",
    "greens",
    "horizontal_geodesic",
    "integrate_geodesic",
    "killing_pressure",
    "killing_speed",
    "load_spec",
    "log_abs_prime",
    "meridian_of_revolution",
    "metric_potential",
    "parse_spec_text",
    "phi",
    "potential_speed",
    "pressure_field",
    "prime_eval",
    "robin_part",
    "run_suite",
    "speed_field",
    "truncation_order",
    "validate_class",
    "vorticity",
    "vorticity_field",
]
