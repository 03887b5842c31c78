import math

import numpy as np
import pytest

from hydrogreen._smooth import Smooth1D
from hydrogreen.chart import chart_from_profile
from hydrogreen.errors import DivergentConvolution, NonHolomorphic
from hydrogreen.fields import (
    Grid,
    convolve_curvature,
    curvature_field,
    default_window,
    gaussian_curvature,
    killing_pressure,
    killing_speed,
    potential_speed,
    pressure_field,
    vorticity,
    vorticity_field,
)
from hydrogreen.greens import GreensEvaluator
from hydrogreen.surface import SurfaceClassIndex, WarpedProfile
from hydrogreen.verify import fd_laplace_beltrami

C = SurfaceClassIndex


def _flat_torus(c=1.3, L=4.0):
    f = Smooth1D.constant(c, 0.0, L)
    prof = WarpedProfile(1.0, Smooth1D(f.f, f.df, f.d2f, 0.0, L, period=L), 0.0, closed=True)
    return chart_from_profile(prof, C(3))


class TestCurvature:
    def test_flat_cylinder(self, charts):
        np.testing.assert_allclose(gaussian_curvature(charts["flat_cylinder"], np.linspace(-5, 5, 11)), 0.0, atol=1e-15)

    def test_sphere(self, charts):
        np.testing.assert_allclose(gaussian_curvature(charts["sphere"], np.linspace(-10, 10, 41)), 1.0, atol=1e-6)

    def test_torus_classical(self, charts):
        ch = charts["torus"]
        x = np.linspace(0, ch.x1_period, 40)
        th = ch.s_of_x1(x)
        np.testing.assert_allclose(gaussian_curvature(ch, x), np.cos(th) / (math.sqrt(2) + np.cos(th)), atol=1e-5)

    def test_field_is_x2_independent(self, charts):
        g = Grid(8, 16, (-2, 2, 0, 2 * math.pi))
        vals = curvature_field(charts["torus"]).sample(g).values
        assert np.max(np.ptp(vals, axis=1)) < 1e-12


class TestSpeedPressure:
    def test_speed(self, charts):
        assert float(killing_speed(charts["sphere"], 0.0)) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(killing_speed(charts["flat_cylinder"], np.linspace(-3, 3, 5)), 1.0)
        assert float(killing_speed(charts["torus"], 0.0)) == pytest.approx(math.sqrt(2) + 1, abs=1e-12)

    def test_pressure(self, charts):
        np.testing.assert_allclose(killing_pressure(charts["flat_cylinder"], np.linspace(-3, 3, 5)), 0.5)
        assert float(killing_pressure(charts["sphere"], 0.0, rho0=2.0)) == pytest.approx(1.0, abs=1e-12)
        with pytest.raises(ValueError):
            killing_pressure(charts["sphere"], 0.0, rho0=0.0)

    def test_pressure_monotone_in_speed(self, charts):
        ch = charts["sphere"]
        x = np.linspace(0, 5, 50)  # speed sech x decreases along x
        p = killing_pressure(ch, x, rho0=1.5, p0=-0.3)
        assert np.all(np.diff(p) < 0) and np.all(np.diff(killing_speed(ch, x)) < 0)

    def test_pressure_field_meta(self, charts):
        f = pressure_field(charts["sphere"], 2.0, 0.1)
        assert f.meta == {"rho0": 2.0, "p0": 0.1}


class TestVorticity:
    def test_flat_cylinder(self, charts):
        np.testing.assert_allclose(vorticity(charts["flat_cylinder"], np.linspace(-4, 4, 9)), 0.0, atol=1e-15)

    def test_sphere(self, charts):
        x = np.linspace(-6, 6, 25)
        np.testing.assert_allclose(vorticity(charts["sphere"], x), -2 * np.tanh(x), atol=1e-8)

    def test_constant_iff_flat(self, charts):
        x = np.linspace(-3, 3, 31)
        for name, flat in (("flat_cylinder", True), ("sphere", False)):
            w = vorticity(charts[name], x)
            k = gaussian_curvature(charts[name], x)
            assert (np.ptp(w) < 1e-12) == flat
            assert (np.max(np.abs(k)) < 1e-12) == flat

    def test_field(self, charts):
        g = Grid(4, 4, (-1, 1, 0, 1))
        np.testing.assert_allclose(vorticity_field(charts["flat_cylinder"]).sample(g).values, 0.0, atol=1e-14)


class TestPotentialSpeed:
    def test_uniform_flow_on_plane(self, charts):
        x1 = np.linspace(-2, 2, 9)
        v = potential_speed(charts["plane"], lambda z: np.ones_like(z), x1, 0.3 * np.ones_like(x1), convention="z")
        np.testing.assert_allclose(v, 1.0, atol=1e-12)

    def test_log_flow_on_flat_cylinder(self, charts):
        x1 = np.linspace(-2, 2, 9)
        dw = lambda a, b: np.ones_like(a + 1j * b)  # w = zeta, the chart form of log z
        np.testing.assert_allclose(potential_speed(charts["flat_cylinder"], dw, x1, 0 * x1), 1.0)

    def test_sphere_translation_potential(self, charts):
        ch = charts["sphere"]
        x1 = np.linspace(-2, 2, 9)
        f = lambda a, b: np.log(potential_speed(ch, lambda p, q: np.ones_like(p + 1j * q), a, b, check=False))
        lap = fd_laplace_beltrami(f, ch, x1, 0 * x1, 1e-3)
        np.testing.assert_allclose(-lap, -gaussian_curvature(ch, x1), atol=1e-4)

    def test_non_holomorphic(self, charts):
        with pytest.raises(NonHolomorphic):
            potential_speed(charts["plane"], lambda a, b: a - 1j * b, np.array([0.5]), np.array([0.5]))

    def test_bad_convention(self, charts):
        with pytest.raises(ValueError):
            potential_speed(charts["plane"], lambda a, b: 1, 0.0, 0.0, convention="polar")


class TestConvolution:
    def test_flat_torus_zero(self):
        ch = _flat_torus()
        ev = GreensEvaluator.build(ch)
        g = Grid(16, 16, (0.0, ch.x1_period, 0.0, 2 * math.pi))
        np.testing.assert_allclose(convolve_curvature(ev, ch, g).values, 0.0, atol=1e-14)

    def test_divergent_window(self, charts):
        ev = GreensEvaluator.build(charts["sphere"])
        g = Grid(16, 8, (-1.0, 1.0, 0.0, 2 * math.pi))
        with pytest.raises(DivergentConvolution) as info:
            convolve_curvature(ev, charts["sphere"], g)
        assert len(info.value.partial_sums) == 2

    def test_x2_independent(self, charts, evaluators):
        ch = charts["sphere"]
        g = Grid(32, 16, default_window(ch))
        vals = convolve_curvature(evaluators["sphere"], ch, g).values
        assert np.max(np.ptp(vals, axis=1)) == 0.0

    def test_sign_contrast(self, charts, evaluators):
        ev = evaluators["sphere"]
        ch = charts["sphere"]
        probe = (0.2, 0.0)
        g = Grid(24, 24, (-3.0, 3.0, 0.0, 2 * math.pi))
        Y1, Y2 = (a.ravel() for a in g.mesh())
        dA = ch.sigma(Y1) ** 2 * g.h1 * g.h2
        kern = ev.greens(probe[0], probe[1], Y1, Y2)
        K = gaussian_curvature(ch, Y1)
        j = int(np.argmax(kern))  # a node with G(probe, node) > 0
        assert kern[j] > 0
        bump = K.copy()
        bump[j] += 0.5
        before, after = np.dot(kern, K * dA), np.dot(kern, bump * dA)
        assert math.exp(after) > math.exp(before)
        assert math.exp(-after) < math.exp(-before)
