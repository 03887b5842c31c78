import ast
import math
from pathlib import Path

import numpy as np
import pytest

import hydrogreen.verify as verify_mod
from conftest import random_pairs
from hydrogreen.errors import OutOfWindow
from hydrogreen.verify import (
    VerificationReport,
    circulation,
    end_behavior,
    fd_laplace_beltrami,
    lattice_residual,
    run_suite,
    symmetry_residual,
)

X = np.linspace(-1, 1, 7)
Y = np.linspace(0, 2, 7)


class TestLaplace:
    def test_constant(self):
        assert np.max(np.abs(fd_laplace_beltrami(lambda a, b: 3.0 + 0 * a, None, X, Y))) < 1e-12

    def test_linear(self):
        assert np.max(np.abs(fd_laplace_beltrami(lambda a, b: a + 0 * b, None, X, Y))) < 1e-10

    def test_quadratic(self):
        np.testing.assert_allclose(fd_laplace_beltrami(lambda a, b: a * a + 0 * b, None, X, Y), 2.0, atol=1e-8)

    def test_second_order(self):
        f = lambda a, b: np.exp(a) * np.cos(b)  # harmonic
        e1 = np.max(np.abs(fd_laplace_beltrami(f, None, X, Y, h=0.1)))
        e2 = np.max(np.abs(fd_laplace_beltrami(f, None, X, Y, h=0.05)))
        assert e1 / e2 >= 3.5

    def test_metric_scaling(self, charts):
        ch = charts["sphere"]
        lap = fd_laplace_beltrami(lambda a, b: a * a + 0 * b, ch, np.array([0.5]), np.array([0.0]))
        assert float(lap[0]) == pytest.approx(2 * math.cosh(0.5) ** 2, rel=1e-6)

    def test_out_of_window(self, charts):
        ch = charts["disc"]
        with pytest.raises(OutOfWindow):
            fd_laplace_beltrami(lambda a, b: a, ch, np.array([ch.x1_lo]), np.array([0.0]))


class TestCirculation:
    def test_plane(self, evaluators):
        for x0 in ((0.0, 0.0), (1.3, -2.0)):
            assert circulation(evaluators["plane"], x0) == pytest.approx(1.0, abs=1e-8)

    def test_out_of_window(self, evaluators, charts):
        with pytest.raises(OutOfWindow):
            circulation(evaluators["disc"], (0.005, 1.0), chart=charts["disc"])

    def test_callable_accepted(self):
        G = lambda a, b, c, d: -np.log(np.hypot(a - c, b - d)) / (2 * math.pi)
        assert circulation(G, (0.0, 0.0)) == pytest.approx(1.0, abs=1e-8)


class TestSymmetry:
    def test_plane(self, evaluators):
        p = random_pairs(np.random.default_rng(0), 500, -3, 3)
        assert symmetry_residual(evaluators["plane"], p) < 1e-12

    @pytest.mark.parametrize("name", ["sphere", "torus"])
    def test_closed(self, evaluators, name):
        p = random_pairs(np.random.default_rng(1), 1000, -3, 3)
        assert symmetry_residual(evaluators[name], p) < 1e-10

    def test_lattice_negative_control(self, charts):
        from hydrogreen.greens import GreensEvaluator
        from hydrogreen.surface import SurfaceClassIndex

        ev = GreensEvaluator.build(charts["torus"], SurfaceClassIndex(3, rho=0.01))
        p = random_pairs(np.random.default_rng(2), 50, 0, 6)
        assert lattice_residual(ev, p, ev.lattice) > 1e-3


class TestEndBehavior:
    def test_unknown_kind(self, evaluators):
        with pytest.raises(ValueError):
            end_behavior(evaluators["disc"], (0.5, 0.0), "elliptic", [1, 2])

    def test_parabolic_requires_gamma(self, evaluators):
        ev = evaluators["punctured_open_disc"]
        wrong = end_behavior(ev, (0.5, 1.0), "parabolic", np.linspace(25, 35, 6), gamma=0.0)
        right = end_behavior(ev, (0.5, 1.0), "parabolic", np.linspace(25, 35, 6), gamma=0.3)
        assert right.passed and not wrong.passed


class TestReport:
    def test_text(self):
        r = VerificationReport(meta={"class": 0})
        assert r.add("a", 1e-9, 1e-6)
        assert not r.add("b", float("nan"), 1.0)
        text = r.to_text()
        assert "a.status = pass" in text and "b.status = fail" in text
        assert text.endswith("overall = fail\n")
        assert r.failures() == ["b"] and not r.passed


def test_suite_passes_on_corpus(evaluators):
    for name, ev in evaluators.items():
        rep = run_suite(ev)
        assert rep.passed, (name, rep.failures())


def test_verify_is_black_box():
    tree = ast.parse(Path(verify_mod.__file__).read_text())
    mods = {n.module for n in ast.walk(tree) if isinstance(n, ast.ImportFrom)}
    assert not any(m and ("greens" in m or "prime" in m) for m in mods)
