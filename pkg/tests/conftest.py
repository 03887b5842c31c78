import math

import numpy as np
import pytest

from hydrogreen.chart import chart_for_spec
from hydrogreen.corpus import corpus
from hydrogreen.greens import GreensEvaluator

CORPUS = corpus()


@pytest.fixture(scope="session")
def specs():
    return CORPUS


@pytest.fixture(scope="session")
def charts():
    return {name: chart_for_spec(spec) for name, spec in CORPUS.items()}


@pytest.fixture(scope="session")
def evaluators(charts):
    return {name: GreensEvaluator.build(ch) for name, ch in charts.items()}


def sphere_point(x1, x2):
    """Embedding of the sphere chart point (x1, x2); x1 = log tan(theta / 2)."""
    theta = 2.0 * np.arctan(np.exp(x1))
    return np.stack([np.sin(theta) * np.cos(x2), np.sin(theta) * np.sin(x2), np.cos(theta)], axis=-1)


def random_pairs(rng, n, lo, hi, min_sep=1e-2):
    a1 = rng.uniform(lo, hi, n)
    b1 = rng.uniform(lo, hi, n)
    a2 = rng.uniform(0, 2 * math.pi, n)
    b2 = rng.uniform(0, 2 * math.pi, n)
    keep = np.hypot(a1 - b1, a2 - b2) > min_sep
    return np.column_stack([a1, a2, b1, b2])[keep]
