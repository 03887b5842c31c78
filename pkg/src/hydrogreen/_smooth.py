"""Smooth real functions of one variable with two derivatives, plus Gauss-Legendre helpers."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

_GL20 = np.polynomial.legendre.leggauss(20)
_GL10 = np.polynomial.legendre.leggauss(10)


def gauss_legendre(func, a, b, order=20):
    """Fixed-order Gauss-Legendre rule on [a, b]; `a`, `b` may be arrays of equal shape."""
    xi, wi = _GL20 if order == 20 else np.polynomial.legendre.leggauss(order)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    u = mid[..., None] + half[..., None] * xi
    return half * np.sum(wi * func(u), axis=-1)


@dataclass(frozen=True)
class Smooth1D:
    """A C^2 function on [lo, hi] with vectorized value and derivative callables.

    `period` marks a function that repeats with that period; evaluation outside
    [lo, lo + period) is then well defined. `samples` keeps the original data when
    the function was built by interpolation.
    """

    f: Callable[[np.ndarray], np.ndarray]
    df: Callable[[np.ndarray], np.ndarray]
    d2f: Callable[[np.ndarray], np.ndarray]
    lo: float = -np.inf
    hi: float = np.inf
    period: Optional[float] = None
    samples: Optional[tuple] = None

    def __call__(self, t):
        return self.f(np.asarray(t, dtype=float))

    def deriv(self, t, order=1):
        t = np.asarray(t, dtype=float)
        if order == 0:
            return self.f(t)
        if order == 1:
            return self.df(t)
        if order == 2:
            return self.d2f(t)
        raise ValueError("only derivatives up to order 2 are available")

    @property
    def is_sampled(self):
        return self.samples is not None

    @classmethod
    def from_samples(cls, t, y, periodic=False):
        t = np.asarray(t, dtype=float)
        y = np.asarray(y, dtype=float)
        if t.ndim != 1 or t.shape != y.shape or t.size < 4:
            raise ValueError("need at least 4 matching 1-D samples")
        if np.any(np.diff(t) <= 0):
            raise ValueError("sample abscissae must be strictly increasing")
        if periodic:
            y = y.copy()
            y[-1] = y[0]
            spl = CubicSpline(t, y, bc_type="periodic", extrapolate="periodic")
        else:
            spl = CubicSpline(t, y, bc_type="not-a-knot", extrapolate=False)
        d1 = spl.derivative(1)
        d2 = spl.derivative(2)
        return cls(
            f=spl,
            df=d1,
            d2f=d2,
            lo=float(t[0]),
            hi=float(t[-1]),
            period=float(t[-1] - t[0]) if periodic else None,
            samples=(t, y),
        )

    @classmethod
    def constant(cls, c, lo=-np.inf, hi=np.inf):
        c = float(c)
        return cls(
            f=lambda t: np.full_like(np.asarray(t, dtype=float), c),
            df=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            d2f=lambda t: np.zeros_like(np.asarray(t, dtype=float)),
            lo=lo,
            hi=hi,
        )

    def knots(self):
        """Interpolation knots (empty for closed-form functions)."""
        if self.samples is None:
            return np.empty(0)
        return self.samples[0]
