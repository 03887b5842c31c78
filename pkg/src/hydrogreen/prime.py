"""The prime function (1 - z) prod_{n>=1} (1 - q^n z)(1 - q^n / z) and its log-modulus."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AccuracyDegraded, AtZeroOfPrime, ZeroArgument

N_CAP = 1_000_000
ZERO_TOL = 1e-14


def truncation_order(rho: float, tol: float) -> int:
    """Number of product factors so that the dropped tail of log|P| is below tol.

    With the argument reduced to rho < |w| <= 1 each dropped factor satisfies
    |log|1 - rho^n w^{+-1}|| <= rho^{n-1} / (1 - rho), so the tail is below
    rho^N / (1 - rho)^2; a further factor 1/10 leaves headroom for rounding.
    """
    if rho == 0.0:
        return 0
    n = math.ceil(math.log(0.1 * tol * (1.0 - rho) ** 2 * rho) / math.log(rho))
    return max(8, n)


@dataclass(frozen=True)
class PrimeFunction:
    """Truncated prime function of the annulus rho < |z| < 1.

    rho = 0 means the plain factor 1 - z. A nonzero `twist` replaces rho^n by
    q^n with q = rho e^{-i twist}; this is the sheared lattice of a class-3 torus.
    """

    rho: float = 0.0
    tol: float = 1e-12
    twist: float = 0.0
    N: int = field(default=-1)

    def __post_init__(self):
        if not 0.0 <= self.rho < 1.0:
            raise ValueError("rho must lie in [0, 1)")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.N < 0:
            n = truncation_order(self.rho, self.tol)
            if n > N_CAP:
                warnings.warn(
                    f"prime truncation capped at {N_CAP} factors (requested {n}); log|P| accuracy is degraded",
                    AccuracyDegraded,
                    stacklevel=2,
                )
                n = N_CAP
            object.__setattr__(self, "N", n)

    @property
    def q(self) -> complex:
        return self.rho * complex(math.cos(self.twist), -math.sin(self.twist))

    def with_N(self, n):
        return PrimeFunction(self.rho, self.tol, self.twist, int(n))

    # -- internals ---------------------------------------------------------

    def _reduce(self, z):
        """Write z = q^k w with rho < |w| <= 1; returns (k, w)."""
        r = np.abs(z)
        k = np.floor(np.log(r) / math.log(self.rho))
        # guard the boundary against rounding in the logarithm
        w = z / self.q**k
        aw = np.abs(w)
        k = np.where(aw > 1.0, k + 1, np.where(aw <= self.rho, k - 1, k))
        w = z / self.q**k
        return k, w

    def _log_core(self, w, first=True):
        """sum of log(1 - w), log(1 - q^n w), log(1 - q^n / w): complex logs, summed."""
        out = _log1m(w) if first else np.zeros(np.shape(w), dtype=complex)
        if self.rho == 0.0 or self.N == 0:
            return out
        qn = self.q ** np.arange(1, self.N + 1)
        winv = 1.0 / w
        # accumulate in chunks to bound memory for large N
        flat_w = np.ravel(w)
        flat_inv = np.ravel(winv)
        acc = np.zeros(flat_w.shape, dtype=complex)
        chunk = max(1, 2_000_000 // max(1, flat_w.size))
        for start in range(0, qn.size, chunk):
            q = qn[start : start + chunk]
            acc += np.sum(np.log1p(-np.outer(flat_w, q)), axis=1)
            acc += np.sum(np.log1p(-np.outer(flat_inv, q)), axis=1)
        return out + acc.reshape(np.shape(w))

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if self.rho > 0.0 and np.any(z == 0):
            raise ZeroArgument("the prime function with rho > 0 is undefined at z = 0")
        return z

    # -- public ------------------------------------------------------------

    def log_abs(self, z):
        """log|P(z)|, finite wherever P(z) != 0 and immune to under/overflow."""
        z = self._check(z)
        if self.rho == 0.0:
            d = np.abs(1.0 - z)
            if np.any(d < ZERO_TOL):
                raise AtZeroOfPrime("argument is a zero of the prime function")
            return np.log(d)
        k, w = self._reduce(z)
        if np.any(np.abs(1.0 - w) < ZERO_TOL):
            raise AtZeroOfPrime("argument is a zero of the prime function")
        base = self._log_core(w).real
        return -k * np.log(np.abs(w)) - 0.5 * k * (k - 1) * math.log(self.rho) + base

    def log_abs_cofactor(self, w):
        """log|P(w) / (1 - w)|, continuous through the zero at w = 1."""
        w = self._check(w)
        if self.rho == 0.0:
            return np.zeros(w.shape)
        near = np.abs(1.0 - w) < 1e-3
        out = np.empty(w.shape)
        if np.any(~near):
            far = w[~near]
            out[~near] = self.log_abs(far) - np.log(np.abs(1.0 - far))
        if np.any(near):
            # |w| ~ 1: the unreduced product converges directly
            out[near] = self._log_core(w[near], first=False).real
        return out

    def __call__(self, z):
        """Complex value of the truncated product (may overflow far from the unit annulus)."""
        z = self._check(z)
        if self.rho == 0.0:
            return 1.0 - z
        k, w = self._reduce(z)
        core = np.exp(self._log_core(w))
        # P(q^k w) = (-1)^k w^{-k} q^{-k(k-1)/2} P(w)
        return (-1.0) ** k * w ** (-k) * self.q ** (-0.5 * k * (k - 1)) * core

    def direct_log_abs(self, z):
        """Unreduced sum of log-moduli over the truncated factors; a cross-check for |z| near 1."""
        z = self._check(z)
        out = np.log(np.abs(1.0 - z))
        for n in range(1, self.N + 1):
            qn = self.q**n
            out = out + np.log(np.abs(1.0 - qn * z)) + np.log(np.abs(1.0 - qn / z))
        return out


def _log1m(w):
    """Principal log(1 - w), accurate for small |w|."""
    w = np.asarray(w, dtype=complex)
    return np.log1p(-w)


def prime_eval(p: PrimeFunction, z):
    return p(z)


def log_abs_prime(p: PrimeFunction, z):
    return p.log_abs(z)
