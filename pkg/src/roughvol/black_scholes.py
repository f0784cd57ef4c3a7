"""Zero-rate Black-Scholes call in log coordinates, its sensitivities and inverses.

All functions take the log-spot ``x``, the log-strike ``k``, the time to
maturity ``dt`` and the volatility ``sigma``; they broadcast over numpy arrays
and return floats for scalar input.  Forward-start quotes use ``x = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtr

from .errors import AboveSpot, BelowIntrinsic, DomainError, NoConvergence

SIGMA_LOW = 1e-6
SIGMA_HIGH = 5.0
VOL_TOL = 1e-8
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _out(a):
    a = np.asarray(a)
    return float(a) if a.ndim == 0 else a


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return _out(_INV_SQRT_2PI * np.exp(-0.5 * z * z))


def norm_cdf(z):
    return _out(ndtr(np.asarray(z, dtype=float)))


def d1(x, k, dt, sigma):
    sd = np.asarray(sigma, dtype=float) * np.sqrt(dt)
    return _out((np.asarray(x) - k) / sd + 0.5 * sd)


def d2(x, k, dt, sigma):
    sd = np.asarray(sigma, dtype=float) * np.sqrt(dt)
    return _out((np.asarray(x) - k) / sd - 0.5 * sd)


def bs_price(x, k, dt, sigma):
    """``e^x N(d1) - e^k N(d2)``; intrinsic value ``(e^x - e^k)_+`` when ``sigma = 0``."""
    x, k, dt, sigma = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, k, dt, sigma)))
    if np.any(sigma < 0) or np.any(dt < 0):
        raise DomainError("sigma and dt must be non-negative")
    sd = sigma * np.sqrt(dt)
    pos = sd > 0
    safe = np.where(pos, sd, 1.0)
    a = (x - k) / safe + 0.5 * safe
    price = np.exp(x) * ndtr(a) - np.exp(k) * ndtr(a - safe)
    intrinsic = np.maximum(np.exp(x) - np.exp(k), 0.0)
    return _out(np.where(pos, price, intrinsic))


def _positive_sd(dt, sigma):
    sd = np.asarray(sigma, dtype=float) * np.sqrt(np.asarray(dt, dtype=float))
    if np.any(sd <= 0):
        raise DomainError("sigma * sqrt(dt) must be positive")
    return sd


def bs_vega(x, k, dt, sigma):
    """``dBS/dsigma = e^x N'(d1) sqrt(dt)``."""
    _positive_sd(dt, sigma)
    return _out(np.exp(x) * norm_pdf(d1(x, k, dt, sigma)) * np.sqrt(dt))


def g_operator(x, k, dt, sigma):
    """``(d^2/dx^2 - d/dx) BS = e^x N'(d1) / (sigma sqrt(dt))``."""
    sd = _positive_sd(dt, sigma)
    return _out(np.exp(x) * norm_pdf(d1(x, k, dt, sigma)) / sd)


def h_operator(x, k, dt, sigma):
    """``(d^3/dx^3 - d^2/dx^2) BS = G (1 - d1 / (sigma sqrt(dt)))``."""
    sd = _positive_sd(dt, sigma)
    return _out(g_operator(x, k, dt, sigma) * (1.0 - np.asarray(d1(x, k, dt, sigma)) / sd))


@dataclass(frozen=True)
class BSQuote:
    x: float
    k: float
    delta_t: float
    sigma: float

    def __post_init__(self):
        if self.sigma < 0 or self.delta_t < 0:
            raise DomainError("sigma and delta_t must be non-negative")

    def price(self) -> float:
        return bs_price(self.x, self.k, self.delta_t, self.sigma)

    def vega(self) -> float:
        return bs_vega(self.x, self.k, self.delta_t, self.sigma)

    def g(self) -> float:
        return g_operator(self.x, self.k, self.delta_t, self.sigma)

    def h(self) -> float:
        return h_operator(self.x, self.k, self.delta_t, self.sigma)


def implied_vol(price: float, x: float, k: float, dt: float,
                low: float = SIGMA_LOW, high: float = SIGMA_HIGH, tol: float = VOL_TOL) -> float:
    """Invert :func:`bs_price` in ``sigma`` by bisection on ``[low, high]``.

    Stops once the bracket is narrower than ``tol`` and returns its midpoint.
    Prices below the model price at ``low`` (but above intrinsic) resolve to
    ``low``.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")
    spot = math.exp(x)
    intrinsic = max(spot - math.exp(k), 0.0)
    if not price > intrinsic:
        raise BelowIntrinsic(f"price {price!r} is not above intrinsic value {intrinsic!r}")
    if not price < spot:
        raise AboveSpot(f"price {price!r} is not below spot {spot!r}")
    if price > bs_price(x, k, dt, high):
        raise NoConvergence(f"price {price!r} needs a volatility above {high}")
    lo, hi = low, high
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bs_price(x, k, dt, mid) < price:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zero_vanna_strike(smile: Callable[[float], float], dt: float,
                      tol: float = 1e-10, max_iter: int = 100) -> float:
    """Strike ``k`` with ``d2(k, smile(k)) = 0`` at ``x = 0``, i.e. ``k = -smile(k)^2 dt / 2``.

    Fixed-point iteration from ``k0 = -smile(0)^2 dt / 2``; if it fails to
    settle, bisection on ``g(k) = k + smile(k)^2 dt / 2``.
    """
    if not dt > 0:
        raise DomainError("dt must be positive")

    def step(k):
        return -0.5 * smile(k) ** 2 * dt

    k = step(0.0)
    for _ in range(max_iter):
        k_new = step(k)
        if abs(k_new - k) < tol:
            return k_new
        k = k_new

    def g(k):
        return k + 0.5 * smile(k) ** 2 * dt

    lo, hi = -0.5 * SIGMA_HIGH**2 * dt, 0.0
    if g(lo) > 0 or g(hi) < 0:
        raise NoConvergence("zero-vanna strike is not bracketed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if g(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            return 0.5 * (lo + hi)
    raise NoConvergence("zero-vanna bisection did not converge")
