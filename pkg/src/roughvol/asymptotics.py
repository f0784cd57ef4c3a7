"""Short-maturity error orders of the zero-vanna approximation.

Leading-order constants use the rough Bergomi Malliavin kernels with every
volatility factor frozen at ``sigma0``:

* ``D_s sigma_r^2       ~ sigma0^2 alpha sqrt(2H) (r-s)^(H-1/2)``
* ``D_s sigma_r         ~ sigma0 alpha sqrt(2H) (r-s)^(H-1/2) / 2``
* ``D_s D_r sigma_u^2   ~ sigma0^2 alpha^2 2H (u-s)^(H-1/2) (u-r)^(H-1/2)``

With these the three limit terms are independent of ``tau - T`` and the
prediction is ``I(k_hat) - E[v_T] ~ C (tau - T)^(2H)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, stats

from .errors import DomainError, InsufficientSignal, QuadratureError
from .gaussian_process import TimeGrid
from .pricing import zero_vanna_report
from .rbergomi import MCConfig, ModelParams, SimulatedScenario

_QUAD = dict(epsabs=1e-14, epsrel=1e-10, limit=200)


def malliavin_kernel(params: ModelParams, s, r, variance=None):
    """``D_s sigma_r^2`` for ``s < r``; ``variance`` defaults to the frozen ``sigma0^2``."""
    s = np.asarray(s, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(s >= r):
        raise DomainError("malliavin_kernel needs s < r")
    var = params.sigma0**2 if variance is None else np.asarray(variance, dtype=float)
    out = var * params.alpha * math.sqrt(2 * params.H) * (r - s) ** (params.H - 0.5)
    return float(out) if np.ndim(out) == 0 else out


def vol_kernel(params: ModelParams, s, r):
    """Frozen ``D_s sigma_r``."""
    return 0.5 * malliavin_kernel(params, s, r) / params.sigma0


def second_kernel(params: ModelParams, s, r, u):
    """Frozen ``D_s D_r sigma_u^2`` for ``s, r < u``."""
    p = params.H - 0.5
    return params.sigma0**2 * params.alpha**2 * 2 * params.H * (u - s) ** p * (u - r) ** p


@dataclass(frozen=True)
class LimitConstants:
    term1: float
    term2: float
    term3: float

    @property
    def total(self) -> float:
        return self.term1 + self.term2 + self.term3


@lru_cache(maxsize=64)
def _triple_kernel_integral(H: float, delta: float) -> float:
    """``int_0^D int_s^D int_r^D (u-s)^p (u-r)^p du dr ds`` with ``p = H - 1/2``."""
    p = H - 0.5

    def inner(s, r):
        # the (u - r)^p endpoint singularity is carried by the algebraic weight
        return integrate.quad(lambda u: (u - s) ** p, r, delta, weight="alg", wvar=(p, 0.0), **_QUAD)[0]

    def middle(s):
        return integrate.quad(lambda r: inner(s, r), s, delta, **_QUAD)[0]

    value, err = integrate.quad(middle, 0.0, delta, **_QUAD)
    if not math.isfinite(value) or err > 1e-6 * abs(value):
        raise QuadratureError(f"triple integral did not converge (estimate {value}, error {err})")
    return value


def limit_constants(params: ModelParams, delta: float = 1.0) -> LimitConstants:
    """Evaluate the three leading-order limit terms at ``tau - T = delta``.

    Each term is normalised by its power of ``delta`` and so should not depend on
    it.  Terms one and two reduce to Beta-type integrals in closed form; the
    third is integrated numerically.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    s0, a, H, rho = params.sigma0, params.alpha, params.H, params.rho
    if rho == 0.0 or a == 0.0:
        return LimitConstants(0.0, 0.0, 0.0)
    c = a * math.sqrt(2 * H)
    h = H + 0.5
    # int_T^tau int_s^tau D_s sigma_r^2 dr ds
    double = s0**2 * c * delta ** (h + 1) / (h * (h + 1))
    term1 = 3 * rho**2 / (8 * delta ** (3 + 2 * H)) * double**2 / s0**3
    # int_T^tau (int_s^tau D_s sigma_r dr)^2 ds
    squared = (0.5 * s0 * c / h) ** 2 * delta ** (2 * h + 1) / (2 * h + 1)
    term2 = -rho**2 / (2 * delta ** (2 + 2 * H)) * squared / s0
    triple = s0**2 * c**2 * _triple_kernel_integral(float(H), float(delta))
    term3 = -rho**2 / (2 * delta ** (2 + 2 * H)) * triple / s0
    return LimitConstants(term1, term2, term3)


def predicted_error(params: ModelParams, delta: float) -> float:
    return limit_constants(params).total * delta ** (2 * params.H)


@dataclass
class DecaySeries:
    deltas: np.ndarray
    errors: np.ndarray
    std_errors: np.ndarray
    T_minus_t: float = float("nan")
    params: Optional[ModelParams] = None

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, dtype=float)
        self.errors = np.asarray(self.errors, dtype=float)
        self.std_errors = np.asarray(self.std_errors, dtype=float)
        if not len(self.deltas) == len(self.errors) == len(self.std_errors):
            raise DomainError("deltas, errors and std_errors must have equal length")
        if len(self.deltas) < 4:
            raise DomainError("a decay series needs at least four points")
        if np.any(np.diff(self.deltas) >= 0) or np.any(self.deltas <= 0):
            raise DomainError("deltas must be positive and strictly decreasing")


@dataclass(frozen=True)
class DecayFit:
    slope: float
    slope_se: float
    intercept: float
    r2: float
    used: tuple
    dropped: tuple


def decay_slope(series: DecaySeries, min_points: int = 4) -> DecayFit:
    """OLS fit of ``log|error|`` on ``log delta``.

    Points with ``|error| <= 3 SE`` are dropped; ``InsufficientSignal`` if fewer
    than ``min_points`` remain.
    """
    resolvable = np.abs(series.errors) > 3 * series.std_errors
    used = tuple(float(d) for d in series.deltas[resolvable])
    dropped = tuple(float(d) for d in series.deltas[~resolvable])
    if resolvable.sum() < min_points:
        raise InsufficientSignal(
            f"only {int(resolvable.sum())} of {len(series.deltas)} points exceed 3 SE (dropped {dropped})"
        )
    x = np.log(series.deltas[resolvable])
    y = np.log(np.abs(series.errors[resolvable]))
    fit = stats.linregress(x, y)
    return DecayFit(float(fit.slope), float(fit.stderr), float(fit.intercept), float(fit.rvalue**2), used, dropped)


@dataclass(frozen=True)
class PredictionComparison:
    delta: float
    measured: float
    measured_se: float
    predicted: float
    constants: LimitConstants

    @property
    def resolvable(self) -> bool:
        return abs(self.measured) > 3 * self.measured_se

    @property
    def ratio(self) -> Optional[float]:
        return None if self.predicted == 0 else self.measured / self.predicted

    @property
    def sign_agrees(self) -> Optional[bool]:
        """``None`` when the measurement is inside 3 SE or the prediction is zero."""
        if not self.resolvable or self.predicted == 0:
            return None
        return (self.measured < 0) == (self.predicted < 0)


def compare_prediction(params: ModelParams, grid: TimeGrid, mc: Optional[MCConfig] = None,
                       scenario: Optional[SimulatedScenario] = None, report=None) -> PredictionComparison:
    """Measured ``I(k_hat) - E[v_T]`` against ``C (tau - T)^(2H)``."""
    if report is None:
        report = zero_vanna_report(params, grid, mc, scenario=scenario)
    consts = limit_constants(params)
    delta = grid.forward_length
    return PredictionComparison(
        delta, report.diff_khat, report.diff_khat_se, consts.total * delta ** (2 * params.H), consts
    )


def decay_series(params: ModelParams, T_minus_t: float, deltas: Sequence[float], mc: MCConfig):
    """Run the zero-vanna report on a ladder of ``tau - T`` with a common seed."""
    reports = []
    for d in deltas:
        grid = TimeGrid(0.0, T_minus_t, T_minus_t + d, mc.steps_per_year)
        reports.append(zero_vanna_report(params, grid, mc, scenario_id=f"delta={d:g}"))
    series = DecaySeries(
        [r.tau_minus_T for r in reports],
        [r.diff_khat for r in reports],
        [r.diff_khat_se for r in reports],
        T_minus_t,
        params,
    )
    return series, reports
