"""Rough Bergomi variance, log-price and forward realised-volatility paths.

Variance: ``sigma_t^2 = sigma0^2 exp(alpha W^H_t - alpha^2 t^(2H) / 2)``.
The log-price is advanced with a left-point Euler step and the forward
average volatility ``v_T = sqrt(int_T^tau sigma_u^2 du / (tau - T))`` with a
left Riemann sum, so that ``alpha = 0`` is path-wise Black-Scholes.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import ndtr

from . import gaussian_process as gp
from .errors import DomainError, EmptyBatch

ESTIMATORS = ("conditional", "pathwise")


@dataclass(frozen=True)
class ModelParams:
    sigma0: float = 0.2
    alpha: float = 0.8
    H: float = 0.1
    rho: float = -0.8
    X0: float = 0.0

    def __post_init__(self):
        if not self.sigma0 > 0:
            raise DomainError("sigma0 must be positive")
        if not self.alpha >= 0:
            raise DomainError("alpha must be non-negative")
        if not 0 < self.H < 1:
            raise DomainError("H must lie in (0, 1)")
        if not -1 <= self.rho <= 1:
            raise DomainError("rho must lie in [-1, 1]")


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo settings.

    ``seed`` and ``batch_size`` together fix the random stream; ``workers`` only
    changes scheduling, never the numbers.
    """

    seed: int
    n_paths: int = 500_000
    steps_per_year: int = 100
    batch_size: int = 20_000
    workers: int = 1
    control_variate: bool = True
    estimator: str = "conditional"

    def __post_init__(self):
        if self.n_paths < 0 or self.batch_size <= 0 or self.workers <= 0:
            raise DomainError("n_paths >= 0, batch_size > 0 and workers > 0 required")
        if self.estimator not in ESTIMATORS:
            raise DomainError(f"estimator must be one of {ESTIMATORS}")

    def batches(self) -> list[tuple[int, int]]:
        """``(batch_index, size)`` pairs covering ``n_paths``."""
        full, rest = divmod(self.n_paths, self.batch_size)
        out = [(i, self.batch_size) for i in range(full)]
        if rest:
            out.append((full, rest))
        return out


def variance_path(wh, params: ModelParams, node_times) -> np.ndarray:
    """Pointwise ``sigma0^2 exp(alpha wH - alpha^2 t^(2H) / 2)``."""
    t = np.asarray(node_times, dtype=float)
    a = params.alpha
    return params.sigma0**2 * np.exp(a * np.asarray(wh) - 0.5 * a * a * t ** (2 * params.H))


def _forward_columns(grid: gp.TimeGrid, window: str) -> tuple[np.ndarray, np.ndarray]:
    sl = grid.interval_slice(window)
    left = grid.node_times[:-1][sl]
    mask = left >= grid.forward_start - 1e-12
    return mask, grid.dt[sl]


def log_price_increment(variance, db, grid: gp.TimeGrid, window: str = "full") -> np.ndarray:
    """``X_tau - X_T`` per path: sum over ``[T, tau)`` of ``-sigma^2 dt / 2 + sigma dB``.

    ``variance`` and ``db`` have one column per interval of ``window``.
    """
    mask, dt = _forward_columns(grid, window)
    var = np.asarray(variance)[..., mask]
    return np.sum(-0.5 * var * dt[mask] + np.sqrt(var) * np.asarray(db)[..., mask], axis=-1)


def forward_vol(variance, grid: gp.TimeGrid, window: str = "full") -> np.ndarray:
    """``v_T = sqrt(sum_{[T, tau)} sigma^2 dt / (tau - T))`` per path."""
    mask, dt = _forward_columns(grid, window)
    y = np.asarray(variance)[..., mask] @ dt[mask]
    return np.sqrt(y / grid.forward_length)


def gaussian_call(mean, var, log_strike):
    """``E[(e^Y - e^k)_+]`` for ``Y ~ N(mean, var)``."""
    mean = np.asarray(mean, dtype=float)
    var = np.broadcast_to(np.asarray(var, dtype=float), mean.shape)
    sd = np.sqrt(var)
    pos = sd > 0
    safe = np.where(pos, sd, 1.0)
    d1 = (mean + var - log_strike) / safe
    smooth = np.exp(mean + 0.5 * var) * ndtr(d1) - math.exp(log_strike) * ndtr(d1 - safe)
    return np.where(pos, smooth, np.maximum(np.exp(mean) - math.exp(log_strike), 0.0))


@dataclass(eq=False)
class SimulatedScenario:
    """Per-path quantities needed to price every forward-start claim on one scenario.

    ``pathwise``: ``log_return`` holds ``X_tau - X_T`` and ``control_log_return``
    the same quantity for a constant-``sigma0`` asset on the same ``dB``.

    ``conditional``: conditional on the ``W``-driven normals the log-return is
    Gaussian; ``cond_mean``/``cond_var`` store its moments (and the
    ``control_*`` arrays those of the constant-vol control).
    """

    params: ModelParams
    grid: gp.TimeGrid
    mc: MCConfig
    vol: np.ndarray
    log_return: Optional[np.ndarray] = None
    control_log_return: Optional[np.ndarray] = None
    cond_mean: Optional[np.ndarray] = None
    cond_var: Optional[np.ndarray] = None
    control_cond_mean: Optional[np.ndarray] = None
    control_cond_var: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_paths(self) -> int:
        return len(self.vol)

    @property
    def estimator(self) -> str:
        return self.mc.estimator

    def call_payoffs(self, log_strike: float) -> tuple[np.ndarray, np.ndarray]:
        """Per-path (payoff, control payoff) for the forward-start call ``(e^{X_tau-X_T} - e^k)_+``."""
        if self.n_paths == 0:
            raise EmptyBatch("scenario has no paths")
        ek = math.exp(log_strike)
        if self.estimator == "pathwise":
            y = np.maximum(np.exp(self.log_return) - ek, 0.0)
            c = np.maximum(np.exp(self.control_log_return) - ek, 0.0)
            return y, c
        y = gaussian_call(self.cond_mean, self.cond_var, log_strike)
        c = gaussian_call(self.control_cond_mean, self.control_cond_var, log_strike)
        return y, c


def _pathwise_batch(params, grid, cov, seed, index, size):
    batch = gp.sample_paths(cov, size, seed, index)
    var = variance_path(batch.wh, params, cov.node_times)
    dt = cov.interval_right - cov.interval_left
    s0 = params.sigma0
    x = np.sum(-0.5 * var * dt + np.sqrt(var) * batch.db, axis=1)
    xc = np.sum(-0.5 * s0 * s0 * dt + s0 * batch.db, axis=1)
    v = np.sqrt(var @ dt / grid.forward_length)
    return v, x, xc


def _conditional_batch(params, grid, cov, seed, index, size):
    n = cov.n
    L = cov.cholesky
    zw = gp.standard_normals(seed, index, gp.STREAM_W, (size, n))
    wh = zw @ L[:n, :n].T
    # E[dB | W-stream]; the rest of dB is L22 @ z_perp, independent of W^H
    db_mean = zw @ L[n:, :n].T
    L22 = L[n:, n:]
    var = variance_path(wh, params, cov.node_times)
    sig = np.sqrt(var)
    dt = cov.interval_right - cov.interval_left
    q = var @ dt
    mean = -0.5 * q + np.sum(sig * db_mean, axis=1)
    cvar = np.sum((sig @ L22) ** 2, axis=1)
    s0 = params.sigma0
    cmean = -0.5 * s0 * s0 * np.sum(dt) + s0 * db_mean.sum(axis=1)
    ccvar = np.full(size, s0 * s0 * np.sum(L22.sum(axis=0) ** 2))
    v = np.sqrt(q / grid.forward_length)
    return v, mean, cvar, cmean, ccvar


def simulate_scenario(params: ModelParams, grid: gp.TimeGrid, mc: MCConfig) -> SimulatedScenario:
    """Simulate ``mc.n_paths`` paths in keyed batches and concatenate them in batch order.

    Only the intervals in ``[T, tau)`` are sampled: that marginal of the joint
    law is exact and is all a forward-start payoff depends on.
    """
    if grid.steps_per_year != mc.steps_per_year:
        raise DomainError("grid.steps_per_year and mc.steps_per_year disagree")
    cov = gp.build_joint_covariance(grid, params.H, params.rho, window="forward")
    cov.cholesky  # factor once, before threads share it
    work = _conditional_batch if mc.estimator == "conditional" else _pathwise_batch

    def run(job):
        index, size = job
        return work(params, grid, cov, mc.seed, index, size)

    jobs = mc.batches()
    if mc.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    if parts:
        cols = [np.concatenate(c) for c in zip(*parts)]
    else:
        cols = [np.empty(0)] * (5 if mc.estimator == "conditional" else 3)
    if mc.estimator == "conditional":
        v, mean, cvar, cmean, ccvar = cols
        return SimulatedScenario(
            params, grid, mc, v,
            cond_mean=mean, cond_var=cvar, control_cond_mean=cmean, control_cond_var=ccvar,
        )
    v, x, xc = cols
    return SimulatedScenario(params, grid, mc, v, log_return=x, control_log_return=xc)
