"""Exact joint Gaussian sampling of a Riemann-Liouville fBm and the asset Brownian motion.

The Volterra process ``W^H_t = sqrt(2H) int_0^t (t-s)^(H-1/2) dW_s`` and the
asset Brownian motion ``B`` (correlated with ``W`` through ``rho``) are
sampled jointly on a time grid from their exact covariance.  ``W^H`` is
represented by its values at the left end of every grid interval and ``B``
by its increments over the intervals, which is what a left-point scheme for
the variance and the log-price needs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NotPositiveDefinite

_NODE_TOL = 1e-9
_JITTER_BASE = 1e-12
_JITTER_RETRIES = 3
_SYMMETRY_RTOL = 1e-12


def _check_hurst(H: float) -> None:
    if not 0.0 < H < 1.0:
        raise DomainError(f"Hurst parameter must lie in (0, 1), got {H!r}")


def _check_rho(rho: float) -> None:
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"correlation must lie in [-1, 1], got {rho!r}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on ``[start_time, maturity]`` with ``forward_start`` pinned to a node.

    The spacing is ``1 / steps_per_year``.  ``forward_start - start_time`` must be
    a whole number of steps; if ``maturity - forward_start`` is not, the final
    interval is shortened so that ``maturity`` is still a node.
    """

    start_time: float
    forward_start: float
    maturity: float
    steps_per_year: int = 100

    def __post_init__(self):
        if self.start_time < 0:
            raise DomainError("start_time must be non-negative")
        if not self.start_time <= self.forward_start < self.maturity:
            raise DomainError("need start_time <= forward_start < maturity")
        if int(self.steps_per_year) != self.steps_per_year or self.steps_per_year <= 0:
            raise DomainError("steps_per_year must be a positive integer")
        n_pre = (self.forward_start - self.start_time) * self.steps_per_year
        if abs(n_pre - round(n_pre)) > _NODE_TOL * max(1.0, n_pre):
            raise DomainError(
                "forward_start - start_time must be a multiple of 1/steps_per_year"
            )

    @cached_property
    def node_times(self) -> np.ndarray:
        spy = self.steps_per_year
        n_pre = int(round((self.forward_start - self.start_time) * spy))
        pre = self.start_time + np.arange(n_pre) / spy
        span = (self.maturity - self.forward_start) * spy
        n_post = int(math.floor(span + _NODE_TOL))
        post = self.forward_start + np.arange(1, n_post + 1) / spy
        if n_post == 0 or self.maturity - post[-1] > _NODE_TOL / spy:
            post = np.append(post, self.maturity)
        else:
            post[-1] = self.maturity
        nodes = np.concatenate([pre, [self.forward_start], post])
        nodes.setflags(write=False)
        return nodes

    @property
    def forward_index(self) -> int:
        return int(round((self.forward_start - self.start_time) * self.steps_per_year))

    @property
    def n_intervals(self) -> int:
        return len(self.node_times) - 1

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.node_times)

    @property
    def forward_length(self) -> float:
        return self.maturity - self.forward_start

    def interval_slice(self, window: str = "full") -> slice:
        """Intervals covered by ``window``: ``"full"`` or ``"forward"`` (``[T, tau)``)."""
        if window == "full":
            return slice(0, self.n_intervals)
        if window == "forward":
            return slice(self.forward_index, self.n_intervals)
        raise DomainError(f"unknown window {window!r}")

    def key(self) -> tuple:
        return (self.start_time, self.forward_start, self.maturity, self.steps_per_year)


def fbm_autocovariance(t: float, s: float, H: float) -> float:
    """``E[W^H_t W^H_s]`` for the Riemann-Liouville fBm.

    Evaluates ``s^(2H) int_0^1 2H (1-x)^(H-1/2) (t/s-x)^(H-1/2) dx`` (with
    ``s <= t``) after the substitution ``u = (1-x)^(H+1/2)``, which removes the
    endpoint singularity at ``x = 1``.
    """
    _check_hurst(H)
    if t < 0 or s < 0:
        raise DomainError("times must be non-negative")
    if s > t:
        t, s = s, t
    if s == 0.0:
        return 0.0
    if s == t:
        return t ** (2 * H)
    a = t / s - 1.0
    q = 1.0 / (H + 0.5)
    value, _ = integrate.quad(
        lambda u: (a + u**q) ** (H - 0.5), 0.0, 1.0, epsabs=1e-10, epsrel=1e-10, limit=200
    )
    return s ** (2 * H) * 2 * H * q * value


def fbm_bm_covariance(t, s, H: float, rho: float):
    """``E[W^H_t B_s] = rho sqrt(2H)/(H+1/2) (t^(H+1/2) - (t - min(t, s))^(H+1/2))``."""
    _check_hurst(H)
    _check_rho(rho)
    t = np.asarray(t, dtype=float)
    s = np.asarray(s, dtype=float)
    if np.any(t < 0) or np.any(s < 0):
        raise DomainError("times must be non-negative")
    c = rho * math.sqrt(2 * H) / (H + 0.5)
    out = c * (t ** (H + 0.5) - (t - np.minimum(t, s)) ** (H + 0.5))
    return float(out) if out.ndim == 0 else out


def bm_increment_covariance(grid: TimeGrid, window: str = "full") -> np.ndarray:
    """Variances of the Brownian increments (disjoint increments are independent)."""
    return grid.dt[grid.interval_slice(window)].copy()


def fbm_increment_cross_covariance(node_times, left, right, H: float, rho: float) -> np.ndarray:
    """``cov(W^H_{node_j}, B_{right_i} - B_{left_i})`` as an (nodes x intervals) matrix."""
    t = np.asarray(node_times, dtype=float)[:, None]
    return fbm_bm_covariance(t, np.asarray(right)[None, :], H, rho) - fbm_bm_covariance(
        t, np.asarray(left)[None, :], H, rho
    )


@lru_cache(maxsize=16)
def _fbm_matrix_cached(times: tuple, H: float) -> np.ndarray:
    n = len(times)
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i + 1):
            out[i, j] = out[j, i] = fbm_autocovariance(times[i], times[j], H)
    out.setflags(write=False)
    return out


def fbm_covariance_matrix(times, H: float) -> np.ndarray:
    """Autocovariance matrix of ``W^H`` at ``times`` (cached per time tuple and H)."""
    _check_hurst(H)
    return _fbm_matrix_cached(tuple(float(x) for x in times), float(H)).copy()


@dataclass(frozen=True, eq=False)
class JointCovariance:
    """Covariance of ``(W^H at interval left ends) + (B increments)``.

    Indices ``wh_slice`` hold ``W^H`` node values and ``db_slice`` the Brownian
    increments, both of length ``n``.
    """

    matrix: np.ndarray
    node_times: np.ndarray
    interval_left: np.ndarray
    interval_right: np.ndarray
    H: float
    rho: float

    @property
    def n(self) -> int:
        return len(self.node_times)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def wh_slice(self) -> slice:
        return slice(0, self.n)

    @property
    def db_slice(self) -> slice:
        return slice(self.n, 2 * self.n)

    def asymmetry(self) -> float:
        scale = max(np.max(np.abs(self.matrix)), np.finfo(float).tiny)
        return float(np.max(np.abs(self.matrix - self.matrix.T)) / scale)

    @cached_property
    def cholesky(self) -> np.ndarray:
        if self.asymmetry() > _SYMMETRY_RTOL:
            raise NotPositiveDefinite(
                f"covariance_symmetry: relative asymmetry {self.asymmetry():.3g} exceeds {_SYMMETRY_RTOL}"
            )
        return cholesky_with_jitter(self.matrix)


def cholesky_with_jitter(matrix: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; on failure add ``1e-12 * trace / N`` to the diagonal,
    escalating 10x, up to three retries."""
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        pass
    n = matrix.shape[0]
    jitter = _JITTER_BASE * np.trace(matrix) / n
    for _ in range(_JITTER_RETRIES):
        try:
            return np.linalg.cholesky(matrix + jitter * np.eye(n))
        except np.linalg.LinAlgError:
            jitter *= 10.0
    raise NotPositiveDefinite("Cholesky failed after maximum diagonal jitter")


def build_joint_covariance(grid: TimeGrid, H: float, rho: float, window: str = "full") -> JointCovariance:
    """Assemble the joint covariance over the intervals selected by ``window``.

    ``window="forward"`` keeps only the intervals in ``[T, tau)``; it is the
    exact marginal of the full-window law for everything a forward-start payoff
    depends on.
    """
    _check_hurst(H)
    _check_rho(rho)
    sl = grid.interval_slice(window)
    nodes = grid.node_times
    left = nodes[:-1][sl]
    right = nodes[1:][sl]
    cww = fbm_covariance_matrix(left, H)
    cwb = fbm_increment_cross_covariance(left, left, right, H, rho)
    cbb = np.diag(right - left)
    matrix = np.block([[cww, cwb], [cwb.T, cbb]])
    return JointCovariance(matrix, left, left, right, float(H), float(rho))


def standard_normals(seed: int, batch_index: int, stream: int, shape) -> np.ndarray:
    """Standard normals keyed by ``(seed, batch_index, stream)``.

    Uniforms come from the counter-based Philox generator and are mapped through
    the inverse normal CDF, so a batch never depends on which batches were drawn
    before it.
    """
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(batch_index), int(stream)))
    u = np.random.Generator(np.random.Philox(seq)).random(shape)
    u += 2.0**-54
    return special.ndtri(u)


@dataclass(frozen=True, eq=False)
class PathBatch:
    wh: np.ndarray
    db: np.ndarray
    seed: int
    batch_index: int

    @property
    def n_paths(self) -> int:
        return self.wh.shape[0]


# Stream ids: W-driven block and the independent remainder of B.
STREAM_W = 0
STREAM_PERP = 1


def sample_paths(cov: JointCovariance, n_paths: int, seed: int, batch_index: int = 0) -> PathBatch:
    """Draw ``n_paths`` joint samples; deterministic in ``(seed, batch_index)``.

    The ``W^H`` block uses only the first stream, so the ``W^H`` sample does not
    depend on ``rho``.
    """
    if n_paths < 0:
        raise DomainError("n_paths must be non-negative")
    L = cov.cholesky
    n = cov.n
    zw = standard_normals(seed, batch_index, STREAM_W, (n_paths, n))
    zp = standard_normals(seed, batch_index, STREAM_PERP, (n_paths, n))
    L11 = L[:n, :n]
    L21 = L[n:, :n]
    L22 = L[n:, n:]
    wh = zw @ L11.T
    db = zw @ L21.T + zp @ L22.T
    return PathBatch(wh, db, int(seed), int(batch_index))
