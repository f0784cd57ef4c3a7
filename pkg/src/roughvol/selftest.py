"""Reduced-scale invariant checks run by ``roughvol --mode selftest``."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import black_scholes as bs
from . import gaussian_process as gp
from .pricing import zero_vanna_report
from .rbergomi import MCConfig, ModelParams, simulate_scenario


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def check_fbm_variance(**_):
    worst = 0.0
    for t in (0.25, 0.5, 1.0, 2.0):
        for H in (0.05, 0.1, 0.3, 0.5):
            worst = max(worst, abs(gp.fbm_autocovariance(t, t, H) - t ** (2 * H)))
    return worst <= 1e-8, f"max |Var W^H_t - t^2H| = {worst:.2e}"


def check_fbm_bm_reduction(**_):
    ts = np.linspace(0.1, 2.0, 20)
    worst = max(abs(gp.fbm_autocovariance(t, s, 0.5) - min(t, s)) for t in ts for s in ts)
    return worst <= 1e-8, f"max |cov - min(s,t)| at H=1/2 = {worst:.2e}"


def check_fbm_closed_form(**_):
    # hypergeometric representation of the same integral
    worst = 0.0
    for H in (0.05, 0.1, 0.3):
        for t, s in ((1.0, 0.5), (2.0, 1.99), (0.3, 0.01)):
            ref = 2 * H / (H + 0.5) * s ** (H + 0.5) * t ** (H - 0.5) * special.hyp2f1(1, 0.5 - H, 1.5 + H, s / t)
            worst = max(worst, abs(gp.fbm_autocovariance(t, s, H) - ref))
    return worst <= 1e-8, f"max |quadrature - hyp2f1| = {worst:.2e}"


def check_covariance_symmetry(inject_fault: Optional[str] = None, **_):
    grid = gp.TimeGrid(0.0, 0.1, 0.2, 50)
    cov = gp.build_joint_covariance(grid, 0.1, -0.8)
    if inject_fault == "asymmetric_covariance":
        m = cov.matrix.copy()
        m[0, -1] += 1e-3
        cov = replace(cov, matrix=m)
    asym = cov.asymmetry()
    if asym > 1e-12:
        return False, f"covariance_symmetry violated: relative asymmetry {asym:.2e}"
    cov.cholesky
    return True, f"relative asymmetry {asym:.2e}, Cholesky ok"


def check_vega_gamma(**_):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(50):
        x, k = rng.normal(0, 0.3, 2)
        dt, sig = rng.uniform(0.05, 3), rng.uniform(0.05, 1.0)
        worst = max(worst, _rel(bs.bs_vega(x, k, dt, sig) / (sig * dt), bs.g_operator(x, k, dt, sig)))
    return worst <= 1e-10, f"max rel |vega/(sigma dt) - G| = {worst:.2e}"


def heat_equation_residual(x, k, dt, sig, h=1e-3):
    """Relative residual of ``dBS/dt + sigma^2/2 (BS_xx - BS_x)`` by 4th-order differences."""
    f = lambda xx, tt: bs.bs_price(xx, k, tt, sig)
    bx = (-f(x + 2 * h, dt) + 8 * f(x + h, dt) - 8 * f(x - h, dt) + f(x - 2 * h, dt)) / (12 * h)
    bxx = (-f(x + 2 * h, dt) + 16 * f(x + h, dt) - 30 * f(x, dt) + 16 * f(x - h, dt) - f(x - 2 * h, dt)) / (12 * h * h)
    # calendar time runs against time to maturity
    bt = -(-f(x, dt + 2 * h) + 8 * f(x, dt + h) - 8 * f(x, dt - h) + f(x, dt - 2 * h)) / (12 * h)
    return abs(bt + 0.5 * sig * sig * (bxx - bx)) / abs(bt)


def check_heat_equation(**_):
    rng = np.random.default_rng(6)
    worst = max(
        heat_equation_residual(rng.normal(0, 0.2), rng.normal(0, 0.2), rng.uniform(0.2, 2), rng.uniform(0.1, 0.6))
        for _ in range(20)
    )
    return worst <= 1e-6, f"max relative residual {worst:.2e}"


def check_implied_vol_round_trip(**_):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(50):
        k, dt, sig = rng.normal(0, 0.2), rng.uniform(0.1, 3), rng.uniform(0.05, 1.0)
        worst = max(worst, abs(bs.implied_vol(bs.bs_price(0.0, k, dt, sig), 0.0, k, dt) - sig))
    return worst <= 1e-8, f"max round-trip error {worst:.2e}"


def check_martingales(**_):
    params = ModelParams(0.2, 1.0, 0.1, -0.8)
    grid = gp.TimeGrid(0.0, 0.5, 1.0, 50)
    mc = MCConfig(seed=2024, n_paths=100_000, steps_per_year=50, estimator="pathwise")
    sc = simulate_scenario(params, grid, mc)
    e = np.exp(sc.log_return)
    z_price = abs(e.mean() - 1) / (e.std(ddof=1) / math.sqrt(len(e)))
    cov = gp.build_joint_covariance(grid, params.H, params.rho, window="forward")
    batch = gp.sample_paths(cov, 100_000, 2024)
    var = params.sigma0**2 * np.exp(params.alpha * batch.wh[:, -1] - 0.5 * params.alpha**2 * cov.node_times[-1] ** (2 * params.H))
    z_var = abs(var.mean() - params.sigma0**2) / (var.std(ddof=1) / math.sqrt(len(var)))
    z_fbm = abs(batch.wh[:, -1].var() - cov.node_times[-1] ** (2 * params.H)) / (
        cov.node_times[-1] ** (2 * params.H) * math.sqrt(2 / len(var))
    )
    ok = max(z_price, z_var, z_fbm) <= 4
    return ok, f"z-scores: E[exp(dX)]={z_price:.2f}, E[sigma^2]={z_var:.2f}, Var W^H={z_fbm:.2f}"


def check_thread_stability(**_):
    params = ModelParams(0.2, 0.8, 0.1, -0.8)
    grid = gp.TimeGrid(0.0, 0.5, 1.0, 50)
    base = MCConfig(seed=99, n_paths=40_000, steps_per_year=50, batch_size=5_000)
    one = simulate_scenario(params, grid, base)
    many = simulate_scenario(params, grid, replace(base, workers=4))
    same = all(
        np.array_equal(getattr(one, f), getattr(many, f))
        for f in ("vol", "cond_mean", "cond_var", "control_cond_mean")
    )
    return same, "1 vs 4 workers bit-identical" if same else "worker count changed the results"


def check_bs_limit(**_):
    params = ModelParams(0.2, 0.0, 0.1, -0.8)
    grid = gp.TimeGrid(0.0, 0.5, 1.0, 50)
    worst = 0.0
    for est in ("conditional", "pathwise"):
        mc = MCConfig(seed=3, n_paths=20_000, steps_per_year=50, estimator=est)
        r = zero_vanna_report(params, grid, mc)
        for v in (r.ev.value, r.atmi, r.i_khat):
            worst = max(worst, abs(v - params.sigma0))
    return worst <= 1e-8, f"alpha=0: max |vol - sigma0| = {worst:.2e}"


CHECKS: dict[str, Callable] = {
    "fbm_variance": check_fbm_variance,
    "fbm_bm_reduction": check_fbm_bm_reduction,
    "fbm_closed_form": check_fbm_closed_form,
    "covariance_symmetry": check_covariance_symmetry,
    "vega_gamma_identity": check_vega_gamma,
    "heat_equation": check_heat_equation,
    "implied_vol_round_trip": check_implied_vol_round_trip,
    "martingales": check_martingales,
    "thread_bit_stability": check_thread_stability,
    "bs_limit": check_bs_limit,
}


def run_checks(inject_fault: Optional[str] = None, only=None) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS.items():
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            ok, detail = fn(inject_fault=inject_fault)
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
