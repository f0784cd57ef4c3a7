"""Monte Carlo prices of forward-start calls, volatility-swap strikes and forward smiles.

Every estimate on a scenario reuses the same simulated paths, so smile points,
the volatility-swap strike and their differences share common random numbers.
The constant-``sigma0`` Black-Scholes asset driven by the same noise is the
control variate; its coefficient is fitted by regression on each run.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import black_scholes as bs
from .errors import EmptyBatch, ImpliedVolError, RoughVolError
from .gaussian_process import TimeGrid
from .rbergomi import MCConfig, ModelParams, SimulatedScenario, simulate_scenario

SMILE_VOL_TOL = 1e-12


@dataclass(frozen=True)
class MCEstimate:
    value: float
    std_error: float
    n_paths: int
    seed: int
    control_variate_used: bool = False
    beta: Optional[float] = None


def _scenario(params, grid, mc, scenario):
    if scenario is not None:
        return scenario
    if mc is None:
        raise ValueError("either mc or scenario is required")
    return simulate_scenario(params, grid, mc)


def adjusted_payoffs(scenario: SimulatedScenario, k: float, control_variate: Optional[bool] = None):
    """Per-path forward-start call payoffs after the control-variate correction.

    Returns ``(samples, beta)``; ``beta`` is ``None`` without a control.
    """
    if scenario.n_paths == 0:
        raise EmptyBatch("no paths to average")
    use_cv = scenario.mc.control_variate if control_variate is None else control_variate
    y, c = scenario.call_payoffs(k)
    if not use_cv:
        return y, None
    analytic = bs.bs_price(0.0, k, scenario.grid.forward_length, scenario.params.sigma0)
    cc = c - c.mean()
    var_c = float(cc @ cc)
    beta = float((y - y.mean()) @ cc / var_c) if var_c > 0 else 0.0
    return y - beta * (c - analytic), beta


def _estimate(samples: np.ndarray, scenario: SimulatedScenario, beta) -> MCEstimate:
    n = len(samples)
    se = float(np.std(samples, ddof=1) / math.sqrt(n)) if n > 1 else 0.0
    return MCEstimate(float(np.mean(samples)), se, n, scenario.mc.seed, beta is not None, beta)


def call_estimate(scenario: SimulatedScenario, k: float, control_variate: Optional[bool] = None) -> MCEstimate:
    samples, beta = adjusted_payoffs(scenario, k, control_variate)
    return _estimate(samples, scenario, beta)


def price_forward_start_call(params: ModelParams, grid: TimeGrid, k: float, mc: Optional[MCConfig] = None,
                             scenario: Optional[SimulatedScenario] = None) -> MCEstimate:
    """Price of ``(e^{X_tau - X_T} - e^k)_+`` seen from the grid start."""
    if not math.isfinite(k):
        raise ValueError("log-strike must be finite")
    return call_estimate(_scenario(params, grid, mc, scenario), k)


def vol_swap_strike(params: ModelParams, grid: TimeGrid, mc: Optional[MCConfig] = None,
                    scenario: Optional[SimulatedScenario] = None) -> MCEstimate:
    """Fair strike ``E[v_T]`` of the forward-start volatility swap."""
    sc = _scenario(params, grid, mc, scenario)
    if sc.n_paths == 0:
        raise EmptyBatch("no paths to average")
    return _estimate(sc.vol, sc, None)


def implied_vol_estimate(scenario: SimulatedScenario, k: float):
    """Implied vol of the forward-start call at ``k``: ``(vol, se, samples, vega)``.

    The standard error comes from the delta method, ``se(price) / vega``.
    """
    samples, _ = adjusted_payoffs(scenario, k)
    price = float(np.mean(samples))
    dt = scenario.grid.forward_length
    vol = bs.implied_vol(price, 0.0, k, dt, tol=SMILE_VOL_TOL)
    vega = bs.bs_vega(0.0, k, dt, vol)
    se = float(np.std(samples, ddof=1) / math.sqrt(len(samples)) / vega)
    return vol, se, samples, vega


class ForwardSmile:
    """Forward-start implied-vol smile from one simulated scenario.

    Calling the object interpolates the strike knots with a shape-preserving
    cubic and extrapolates flat; :meth:`exact` reprices at any strike on the
    same paths.
    """

    def __init__(self, scenario: SimulatedScenario, strikes: Sequence[float]):
        self.scenario = scenario
        self.errors: dict[float, str] = {}
        ks, vols, ses = [], [], []
        for k in sorted(float(s) for s in strikes):
            try:
                vol, se, _, _ = implied_vol_estimate(scenario, k)
            except ImpliedVolError as exc:
                self.errors[k] = f"{type(exc).__name__}: {exc}"
                continue
            ks.append(k)
            vols.append(vol)
            ses.append(se)
        if len(ks) < 2:
            raise RoughVolError(f"fewer than two smile knots could be inverted: {self.errors}")
        self.strikes = np.array(ks)
        self.vols = np.array(vols)
        self.std_errors = np.array(ses)
        self._interp = PchipInterpolator(self.strikes, self.vols, extrapolate=False)

    def __call__(self, k):
        k_arr = np.clip(np.asarray(k, dtype=float), self.strikes[0], self.strikes[-1])
        out = self._interp(k_arr)
        return float(out) if np.ndim(out) == 0 else out

    def exact(self, k: float) -> float:
        return implied_vol_estimate(self.scenario, k)[0]


def default_strikes(params: ModelParams, grid: TimeGrid, n: int = 13) -> np.ndarray:
    width = 3.0 * params.sigma0 * math.sqrt(grid.forward_length)
    return np.linspace(-width, width, n)


def forward_smile(params: ModelParams, grid: TimeGrid, strikes: Optional[Sequence[float]] = None,
                  mc: Optional[MCConfig] = None, scenario: Optional[SimulatedScenario] = None) -> ForwardSmile:
    sc = _scenario(params, grid, mc, scenario)
    if strikes is None:
        strikes = default_strikes(params, grid)
    return ForwardSmile(sc, strikes)


@dataclass
class SmileReport:
    scenario_id: str
    params: ModelParams
    T_minus_t: float
    tau_minus_T: float
    ev: MCEstimate
    atmi: float
    atmi_se: float
    khat: float
    i_khat: float
    i_khat_se: float
    diff_khat: float
    diff_khat_se: float
    diff_atm: float
    diff_atm_se: float
    n_paths: int
    seed: int
    steps_per_year: int
    estimator: str
    extra: dict = field(default_factory=dict)

    def row(self) -> dict:
        p = asdict(self.params)
        return {
            "scenario_id": self.scenario_id,
            "H": p["H"], "rho": p["rho"], "alpha": p["alpha"], "sigma0": p["sigma0"],
            "T_minus_t": self.T_minus_t, "tau_minus_T": self.tau_minus_T,
            "Ev": self.ev.value, "I_khat": self.i_khat, "ATMI": self.atmi, "khat": self.khat,
            "diff_khat": self.diff_khat, "diff_atm": self.diff_atm,
            "se_Ev": self.ev.std_error, "se_I_khat": self.i_khat_se, "se_ATMI": self.atmi_se,
            "se_diff_khat": self.diff_khat_se, "se_diff_atm": self.diff_atm_se,
            "seed": self.seed, "n_paths": self.n_paths, "steps_per_year": self.steps_per_year,
            "estimator": self.estimator,
        }


def _diff_se(samples, vega, vol_samples) -> float:
    # influence of each path on (implied vol - E[v]) at first order
    d = samples / vega - vol_samples
    return float(np.std(d, ddof=1) / math.sqrt(len(d)))


def zero_vanna_report(params: ModelParams, grid: TimeGrid, mc: Optional[MCConfig] = None,
                      scenario: Optional[SimulatedScenario] = None, scenario_id: str = "") -> SmileReport:
    """E[v_T], ATM implied vol and zero-vanna implied vol of one scenario, with their differences."""
    sc = _scenario(params, grid, mc, scenario)
    dt = grid.forward_length
    ev = vol_swap_strike(params, grid, scenario=sc)
    atmi, atmi_se, atm_samples, atm_vega = implied_vol_estimate(sc, 0.0)
    smile = ForwardSmile(sc, default_strikes(params, grid))
    khat = bs.zero_vanna_strike(smile.exact, dt)
    i_khat, i_se, k_samples, k_vega = implied_vol_estimate(sc, khat)
    return SmileReport(
        scenario_id=scenario_id,
        params=params,
        T_minus_t=grid.forward_start - grid.start_time,
        tau_minus_T=dt,
        ev=ev,
        atmi=atmi,
        atmi_se=atmi_se,
        khat=khat,
        i_khat=i_khat,
        i_khat_se=i_se,
        diff_khat=i_khat - ev.value,
        diff_khat_se=_diff_se(k_samples, k_vega, sc.vol),
        diff_atm=atmi - ev.value,
        diff_atm_se=_diff_se(atm_samples, atm_vega, sc.vol),
        n_paths=sc.n_paths,
        seed=sc.mc.seed,
        steps_per_year=grid.steps_per_year,
        estimator=sc.estimator,
        extra={"smile_strikes": smile.strikes.tolist(), "smile_vols": smile.vols.tolist()},
    )
