import math
from dataclasses import replace

import numpy as np
import pytest

from roughvol import black_scholes as bs
from roughvol import gaussian_process as gp
from roughvol.errors import EmptyBatch
from roughvol.pricing import (
    ForwardSmile, adjusted_payoffs, call_estimate, default_strikes, implied_vol_estimate,
    price_forward_start_call, vol_swap_strike, zero_vanna_report,
)
from roughvol.rbergomi import MCConfig, ModelParams, simulate_scenario

GRID = gp.TimeGrid(0.0, 0.5, 1.0, 50)
PARAMS = ModelParams(0.2, 0.8, 0.1, -0.8)


@pytest.fixture(scope="module")
def scenario():
    return simulate_scenario(PARAMS, GRID, MCConfig(seed=21, n_paths=40_000, steps_per_year=50))


@pytest.mark.parametrize("estimator", ["pathwise", "conditional"])
def test_control_variate_does_not_hurt(estimator):
    sc = simulate_scenario(PARAMS, GRID, MCConfig(seed=2, n_paths=40_000, steps_per_year=50, estimator=estimator))
    for k in (-0.1, 0.0, 0.1):
        plain, _ = adjusted_payoffs(sc, k, control_variate=False)
        cv, beta = adjusted_payoffs(sc, k, control_variate=True)
        assert beta is not None
        assert cv.var() <= 1.01 * plain.var()


def test_standard_error_scales_with_sqrt_n():
    mc = MCConfig(seed=4, n_paths=40_000, steps_per_year=50, estimator="pathwise")
    a = price_forward_start_call(PARAMS, GRID, 0.0, mc)
    b = price_forward_start_call(PARAMS, GRID, 0.0, replace(mc, n_paths=80_000))
    assert 0.65 <= b.std_error / a.std_error <= 0.75


def test_reported_se_matches_seed_dispersion():
    # 12 independent seeds; the spread of the estimates should match the reported SE
    vals, ses = [], []
    for seed in range(12):
        sc = simulate_scenario(PARAMS, GRID, MCConfig(seed=100 + seed, n_paths=5_000, steps_per_year=50))
        vol, se, _, _ = implied_vol_estimate(sc, 0.0)
        vals.append(vol)
        ses.append(se)
    ratio = np.std(vals, ddof=1) / np.mean(ses)
    assert 0.5 < ratio < 1.8


def test_alpha_zero_prices_black_scholes():
    p = replace(PARAMS, alpha=0.0)
    for est in ("pathwise", "conditional"):
        mc = MCConfig(seed=1, n_paths=10_000, steps_per_year=50, estimator=est)
        e = price_forward_start_call(p, GRID, 0.05, mc)
        ref = bs.bs_price(0.0, 0.05, 0.5, 0.2)
        assert e.value == pytest.approx(ref, rel=1e-12)
        assert e.std_error < 1e-6 * ref


def test_vol_swap_below_sigma0_by_jensen(scenario):
    ev = vol_swap_strike(PARAMS, GRID, scenario=scenario)
    assert ev.value < 0.2
    assert ev.std_error > 0


def test_negative_correlation_skews_the_smile():
    def skew(rho):
        sc = simulate_scenario(replace(PARAMS, rho=rho), GRID, MCConfig(seed=9, n_paths=20_000, steps_per_year=50))
        return implied_vol_estimate(sc, -0.1)[0] - implied_vol_estimate(sc, 0.1)[0]
    s_corr, s_flat = skew(-0.8), skew(0.0)
    assert s_corr > 0
    assert s_corr > 5 * abs(s_flat)


def test_smile_interpolates_knots(scenario):
    ks = default_strikes(PARAMS, GRID)
    smile = ForwardSmile(scenario, ks)
    np.testing.assert_allclose(smile(smile.strikes), smile.vols, rtol=1e-14)
    assert smile(10.0) == smile.vols[-1]
    assert smile(-10.0) == smile.vols[0]
    assert smile.exact(0.0) == pytest.approx(smile(0.0), abs=1e-12)
    mid = 0.5 * (ks[5] + ks[6])
    assert smile(mid) == pytest.approx(smile.exact(mid), abs=2e-4)


def test_smile_records_failed_strikes(scenario):
    smile = ForwardSmile(scenario, [-0.1, 0.0, 0.1, 40.0])
    assert 40.0 in smile.errors
    assert len(smile.strikes) == 3


def test_zero_vanna_report(scenario):
    r = zero_vanna_report(PARAMS, GRID, scenario=scenario)
    assert r.khat == pytest.approx(-0.5 * r.i_khat**2 * 0.5, abs=1e-9)
    assert r.diff_khat == pytest.approx(r.i_khat - r.ev.value)
    assert r.diff_atm == pytest.approx(r.atmi - r.ev.value)
    assert abs(r.diff_khat) < abs(r.diff_atm)
    # I(k_hat) and E[v] move together on common paths, so the difference beats independent errors
    assert r.diff_khat_se < math.hypot(r.i_khat_se, r.ev.std_error)
    row = r.row()
    assert row["n_paths"] == 40_000 and row["estimator"] == "conditional"


def test_call_estimate_needs_paths():
    sc = simulate_scenario(PARAMS, GRID, MCConfig(seed=0, n_paths=0, steps_per_year=50))
    with pytest.raises(EmptyBatch):
        call_estimate(sc, 0.0)


def test_price_rejects_bad_strike():
    with pytest.raises(ValueError):
        price_forward_start_call(PARAMS, GRID, math.inf, MCConfig(seed=0, n_paths=10, steps_per_year=50))
