"""Exit criteria at desk scale (5e5 paths, 100 steps per year).

Each test appends one PASS/FAIL line that is echoed in the terminal summary.
Table runs are cached per session so the dominance and sign checks reuse them.
"""
import math
import time

import pytest

from roughvol import gaussian_process as gp
from roughvol.asymptotics import decay_series, decay_slope, limit_constants
from roughvol.errors import InsufficientSignal
from roughvol.pricing import price_forward_start_call, zero_vanna_report
from roughvol.rbergomi import MCConfig, ModelParams
from roughvol.reference_values import COLUMNS, HURSTS, benchmark
from roughvol.runner import ExperimentConfig, run_table
from roughvol.selftest import run_checks

from oracles import ORACLE_SETS, limit_constants_oracle

pytestmark = pytest.mark.acceptance

SEED = 20240611
DESK = {"seed": SEED, "n_paths": 500_000, "steps_per_year": 100, "batch_size": 20_000}
VP = 0.01  # one vol point
SPOT_CELLS = [(0.05, 0.5, 0.5), (0.05, 2.0, 2.0), (0.1, 0.5, 1.0), (0.1, 1.0, 2.0),
              (0.3, 0.5, 2.0), (0.3, 1.0, 1.0), (0.3, 2.0, 0.5)]


@pytest.fixture
def report(request):
    def emit(n, passed, text):
        line = f"{'PASS' if passed else 'FAIL'} [{n}] {text}"
        print(line)
        request.config.acceptance_lines.append(line)
    return emit


def _table(rho, alpha, cells=None):
    data = {"mc": dict(DESK), "scenarios": {"H": list(HURSTS), "rho": [rho], "alpha": [alpha],
                                            "T_minus_t": [0.5, 1.0, 2.0], "tau_minus_T": [0.5, 1.0, 2.0]}}
    cfg = ExperimentConfig.from_dict(data)
    if cells is not None:
        rows = []
        for H, tt, dd in cells:
            sub = ExperimentConfig.from_dict({**data, "scenarios": {"H": [H], "rho": [rho], "alpha": [alpha],
                                                                    "T_minus_t": [tt], "tau_minus_T": [dd]}})
            rows += run_table(sub)
        return rows
    return run_table(cfg)


@pytest.fixture(scope="session")
def table1():
    return _table(0.0, 0.8)


@pytest.fixture(scope="session")
def table2():
    return _table(-0.8, 0.8)


@pytest.fixture(scope="session")
def table3():
    return _table(0.0, 2.0, SPOT_CELLS)


@pytest.fixture(scope="session")
def table4():
    return _table(-0.8, 2.0, SPOT_CELLS)


def _ref(row, q):
    return benchmark(row["rho"], row["alpha"], row["H"], row["T_minus_t"], row["tau_minus_T"], q)


def _cell(row):
    return f"H={row['H']:g} T-t={row['T_minus_t']:g} tau-T={row['tau_minus_T']:g}"


def test_uncorrelated_table(table1, report):
    assert len(table1) == len(HURSTS) * len(COLUMNS)
    bad = []
    worst_ev = worst_diff = 0.0
    for r in table1:
        if r["error"]:
            bad.append(f"{_cell(r)}: {r['error']}")
            continue
        dev = abs(r["Ev"] - _ref(r, "Ev"))
        worst_ev, worst_diff = max(worst_ev, dev), max(worst_diff, abs(r["diff_khat"]))
        if dev > 0.10 * VP or abs(r["diff_khat"]) > 0.05 * VP:
            bad.append(f"{_cell(r)}: Ev off by {dev / VP:.3f}vp, |I-E|={abs(r['diff_khat']) / VP:.3f}vp")
    report(1, not bad, f"rho=0 alpha=0.8, 27 cells: max |Ev-ref|={worst_ev / VP:.3f}vp (<=0.10), "
                       f"max |I-E|={worst_diff / VP:.3f}vp (<=0.05)" + (f"; {bad}" if bad else ""))
    assert not bad


def test_correlated_table(table2, report):
    assert len(table2) == len(HURSTS) * len(COLUMNS)
    bad = []
    wk = wa = 0.0
    for r in table2:
        if r["error"]:
            bad.append(f"{_cell(r)}: {r['error']}")
            continue
        dk = abs(r["diff_khat"] - _ref(r, "diff_khat"))
        da = abs(r["diff_atm"] - _ref(r, "diff_atm"))
        wk, wa = max(wk, dk), max(wa, da)
        if dk > 0.10 * VP or da > 0.12 * VP:
            bad.append(f"{_cell(r)}: I-E off {dk / VP:.3f}vp, ATMI-E off {da / VP:.3f}vp")
    report(2, not bad, f"rho=-0.8 alpha=0.8, 27 cells: max dev I-E={wk / VP:.3f}vp (<=0.10), "
                       f"ATMI-E={wa / VP:.3f}vp (<=0.12)" + (f"; {bad}" if bad else ""))
    assert not bad


def _spot_ok(r):
    if r["error"]:
        return False, math.inf
    dev = max(abs(r[q] - _ref(r, q)) for q in ("diff_khat", "diff_atm"))
    return dev <= 0.15 * VP, dev


def test_high_vol_of_vol_spot_checks(table3, table4, report):
    lines, ok = [], True
    for name, rows in (("rho=0", table3), ("rho=-0.8", table4)):
        results = [_spot_ok(r) for r in rows]
        n_ok = sum(p for p, _ in results)
        worst = max(d for _, d in results)
        ok &= n_ok >= 6
        lines.append(f"{name}: {n_ok}/{len(rows)} cells within 0.15vp (worst {worst / VP:.3f}vp)")
    key = next(r for r in table4 if (r["H"], r["T_minus_t"], r["tau_minus_T"]) == (0.3, 0.5, 2.0))
    key_ok = _spot_ok(key)[0]
    ok &= key_ok
    lines.append(f"key cell I-E={100 * key['diff_khat']:.2f}% (ref -1.65%), ATMI-E={100 * key['diff_atm']:.2f}% "
                 f"(ref -2.05%)")
    report(3, ok, "alpha=2: " + "; ".join(lines))
    assert ok


def test_zero_vanna_beats_atm(table2, table4, report):
    checked, violations = 0, []
    for r in list(table2) + list(table4):
        if r["error"]:
            continue
        if abs(r["diff_khat"]) > 3 * r["se_diff_khat"] and abs(r["diff_atm"]) > 3 * r["se_diff_atm"]:
            checked += 1
            if not abs(r["diff_khat"]) < abs(r["diff_atm"]):
                violations.append(f"{r['alpha']:g}/{_cell(r)}")
    report(4, not violations, f"|I-E| < |ATMI-E| in {checked - len(violations)}/{checked} resolvable "
                              f"correlated cells" + (f"; violations {violations}" if violations else ""))
    assert checked > 0 and not violations


def test_black_scholes_limit(report):
    p = ModelParams(0.2, 0.0, 0.1, -0.8)
    grid = gp.TimeGrid(0.0, 0.5, 1.5, 100)
    mc = MCConfig(seed=SEED, n_paths=100_000)
    r = zero_vanna_report(p, grid, mc)
    # the implied-vol solver stops at 1e-12, so that is the floor when SE is zero
    floor = 1e-10
    checks = [abs(r.i_khat - 0.2) <= 3 * r.i_khat_se + floor,
              abs(r.atmi - 0.2) <= 3 * r.atmi_se + floor,
              abs(r.ev.value - 0.2) <= 3 * r.ev.std_error + floor]
    price = price_forward_start_call(p, grid, 0.0, mc)
    ratio = price.std_error / price.value
    ok = all(checks) and ratio < 1e-6
    report(5, ok, f"alpha=0: |I-s0|={abs(r.i_khat - 0.2):.1e}, |ATMI-s0|={abs(r.atmi - 0.2):.1e}, "
                  f"|E-s0|={abs(r.ev.value - 0.2):.1e}, SE/price={ratio:.1e} (<1e-6)")
    assert ok


def test_decay_order(report):
    # 200 steps per year puts every rung of the ladder on the grid
    mc = MCConfig(seed=SEED, n_paths=500_000, steps_per_year=200)
    deltas = (1.0, 0.5, 0.25, 0.125)
    t0 = time.perf_counter()
    corr, _ = decay_series(ModelParams(0.2, 0.8, 0.1, -0.8), 0.5, deltas, mc)
    fit = decay_slope(corr)
    in_band = -0.1 <= fit.slope <= 0.5
    flat, _ = decay_series(ModelParams(0.2, 0.8, 0.1, 0.0), 0.5, deltas, mc)
    try:
        flat_fit = decay_slope(flat)
        flat_ok = flat_fit.slope > fit.slope
        flat_msg = f"rho=0 slope {flat_fit.slope:.3f} > {fit.slope:.3f}"
    except InsufficientSignal as exc:
        flat_ok, flat_msg = True, f"rho=0 InsufficientSignal ({exc})"
    secs = time.perf_counter() - t0
    report(6, in_band and flat_ok, f"rho=-0.8 slope {fit.slope:.3f} +/- {fit.slope_se:.3f} in [-0.1, 0.5]; "
                                   f"{flat_msg}; {secs:.0f}s")
    assert in_band and flat_ok


def test_limit_constants(table2, report):
    worst = 0.0
    for p in ORACLE_SETS:
        got = limit_constants(p)
        for g, ref in zip((got.term1, got.term2, got.term3), limit_constants_oracle(p)):
            worst = max(worst, abs(g - ref) / abs(ref))
    mismatched, resolvable = [], 0
    for r in table2:
        if r["error"] or abs(r["diff_khat"]) <= 3 * r["se_diff_khat"]:
            continue
        resolvable += 1
        pred = limit_constants(ModelParams(r["sigma0"], r["alpha"], r["H"], r["rho"])).total
        if (pred < 0) != (r["diff_khat"] < 0):
            mismatched.append(_cell(r))
    ok = worst <= 1e-4 and not mismatched and resolvable > 0
    report(7, ok, f"max rel dev from quadrature oracle {worst:.1e} (<=1e-4) over {len(ORACLE_SETS)} sets; "
                  f"sign agrees in {resolvable - len(mismatched)}/{resolvable} resolvable rho=-0.8 cells")
    assert ok


def test_selftest_suite(report):
    t0 = time.perf_counter()
    results = run_checks()
    secs = time.perf_counter() - t0
    failed = [r.name for r in results if not r.passed]
    ok = not failed and secs < 60
    report(8, ok, f"selftest {len(results) - len(failed)}/{len(results)} checks green in {secs:.1f}s (<60s)"
                  + (f"; failed {failed}" if failed else ""))
    assert ok
