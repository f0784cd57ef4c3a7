"""Experiment orchestration: scenario tables, decay ladders, limit constants, prices, self-test."""
from __future__ import annotations

import csv
import itertools
import json
import logging
import math
import platform
import time
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import jsonschema
import numpy as np
import scipy

from . import __version__
from .asymptotics import (
    DecayFit, compare_prediction, decay_series, decay_slope, limit_constants,
)
from .errors import InsufficientSignal, RoughVolError
from .gaussian_process import TimeGrid
from .pricing import implied_vol_estimate, call_estimate, zero_vanna_report
from .rbergomi import MCConfig, ModelParams, simulate_scenario
from .reference_values import benchmark
from .selftest import run_checks

log = logging.getLogger(__name__)

PAPER_SCALE_PATHS = 10_000_000
PAPER_SCALE_STEPS = 250
DEFAULT_DELTAS = (1.0, 0.5, 0.25, 0.125)

TABLE_COLUMNS = [
    "scenario_id", "H", "rho", "alpha", "sigma0", "T_minus_t", "tau_minus_T",
    "Ev", "I_khat", "ATMI", "khat", "diff_khat", "diff_atm",
    "se_Ev", "se_I_khat", "se_ATMI", "se_diff_khat", "se_diff_atm",
    "seed", "n_paths", "steps_per_year", "estimator", "error",
]


class ConfigError(RoughVolError, ValueError):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("roughvol").joinpath("config_schema.json").read_text())


@dataclass
class ExperimentConfig:
    mc: MCConfig
    mode: str = "table"
    sigma0: float = 0.2
    X0: float = 0.0
    H: list = field(default_factory=lambda: [0.1])
    rho: list = field(default_factory=lambda: [-0.8])
    alpha: list = field(default_factory=lambda: [0.8])
    T_minus_t: list = field(default_factory=lambda: [0.5])
    tau_minus_T: list = field(default_factory=lambda: [0.5])
    out_dir: Path = Path("out")
    prefix: str = "roughvol"
    deltas: tuple = DEFAULT_DELTAS
    strikes: Optional[list] = None
    compare: bool = False
    inject_fault: Optional[str] = None
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            jsonschema.validate(data, load_schema())
        except jsonschema.ValidationError as exc:
            raise ConfigError(f"invalid config: {exc.message}") from exc
        model = data.get("model", {})
        sc = data.get("scenarios", {})
        out = data.get("output", {})
        mc = MCConfig(**data["mc"])
        kwargs = dict(
            mc=mc,
            mode=data.get("mode", "table"),
            sigma0=model.get("sigma0", 0.2),
            X0=model.get("X0", 0.0),
            out_dir=Path(out.get("dir", "out")),
            prefix=out.get("prefix", "roughvol"),
            deltas=tuple(data.get("decay", {}).get("deltas", DEFAULT_DELTAS)),
            strikes=data.get("price", {}).get("strikes"),
            compare=data.get("asymptotics", {}).get("compare", False),
            inject_fault=data.get("selftest", {}).get("inject_fault"),
            raw=data,
        )
        for key in ("H", "rho", "alpha", "T_minus_t", "tau_minus_T"):
            if key in sc:
                kwargs[key] = list(sc[key])
        cfg = cls(**kwargs)
        for params, _, _ in cfg.cells():
            pass  # ModelParams validates each cell
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def cells(self):
        for H, rho, alpha, tt, dd in itertools.product(self.H, self.rho, self.alpha, self.T_minus_t, self.tau_minus_T):
            yield ModelParams(self.sigma0, alpha, H, rho, self.X0), float(tt), float(dd)

    def grid(self, T_minus_t: float, tau_minus_T: float) -> TimeGrid:
        return TimeGrid(0.0, T_minus_t, T_minus_t + tau_minus_T, self.mc.steps_per_year)


def apply_overrides(cfg: ExperimentConfig, seed: Optional[int] = None, paths: Optional[int] = None,
                    paper_scale: bool = False, mode: Optional[str] = None) -> ExperimentConfig:
    mc = cfg.mc
    if seed is not None:
        mc = replace(mc, seed=seed)
    if paths is not None:
        mc = replace(mc, n_paths=paths)
    if paper_scale:
        log.warning("paper-scale run: %d paths x %d steps/year per cell; expect hours of runtime",
                    PAPER_SCALE_PATHS, PAPER_SCALE_STEPS)
        mc = replace(mc, n_paths=PAPER_SCALE_PATHS, steps_per_year=PAPER_SCALE_STEPS)
    elif mc.n_paths >= PAPER_SCALE_PATHS:
        raise ConfigError(f"n_paths >= {PAPER_SCALE_PATHS} requires --paper-scale")
    cfg = replace(cfg, mc=mc)
    if mode is not None:
        cfg = replace(cfg, mode=mode)
    return cfg


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))  # shortest round-tripping form
    if isinstance(v, np.integer):
        return str(int(v))
    return str(v)


def write_csv(path: Path, columns, rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\r\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(row.get(c)) for c in columns])
    return path


def _pct(v, signed=False) -> str:
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return "n/a"
    return f"{100 * v:+.2f}%" if signed else f"{100 * v:.2f}%"


# ---------------------------------------------------------------- table

def run_table(cfg: ExperimentConfig) -> list[dict]:
    """One zero-vanna report per scenario cell; failures are recorded in the row."""
    rows = []
    for params, tt, dd in cfg.cells():
        sid = f"H={params.H:g},rho={params.rho:g},alpha={params.alpha:g},T-t={tt:g},tau-T={dd:g}"
        t0 = time.perf_counter()
        try:
            row = zero_vanna_report(params, cfg.grid(tt, dd), cfg.mc, scenario_id=sid).row()
            row["error"] = ""
        except (RoughVolError, ArithmeticError, ValueError) as exc:
            row = {
                "scenario_id": sid, "H": params.H, "rho": params.rho, "alpha": params.alpha,
                "sigma0": params.sigma0, "T_minus_t": tt, "tau_minus_T": dd, "seed": cfg.mc.seed,
                "n_paths": cfg.mc.n_paths, "steps_per_year": cfg.mc.steps_per_year,
                "estimator": cfg.mc.estimator, "error": f"{type(exc).__name__}: {exc}",
            }
        log.info("%s done in %.1fs", sid, time.perf_counter() - t0)
        rows.append(row)
    return rows


def table_markdown(rows: list[dict]) -> str:
    """Tables laid out as H x quantity rows against (T-t, tau-T) columns."""
    out = []
    labels = [("Ev", "E_t[v_T]"), ("I_khat", "I(k_hat)"), ("ATMI", "ATMI"),
              ("diff_khat", "I(k_hat) - E_t[v_T]"), ("diff_atm", "ATMI - E_t[v_T]")]
    groups = sorted({(r["rho"], r["alpha"]) for r in rows})
    for rho, alpha in groups:
        sub = [r for r in rows if r["rho"] == rho and r["alpha"] == alpha]
        cols = sorted({(r["T_minus_t"], r["tau_minus_T"]) for r in sub})
        index = {(r["H"], r["T_minus_t"], r["tau_minus_T"]): r for r in sub}
        out.append(f"### rho = {rho:g}, alpha = {alpha:g}\n")
        out.append("| H | T-t | " + " | ".join(f"{c[0]:g}" for c in cols) + " |")
        out.append("| | tau-T | " + " | ".join(f"{c[1]:g}" for c in cols) + " |")
        out.append("|---|---|" + "---:|" * len(cols))
        has_ref = False
        for H in sorted({r["H"] for r in sub}):
            for i, (key, label) in enumerate(labels):
                cells = []
                for c in cols:
                    r = index.get((H, *c))
                    if r is None or r.get("error"):
                        cells.append("error" if r else "")
                    else:
                        cells.append(_pct(r[key]))
                        has_ref |= benchmark(rho, alpha, H, *c, key) is not None
                out.append(f"| {H:g} | {label} | " + " | ".join(cells) + " |" if i == 0 else
                           f"| | {label} | " + " | ".join(cells) + " |")
        out.append("")
        if has_ref:
            out.append("Deviation from benchmark values (vol points):\n")
            out.append("| H | quantity | " + " | ".join(f"{a:g}/{b:g}" for a, b in cols) + " |")
            out.append("|---|---|" + "---:|" * len(cols))
            for H in sorted({r["H"] for r in sub}):
                for key, label in labels:
                    cells = []
                    for c in cols:
                        r = index.get((H, *c))
                        ref = benchmark(rho, alpha, H, *c, key)
                        ok = r is not None and not r.get("error") and ref is not None
                        cells.append(_pct(r[key] - ref, signed=True) if ok else "")
                    out.append(f"| {H:g} | {label} | " + " | ".join(cells) + " |")
            out.append("")
    return "\n".join(out)


# ---------------------------------------------------------------- decay

def run_decay(cfg: ExperimentConfig):
    """Zero-vanna error on a ladder of ``tau - T`` for the first scenario cell.

    Every rung uses the same seed (common random numbers across the ladder).
    """
    params, tt, _ = next(cfg.cells())
    series, reports = decay_series(params, tt, cfg.deltas, cfg.mc)
    try:
        fit: Optional[DecayFit] = decay_slope(series)
        status = "ok"
    except InsufficientSignal as exc:
        fit, status = None, f"InsufficientSignal: {exc}"
    consts = limit_constants(params)
    rows = []
    for d, e, se in zip(series.deltas, series.errors, series.std_errors):
        pred = consts.total * d ** (2 * params.H)
        rows.append({"H": params.H, "rho": params.rho, "alpha": params.alpha, "T_minus_t": tt,
                     "tau_minus_T": float(d), "diff_khat": float(e), "se_diff_khat": float(se),
                     "predicted": pred, "resolvable": bool(abs(e) > 3 * se),
                     "seed": cfg.mc.seed, "n_paths": cfg.mc.n_paths, "steps_per_year": cfg.mc.steps_per_year})
    return series, fit, status, rows


DECAY_COLUMNS = ["H", "rho", "alpha", "T_minus_t", "tau_minus_T", "diff_khat", "se_diff_khat",
                 "predicted", "resolvable", "seed", "n_paths", "steps_per_year"]


def decay_markdown(fit: Optional[DecayFit], status: str, rows, H: float) -> str:
    lines = ["| tau-T | I(k_hat) - E[v] | SE | predicted |", "|---:|---:|---:|---:|"]
    for r in rows:
        lines.append(f"| {r['tau_minus_T']:g} | {_pct(r['diff_khat'], True)} | {100 * r['se_diff_khat']:.4f} | "
                     f"{_pct(r['predicted'], True)} |")
    if fit is not None:
        lines.append(f"\nslope = {fit.slope:.4f} +/- {fit.slope_se:.4f} (2H = {2 * H:g}), r^2 = {fit.r2:.4f}")
    else:
        lines.append(f"\n{status}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- asymptotics

ASYMPTOTICS_COLUMNS = ["H", "rho", "alpha", "sigma0", "term1", "term2", "term3", "total",
                       "homogeneity_rel_dev"]
COMPARE_COLUMNS = ["H", "rho", "alpha", "T_minus_t", "tau_minus_T", "measured", "measured_se",
                   "predicted", "ratio", "sign_agrees", "seed", "n_paths", "steps_per_year"]


def run_asymptotics(cfg: ExperimentConfig):
    rows, compare_rows = [], []
    seen = set()
    for params, tt, dd in cfg.cells():
        key = (params.H, params.rho, params.alpha)
        if key not in seen:
            seen.add(key)
            base = limit_constants(params, 1.0)
            dev = 0.0
            for d in (0.5, 0.25):
                other = limit_constants(params, d)
                for a, b in zip((base.term1, base.term2, base.term3), (other.term1, other.term2, other.term3)):
                    if a != 0:
                        dev = max(dev, abs(b - a) / abs(a))
            rows.append({"H": params.H, "rho": params.rho, "alpha": params.alpha, "sigma0": params.sigma0,
                         "term1": base.term1, "term2": base.term2, "term3": base.term3,
                         "total": base.total, "homogeneity_rel_dev": dev})
        if cfg.compare:
            cmp = compare_prediction(params, cfg.grid(tt, dd), cfg.mc)
            compare_rows.append({"H": params.H, "rho": params.rho, "alpha": params.alpha, "T_minus_t": tt,
                                 "tau_minus_T": dd, "measured": cmp.measured, "measured_se": cmp.measured_se,
                                 "predicted": cmp.predicted, "ratio": cmp.ratio, "sign_agrees": cmp.sign_agrees,
                                 "seed": cfg.mc.seed, "n_paths": cfg.mc.n_paths,
                                 "steps_per_year": cfg.mc.steps_per_year})
    return rows, compare_rows


# ---------------------------------------------------------------- price

PRICE_COLUMNS = ["H", "rho", "alpha", "sigma0", "T_minus_t", "tau_minus_T", "k", "price", "se_price",
                 "beta", "implied_vol", "se_implied_vol", "seed", "n_paths", "steps_per_year", "estimator", "error"]


def run_price(cfg: ExperimentConfig) -> list[dict]:
    rows = []
    for params, tt, dd in cfg.cells():
        sc = simulate_scenario(params, cfg.grid(tt, dd), cfg.mc)
        strikes = cfg.strikes if cfg.strikes is not None else [0.0]
        for k in strikes:
            est = call_estimate(sc, k)
            row = {"H": params.H, "rho": params.rho, "alpha": params.alpha, "sigma0": params.sigma0,
                   "T_minus_t": tt, "tau_minus_T": dd, "k": float(k), "price": est.value,
                   "se_price": est.std_error, "beta": est.beta, "seed": cfg.mc.seed,
                   "n_paths": cfg.mc.n_paths, "steps_per_year": cfg.mc.steps_per_year,
                   "estimator": cfg.mc.estimator, "error": ""}
            try:
                vol, vse, _, _ = implied_vol_estimate(sc, k)
                row.update(implied_vol=vol, se_implied_vol=vse)
            except RoughVolError as exc:
                row["error"] = f"{type(exc).__name__}: {exc}"
            rows.append(row)
    return rows


# ---------------------------------------------------------------- dispatch

def run(cfg: ExperimentConfig) -> dict:
    """Run ``cfg.mode``, write outputs under ``cfg.out_dir`` and return the manifest."""
    started = time.time()
    t0 = time.perf_counter()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = cfg.prefix
    outputs = []
    status = "ok"
    summary: dict = {}
    if cfg.mode == "table":
        rows = run_table(cfg)
        outputs.append(write_csv(out / f"{p}_table.csv", TABLE_COLUMNS, rows))
        (out / f"{p}_table.md").write_text(table_markdown(rows))
        outputs.append(out / f"{p}_table.md")
        summary["failed_cells"] = sum(1 for r in rows if r.get("error"))
    elif cfg.mode == "decay":
        series, fit, status_msg, rows = run_decay(cfg)
        outputs.append(write_csv(out / f"{p}_decay.csv", DECAY_COLUMNS, rows))
        (out / f"{p}_decay.md").write_text(decay_markdown(fit, status_msg, rows, rows[0]["H"]))
        outputs.append(out / f"{p}_decay.md")
        summary["fit"] = None if fit is None else {
            "slope": fit.slope, "slope_se": fit.slope_se, "intercept": fit.intercept, "r2": fit.r2}
        summary["status"] = status_msg
    elif cfg.mode == "asymptotics":
        rows, compare_rows = run_asymptotics(cfg)
        outputs.append(write_csv(out / f"{p}_limits.csv", ASYMPTOTICS_COLUMNS, rows))
        if compare_rows:
            outputs.append(write_csv(out / f"{p}_compare.csv", COMPARE_COLUMNS, compare_rows))
    elif cfg.mode == "price":
        rows = run_price(cfg)
        outputs.append(write_csv(out / f"{p}_prices.csv", PRICE_COLUMNS, rows))
    elif cfg.mode == "selftest":
        results = run_checks(cfg.inject_fault)
        rows = [{"check": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)}
                for r in results]
        outputs.append(write_csv(out / f"{p}_selftest.csv", ["check", "passed", "detail", "seconds"], rows))
        failed = [r.name for r in results if not r.passed]
        summary["failed"] = failed
        status = "fail" if failed else "ok"
    else:
        raise ConfigError(f"unknown mode {cfg.mode!r}")
    manifest = {
        "mode": cfg.mode,
        "status": status,
        "config": cfg.raw,
        "effective_mc": {k: getattr(cfg.mc, k) for k in cfg.mc.__dataclass_fields__},
        "summary": summary,
        "outputs": [str(o) for o in outputs],
        "library_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "started_unix": started,
        "elapsed_seconds": time.perf_counter() - t0,
    }
    (out / f"{p}_run_manifest.json").write_text(json.dumps(manifest, indent=2, default=str))
    return manifest
