"""Batch front end: ``cointegrate``, ``filter``, ``backtest``, ``risk`` and ``sweep``.

Every command reads a YAML run configuration and the artifacts its
predecessors left in ``output_dir``:

=====================  ===============================================
``cointegrate``        cointegration.json, spread.csv
``filter``             model_selection.json, trace.csv, hmm_params.json
``backtest``           ledger_<kind>.csv, performance.json
``risk``               risk_report.json, risk_kde_<kind>.csv
``sweep``              sweep_<param>.json (plus per-value subdirectories)
=====================  ===============================================

Exit status is 0 on success, 2 when the trace test finds no cointegration
and 1 on any other error.
"""
from __future__ import annotations

import argparse
import copy
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from hmmstatarb import market_data as md
from hmmstatarb.econometrics import adf_test, build_spread, fit_vecm, kpss_test, select_var_lag
from hmmstatarb.econometrics.spread import SpreadSeries
from hmmstatarb.exceptions import DataError, NoCointegrationError, StatArbError
from hmmstatarb.ou_hmm import (
    DAILY_DELTA,
    EstimateTrace,
    HmmParams,
    fit_filter_em,
    select_num_states,
    to_continuous,
)
from hmmstatarb.risk_engine import SimulationConfig, run_risk_analysis
from hmmstatarb.strategy_engine import (
    SPREAD_KINDS,
    StrategyConfig,
    buy_and_hold,
    run_backtest,
    write_summary,
)

EXIT_OK, EXIT_ERROR, EXIT_NO_COINTEGRATION = 0, 1, 2

DEFAULTS = {
    "frequency_for_cointegration": "weekly",
    "cointegration": {"var_max_lag": 8, "adf_max_lag": None},
    "hmm": {"candidates": [1, 2, 3], "m": 10, "n_init": 20, "delta": DAILY_DELTA},
    "cost_c": 0.0080,
    "strategies": None,  # None: the five spread strategies, plus BuyAndHold when a benchmark is given
    "risk": {"n_sim": 1000, "seed": 0, "var_levels": [0.99, 0.95, 0.90], "workers": 1},
    "output_dir": "out",
}


@dataclass
class SeriesSpec:
    name: str
    path: Path
    date_column: str = "date"
    price_column: str = "price"

    def load(self) -> md.PriceSeries:
        return md.load_csv(self.path, self.date_column, self.price_column, self.name)


@dataclass
class RunConfig:
    series: list
    split: md.SampleSplit
    frequency: str = "weekly"
    var_max_lag: int = 8
    adf_max_lag: int | None = None
    candidates: tuple = (1, 2, 3)
    m: int = 10
    n_init: int = 20
    delta: float = DAILY_DELTA
    strategies: list = field(default_factory=list)
    risk: SimulationConfig = field(default_factory=SimulationConfig)
    output_dir: Path = Path("out")
    benchmark: SeriesSpec | None = None
    raw: dict = field(default_factory=dict, repr=False)
    root: Path = Path(".")

    def __post_init__(self):
        if self.frequency not in md.FREQUENCIES:
            raise DataError(f"frequency_for_cointegration must be one of {md.FREQUENCIES}")
        if self.m < 1:
            raise DataError("hmm.m must be >= 1")
        if not self.candidates or not set(self.candidates) <= {1, 2, 3}:
            raise DataError(f"hmm.candidates must be a non-empty subset of {{1, 2, 3}}, got {self.candidates}")
        if len(self.series) < 2:
            raise DataError("data.series needs at least two price series")


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in (over or {}).items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def _series_spec(d: dict, root: Path) -> SeriesSpec:
    if "path" not in d:
        raise DataError(f"series entry without a path: {d}")
    p = Path(d["path"])
    if not p.is_absolute():
        p = root / p
    return SeriesSpec(str(d.get("name") or p.stem), p, d.get("date_column", "date"),
                      d.get("price_column", "price"))


def config_from_dict(raw: dict, root: Path = Path(".")) -> RunConfig:
    cfg = _merge(DEFAULTS, raw)
    data = cfg.get("data") or {}
    series = [_series_spec(s, root) for s in data.get("series", [])]
    bench = _series_spec(data["benchmark"], root) if data.get("benchmark") else None
    dates = cfg.get("dates") or {}
    try:
        split = md.SampleSplit(dates["t0"], dates["tB"], dates["T"])
    except KeyError as exc:
        raise DataError(f"dates.{exc.args[0]} is required") from None
    cost = float(cfg["cost_c"])
    strategies = cfg["strategies"]
    if strategies is None:
        strategies = [{"kind": k} for k in SPREAD_KINDS] + ([{"kind": "BuyAndHold"}] if bench else [])
    strats = []
    for s in strategies:
        s = dict(s)
        s.setdefault("cost_c", cost)
        if "increment_quantiles" in s:
            s["increment_quantiles"] = tuple(s["increment_quantiles"])
        strats.append(StrategyConfig(**s))
    r = cfg["risk"]
    risk = SimulationConfig(n_sim=int(r["n_sim"]), seed=int(r["seed"]),
                            var_levels=tuple(r["var_levels"]), workers=int(r.get("workers", 1)))
    out = Path(cfg["output_dir"])
    if not out.is_absolute():
        out = root / out
    h, c = cfg["hmm"], cfg["cointegration"]
    return RunConfig(series=series, split=split, frequency=cfg["frequency_for_cointegration"],
                     var_max_lag=int(c["var_max_lag"]), adf_max_lag=c.get("adf_max_lag"),
                     candidates=tuple(int(x) for x in h["candidates"]), m=int(h["m"]),
                     n_init=int(h["n_init"]), delta=float(h["delta"]), strategies=strats,
                     risk=risk, output_dir=out, benchmark=bench, raw=cfg, root=root)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise DataError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    except yaml.YAMLError as exc:
        raise DataError(f"{path}: invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"{path}: config must be a mapping")
    return config_from_dict(raw, path.parent)


# -- artifacts ---------------------------------------------------------------

def _write_json(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.datetime64, Path)):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o)}")


def _read_json(path: Path) -> dict:
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise DataError(f"missing artifact {path}; run the preceding command first") from exc


def daily_panel(cfg: RunConfig) -> md.PricePanel:
    panel = md.align([s.load() for s in cfg.series], "daily")
    return panel.between(cfg.split.t0, cfg.split.T)


def read_spread(out: Path) -> tuple[np.ndarray, np.ndarray]:
    path = out / "spread.csv"
    try:
        with path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise DataError(f"missing artifact {path}; run 'cointegrate' first") from exc
    return (np.array([r["date"] for r in rows], dtype="datetime64[D]"),
            np.array([float(r["S"]) for r in rows]))


def _n_train(dates, tB) -> int:
    n = int(np.searchsorted(dates, md.to_date(tB)))
    if not 0 < n < dates.size:
        raise DataError(f"breaking date {tB} leaves an empty training or test sample")
    return n


def _unit_roots(x, max_lag) -> dict:
    return {"adf": adf_test(x, max_lag=max_lag).to_dict(), "kpss": kpss_test(x).to_dict()}


# -- commands ----------------------------------------------------------------

def cmd_cointegrate(cfg: RunConfig) -> dict:
    """Unit roots, lag selection, Johansen/VECM on the training sample; daily spread over the window."""
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    daily = daily_panel(cfg)
    coint_panel = md.resample_weekly(daily) if cfg.frequency == "weekly" else daily
    train, _ = md.split(coint_panel, cfg.split.tB)
    unit = {}
    for i, name in enumerate(train.names):
        x = train.values[:, i]
        unit[name] = {"level": _unit_roots(x, cfg.adf_max_lag),
                      "difference": _unit_roots(np.diff(x), cfg.adf_max_lag)}
    p = select_var_lag(train, cfg.var_max_lag)
    res = fit_vecm(train, p, r=1)
    report = {
        "frequency": cfg.frequency,
        "train_rows": len(train),
        "t0": str(cfg.split.t0), "tB": str(cfg.split.tB), "T": str(cfg.split.T),
        "unit_roots": unit,
        "var_lag": p,
        "johansen": res.to_dict(),
        "cointegrated": res.selected_rank >= 1,
    }
    if res.selected_rank == 0:
        _write_json(out / "cointegration.json", report)
        raise NoCointegrationError(res)
    spread = build_spread(daily, res)
    n_tr = _n_train(spread.dates, cfg.split.tB)
    report["weights"] = spread.weights.tolist()
    report["spread_unit_roots"] = _unit_roots(spread.values[:n_tr], cfg.adf_max_lag)
    report["spread_stationary"] = bool(
        report["spread_unit_roots"]["adf"]["p_value"] < 0.05)
    _write_json(out / "cointegration.json", report)
    md.write_series_csv(out / "spread.csv", spread.dates, {"S": spread.values})
    return report


def cmd_filter(cfg: RunConfig) -> dict:
    """Choose N on the training spread, then run the filter-EM over training and test."""
    out = cfg.output_dir
    dates, y = read_spread(out)
    n_tr = _n_train(dates, cfg.split.tB)
    sel = select_num_states(y[:n_tr], cfg.candidates, m=cfg.m, n_init=cfg.n_init)
    N = sel.best
    trace = fit_filter_em(y, N, m=cfg.m, n_init=cfg.n_init, dates=dates, select_until=n_tr - 1)
    trace.to_csv(out / "trace.csv")
    params = trace.params_at(n_tr - 1)
    hp = {"N": N, "at": str(dates[n_tr - 1]), "start": trace.start, "discrete": params.to_dict()}
    try:
        hp["continuous"] = to_continuous(params, cfg.delta).to_dict()
    except DataError as exc:
        hp["continuous"] = None
        hp["continuous_note"] = str(exc)
    _write_json(out / "hmm_params.json", hp)
    report = sel.to_dict()
    report["train_rows"] = n_tr
    _write_json(out / "model_selection.json", report)
    return {"selection": report, "params": hp}


def _spread_series(out: Path) -> SpreadSeries:
    dates, s = read_spread(out)
    w = _read_json(out / "cointegration.json").get("weights")
    if w is None:
        raise DataError("cointegration.json holds no weights (rank 0 result)")
    return SpreadSeries(dates, s, np.asarray(w, dtype=float))


def cmd_backtest(cfg: RunConfig, cost_c: float | None = None, write: bool = True) -> dict:
    """Run every configured strategy over the test sample."""
    out = cfg.output_dir
    spread = _spread_series(out)
    trace = EstimateTrace.from_csv(out / "trace.csv")
    panel = daily_panel(cfg)
    if not np.array_equal(panel.dates, spread.dates):
        raise DataError("price data no longer matches spread.csv; rerun 'cointegrate'")
    ledgers = []
    for s in cfg.strategies:
        sc = s if cost_c is None or s.kind == "BuyAndHold" else s.with_cost(cost_c)
        if sc.kind == "BuyAndHold":
            if cfg.benchmark is None:
                raise DataError("BuyAndHold needs data.benchmark")
            b = cfg.benchmark.load()
            mask = (b.dates >= cfg.split.t0) & (b.dates <= cfg.split.T)
            bd, bp = b.dates[mask], b.prices[mask]
            lg = buy_and_hold(bp, _n_train(bd, cfg.split.tB), bd)
        else:
            lg = run_backtest(spread, panel, trace, sc, test_start=cfg.split.tB)
        ledgers.append(lg)
        if write:
            lg.to_csv(out / f"ledger_{lg.strategy}.csv")
    extra = {"tB": str(cfg.split.tB), "T": str(cfg.split.T), "cost_c": cost_c}
    if write:
        write_summary(out / "performance.json", ledgers, extra)
    return {"strategies": {lg.strategy: lg.summary() for lg in ledgers}, **extra}


def cmd_risk(cfg: RunConfig, seed: int | None = None) -> dict:
    """Monte Carlo VaR from the parameters in force at the breaking date."""
    out = cfg.output_dir
    spread = _spread_series(out)
    hp = _read_json(out / "hmm_params.json")
    params = HmmParams.from_dict(hp["discrete"])
    trace = EstimateTrace.from_csv(out / "trace.csv")
    panel = daily_panel(cfg)
    n_tr = _n_train(spread.dates, cfg.split.tB)
    sim = cfg.risk
    sim = SimulationConfig(n_sim=sim.n_sim, horizon=spread.values.size - n_tr,
                           seed=sim.seed if seed is None else int(seed),
                           var_levels=sim.var_levels, workers=sim.workers)
    rep = run_risk_analysis(params, spread.weights, panel.values[n_tr - 1], cfg.strategies, sim,
                            spread.values[:n_tr],
                            (trace.forecast_mean[:n_tr], trace.forecast_var[:n_tr]),
                            x_last=trace.probabilities[n_tr - 1])
    rep.write(out)
    return rep.to_dict()


def _shifted(cfg: RunConfig, param: str, value, sub: Path) -> RunConfig:
    raw = copy.deepcopy(cfg.raw)
    raw["dates"] = dict(raw["dates"])
    raw["dates"][param] = value
    raw["output_dir"] = str(sub.resolve())
    return config_from_dict(raw, cfg.root)


def cmd_sweep(cfg: RunConfig, param: str, values) -> dict:
    """Batch loop over ``c`` (backtest only) or ``t0`` / ``tB`` (whole pipeline per value)."""
    rows = []
    if param == "c":
        for v in values:
            rows.append({"value": float(v), "status": "ok", **cmd_backtest(cfg, cost_c=float(v), write=False)})
    elif param in ("t0", "tB"):
        for v in values:
            sub = cfg.output_dir / f"sweep_{param}" / str(md.to_date(v))
            try:
                c2 = _shifted(cfg, param, str(md.to_date(v)), sub)
                cmd_cointegrate(c2)
                cmd_filter(c2)
                rows.append({"value": str(md.to_date(v)), "status": "ok", **cmd_backtest(c2)})
            except NoCointegrationError:
                rows.append({"value": str(md.to_date(v)), "status": "no_cointegration"})
    else:
        raise DataError(f"sweep parameter must be one of c, t0, tB; got {param!r}")
    report = {"param": param, "rows": rows}
    _write_json(cfg.output_dir / f"sweep_{param}.json", _clean(report))
    return report


def _clean(o):
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, list):
        return [_clean(v) for v in o]
    if isinstance(o, float) and not math.isfinite(o):
        return None
    return o


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hmmstatarb", description=__doc__.split("\n\n")[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="YAML run configuration")
    common.add_argument("--seed", type=int, default=None, help="master seed for the risk simulations")
    common.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("cointegrate", "filter", "backtest", "risk"):
        sub.add_parser(name, parents=[common])
    sw = sub.add_parser("sweep", parents=[common])
    sw.add_argument("--param", required=True, choices=["c", "t0", "tB"])
    sw.add_argument("--values", required=True, nargs="+")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg.output_dir = Path(args.out)
        if args.seed is not None:
            r = cfg.risk
            cfg.risk = SimulationConfig(n_sim=r.n_sim, horizon=r.horizon, seed=args.seed,
                                        var_levels=r.var_levels, workers=r.workers)
        cfg.output_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "cointegrate":
            rep = cmd_cointegrate(cfg)
            jt = rep["johansen"]
            print(f"rank {jt['selected_rank']}, weights {rep['weights']}")
        elif args.command == "filter":
            rep = cmd_filter(cfg)
            print(f"selected N = {rep['params']['N']}")
        elif args.command == "backtest":
            rep = cmd_backtest(cfg)
            for k, v in rep["strategies"].items():
                print(f"{k:10s} R = {v['R']:+.4f}  SR = {v['SR'] if v['SR'] is not None else float('nan'):+.4f}  "
                      f"trades = {v['trades']}")
        elif args.command == "risk":
            rep = cmd_risk(cfg)
            names = [k for k in rep["var_table"][0] if k != "level"]
            print("VaR   " + "".join(f"{k:>10s}" for k in names))
            for row in rep["var_table"]:
                print(f"{row['level']:.2f}  " + "".join(f"{row[k]:+10.4f}" for k in names))
        else:
            vals = [float(v) for v in args.values] if args.param == "c" else args.values
            rep = cmd_sweep(cfg, args.param, vals)
            print(f"{len(rep['rows'])} sweep rows written")
    except NoCointegrationError as exc:
        print(f"no cointegration: {exc}", file=sys.stderr)
        return EXIT_NO_COINTEGRATION
    except (StatArbError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
