"""Monte Carlo VaR of the spread strategies under the estimated regime-switching model.

Each simulation ``i`` draws from its own generator seeded with
``(seed, i)``, so a path depends only on the master seed and its index.
Simulations are processed in fixed-size chunks (optionally in worker
processes) and reduced in index order, which makes the report independent
of the degree of parallelism.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hmmstatarb.exceptions import DataError, EstimationError, StatArbError
from hmmstatarb.ou_hmm.filter import filter_probabilities
from hmmstatarb.ou_hmm.params import HmmParams
from hmmstatarb.strategy_engine import (
    SPREAD_KINDS,
    annualised_return,
    backtest_arrays,
    exposure,
    sharpe_ratio,
)

INCREMENTS = "SpreadIncrement"  # pseudo-strategy: raw daily spread increments
CHUNK = 250  # simulations per work unit; fixed so results never depend on the worker count


@dataclass(frozen=True)
class SimulationConfig:
    n_sim: int = 1000
    horizon: int = 261
    seed: int = 0
    var_levels: tuple = (0.99, 0.95, 0.90)
    workers: int = 1
    grid_size: int = 512

    def __post_init__(self):
        if self.n_sim < 1:
            raise DataError("n_sim must be >= 1")
        if self.horizon < 2:
            raise DataError("horizon must be >= 2")
        if not 0 <= int(self.seed) < 2**64:
            raise DataError("seed must be a 64-bit unsigned integer")
        levels = tuple(sorted((float(v) for v in self.var_levels), reverse=True))
        if not levels or any(not 0.5 < v < 1.0 for v in levels):
            raise DataError(f"VaR levels must lie in (0.5, 1), got {self.var_levels}")
        object.__setattr__(self, "var_levels", levels)

    def to_dict(self) -> dict:
        return {"n_sim": self.n_sim, "horizon": self.horizon, "seed": int(self.seed),
                "var_levels": list(self.var_levels)}


def sim_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def initial_distribution(Pi) -> tuple[np.ndarray, str]:
    """Stationary law of ``Pi``, or the uniform law (with a flag) when it is not unique."""
    Pi = np.asarray(Pi, dtype=float)
    N = Pi.shape[0]
    try:
        return HmmParams(np.zeros(N), np.zeros(N), np.ones(N), Pi).stationary_distribution(), ""
    except EstimationError:
        return np.full(N, 1.0 / N), "non_ergodic_uniform_start"


def _chain_from_uniforms(Pi: np.ndarray, p0: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Inverse-CDF sampling; ``u`` has shape ``(b, horizon)``, column 0 picks ``X_0``."""
    N = Pi.shape[0]
    cum = np.cumsum(Pi, axis=0)  # cum[:, j] is the CDF of the next state given j
    cum[-1, :] = 1.0
    c0 = np.cumsum(p0)
    c0[-1] = 1.0
    b, h = u.shape
    x = np.empty((b, h), dtype=np.int64)
    x[:, 0] = np.minimum(np.searchsorted(c0, u[:, 0], side="right"), N - 1)
    for t in range(1, h):
        col = cum[:, x[:, t - 1]]  # (N, b)
        x[:, t] = np.minimum((u[None, :, t] >= col).sum(axis=0), N - 1)
    return x


def simulate_chain(Pi, N: int, horizon: int, rng: np.random.Generator, p0=None) -> np.ndarray:
    """Path ``X_0..X_{horizon-1}`` as state indices; ``X_0`` from ``p0`` (default stationary)."""
    Pi = np.asarray(Pi, dtype=float)
    if Pi.shape != (N, N):
        raise DataError(f"Pi must be {N}x{N}")
    if not np.allclose(Pi.sum(axis=0), 1.0, atol=1e-10):
        raise DataError("Pi must be column-stochastic")
    if p0 is None:
        p0, _ = initial_distribution(Pi)
    u = rng.random(horizon)[None, :]
    return _chain_from_uniforms(Pi, np.asarray(p0, dtype=float), u)[0]


def _spread_from_normals(params: HmmParams, chain: np.ndarray, s0, z: np.ndarray) -> np.ndarray:
    b, h = chain.shape
    y = np.empty((b, h + 1))
    y[:, 0] = s0
    g, a, e = params.gamma[chain], params.alpha[chain], params.eta[chain]
    for t in range(h):
        y[:, t + 1] = g[:, t] + a[:, t] * y[:, t] + e[:, t] * z[:, t]
    return y


def simulate_spread(params: HmmParams, chain, s0: float, rng: np.random.Generator) -> np.ndarray:
    """``y_0 = s0`` and ``y_{t+1} = gamma(X_t) + alpha(X_t) y_t + eta(X_t) z_t``; length ``horizon + 1``."""
    chain = np.asarray(chain, dtype=np.int64)
    z = rng.standard_normal(chain.size)
    return _spread_from_normals(params, chain[None, :], s0, z[None, :])[0]


def empirical_var(returns, level: float) -> float:
    """The ``ceil((1 - level) n)``-th smallest return (no interpolation)."""
    r = np.sort(np.asarray(returns, dtype=float))
    k = max(int(math.ceil((1.0 - level) * r.size - 1e-12)), 1)
    return float(r[k - 1])


def silverman_bandwidth(x) -> float:
    x = np.asarray(x, dtype=float)
    sd = x.std(ddof=1)
    iqr = np.subtract(*np.percentile(x, [75, 25]))
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    return float(0.9 * spread * x.size ** -0.2)


def kde(samples, bandwidth="silverman", grid_size: int = 512) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-kernel density on an even grid over ``[min - 3h, max + 3h]``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2 or not np.all(np.isfinite(x)):
        raise DataError("KDE needs at least two finite samples")
    if x.std() == 0.0:
        raise DataError("KDE needs samples with nonzero variance")
    h = silverman_bandwidth(x) if bandwidth == "silverman" else float(bandwidth)
    if not h > 0:
        raise DataError(f"bandwidth must be positive, got {h}")
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, grid_size)
    dens = np.zeros(grid_size)
    for lo in range(0, x.size, 4096):  # keep the kernel matrix small
        u = (grid[:, None] - x[None, lo:lo + 4096]) / h
        dens += np.exp(-0.5 * u * u).sum(axis=1)
    dens /= x.size * h * math.sqrt(2 * math.pi)
    return grid, dens


@dataclass
class RiskReport:
    levels: tuple
    var_mean: dict            # strategy -> {level: mean VaR}
    var_tstat: dict           # strategy -> {level: mean / standard error}
    var_samples: dict         # strategy -> (n_sim, n_levels) per-simulation VaRs
    annual_returns: dict      # strategy -> (n_sim,)
    sharpe: dict              # strategy -> (n_sim,) (nan where undefined)
    kde_curves: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def table(self) -> list[dict]:
        """One row per VaR level, one column per strategy."""
        return [{"level": lv, **{s: self.var_mean[s][lv] for s in self.var_mean}}
                for lv in self.levels]

    def to_dict(self) -> dict:
        def f(v):
            return None if v is None or (isinstance(v, float) and math.isnan(v)) else float(v)
        out = {"config": self.config, "flags": self.flags, "var_table": [], "strategies": {}}
        for row in self.table():
            out["var_table"].append({k: (f(v) if k != "level" else v) for k, v in row.items()})
        for s in self.var_mean:
            sr, rr = self.sharpe[s], self.annual_returns[s]
            out["strategies"][s] = {
                "var_mean": {str(lv): f(self.var_mean[s][lv]) for lv in self.levels},
                "var_tstat": {str(lv): f(self.var_tstat[s][lv]) for lv in self.levels},
                "mean_R": f(float(np.mean(rr))) if rr.size else None,
                "mean_SR": f(float(np.nanmean(sr))) if np.any(np.isfinite(sr)) else None,
                "SR_undefined_count": int(np.sum(~np.isfinite(sr))),
            }
        return out

    def write(self, out_dir, prefix: str = "risk") -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [out_dir / f"{prefix}_report.json"]
        paths[0].write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")
        for s, (grid, dens) in self.kde_curves.items():
            p = out_dir / f"{prefix}_kde_{s}.csv"
            with p.open("w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["R", "density"])
                for g, d in zip(grid, dens):
                    w.writerow([repr(float(g)), repr(float(d))])
            paths.append(p)
        return paths


@dataclass
class _Job:
    params: HmmParams
    strategies: tuple
    include_increments: bool
    seed: int
    horizon: int
    levels: tuple
    p0: np.ndarray
    s_hist: np.ndarray
    fm_hist: np.ndarray | None
    fv_hist: np.ndarray | None
    x_last: np.ndarray
    v: float


def _run_chunk(job: _Job, start: int, stop: int) -> dict:
    b, h = stop - start, job.horizon
    u = np.empty((b, h))
    z = np.empty((b, h))
    for k, i in enumerate(range(start, stop)):
        rng = sim_rng(job.seed, i)
        u[k] = rng.random(h)
        z[k] = rng.standard_normal(h)
    P = job.params
    chain = _chain_from_uniforms(P.Pi, job.p0, u)
    s0 = job.s_hist[-1]
    y = _spread_from_normals(P, chain, s0, z)  # (b, h + 1), column 0 is s0
    out = {}
    if job.include_increments:
        d = np.diff(y, axis=1)
        out[INCREMENTS] = np.array([[empirical_var(row, lv) for lv in job.levels] for row in d])
    if not job.strategies:
        return out
    need_fc = any(c.kind in ("PredI", "PI") for c in job.strategies)
    if need_fc:
        xh = filter_probabilities(P, y, x0=job.x_last)  # (b, h + 1, N)
        fm_sim = xh @ P.gamma + (xh @ P.alpha) * y
        fv_sim = (xh @ P.eta) ** 2
    n_hist = job.s_hist.size
    for cfg in job.strategies:
        var_rows, rr, ss = [], [], []
        for k in range(b):
            s_all = np.r_[job.s_hist[:-1], y[k]]
            fm = fv = None
            if need_fc:
                fm = np.r_[job.fm_hist[:-1], fm_sim[k]]
                fv = np.r_[job.fv_hist[:-1], fv_sim[k]]
            try:
                lg = backtest_arrays(cfg, s_all, job.v, n_hist, fm, fv)
            except StatArbError as exc:
                raise StatArbError(f"simulation {start + k} failed for {cfg.kind}: {exc}") from exc
            r = lg.returns
            var_rows.append([empirical_var(r, lv) for lv in job.levels])
            rr.append(annualised_return(r))
            ss.append(sharpe_ratio(r))
        out[cfg.kind] = (np.array(var_rows), np.array(rr), np.array(ss))
    return out


def run_risk_analysis(params: HmmParams, weights, panel_end, strategies, cfg: SimulationConfig,
                      spread_history, forecast_history=None, x_last=None,
                      include_increments: bool = False) -> RiskReport:
    """Simulate ``cfg.n_sim`` test-horizon paths and collect per-strategy VaR and performance.

    ``spread_history`` is the training spread; its last value is the start
    ``y_0`` of every path, and together with ``forecast_history`` (training
    forecast means and variances) it seeds the strategies' windows and
    quantile histories.  Forecasts on the simulated days come from the
    filter run with the parameters frozen, starting at ``x_last`` (the
    last training filtered state; default the stationary law).  The
    exposure ``V`` is held at ``panel_end``, the last training prices.
    """
    strategies = tuple(strategies)
    flags = []
    spread_like = [c for c in strategies if c.kind in SPREAD_KINDS]
    if len(spread_like) < len(strategies):
        flags.append("benchmark_strategies_not_simulated")
    kinds = [c.kind for c in spread_like]
    if len(set(kinds)) != len(kinds):
        raise DataError("each strategy kind may appear once")
    if not spread_like and not include_increments:
        raise DataError("nothing to simulate: no spread strategies and increments disabled")
    s_hist = np.asarray(spread_history, dtype=float)
    if s_hist.size < 1:
        raise DataError("spread history must contain at least the starting value")
    fm_hist = fv_hist = None
    if any(k in ("PredI", "PI") for k in kinds):
        if forecast_history is None:
            raise DataError("PredI/PI need the training forecasts")
        fm_hist, fv_hist = (np.asarray(a, dtype=float) for a in forecast_history)
        if fm_hist.shape != s_hist.shape or fv_hist.shape != s_hist.shape:
            raise DataError("forecast history must align with the spread history")
    p0, flag = initial_distribution(params.Pi)
    if flag:
        flags.append(flag)
    if x_last is None:
        x_last = p0
    v = float(exposure(np.asarray(panel_end, dtype=float), weights))
    job = _Job(params, tuple(spread_like), include_increments, int(cfg.seed), cfg.horizon,
               cfg.var_levels, p0, s_hist, fm_hist, fv_hist, np.asarray(x_last, dtype=float), v)
    bounds = [(a, min(a + CHUNK, cfg.n_sim)) for a in range(0, cfg.n_sim, CHUNK)]
    if cfg.workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            parts = list(ex.map(_run_chunk, [job] * len(bounds), *zip(*bounds)))
    else:
        parts = [_run_chunk(job, a, b) for a, b in bounds]
    names = ([INCREMENTS] if include_increments else []) + kinds
    var_mean, var_t, var_s, ann, shp, curves = {}, {}, {}, {}, {}, {}
    for s in names:
        if s == INCREMENTS:
            vs = np.vstack([p[s] for p in parts])
        else:
            vs = np.vstack([p[s][0] for p in parts])
            ann[s] = np.concatenate([p[s][1] for p in parts])
            shp[s] = np.concatenate([p[s][2] for p in parts])
        var_s[s] = vs
        mean = vs.mean(axis=0)
        se = vs.std(axis=0, ddof=1) / math.sqrt(vs.shape[0]) if vs.shape[0] > 1 else np.full(mean.size, np.nan)
        var_mean[s] = {lv: float(m) for lv, m in zip(cfg.var_levels, mean)}
        with np.errstate(divide="ignore", invalid="ignore"):
            var_t[s] = {lv: float(m / e) if e > 0 else math.nan for lv, m, e in zip(cfg.var_levels, mean, se)}
        if s != INCREMENTS:
            try:
                curves[s] = kde(ann[s], grid_size=cfg.grid_size)
            except DataError:
                flags.append(f"kde_skipped_{s}")
    if include_increments:
        ann.setdefault(INCREMENTS, np.array([]))
        shp.setdefault(INCREMENTS, np.array([]))
    conf = cfg.to_dict()
    conf["strategies"] = [c.to_dict() for c in spread_like]
    conf["params"] = params.to_dict()
    return RiskReport(cfg.var_levels, var_mean, var_t, var_s, ann, shp, curves, conf, flags)
