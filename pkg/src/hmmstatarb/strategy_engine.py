"""Opening/closing rules for the spread strategies, daily mark-to-market returns and performance.

All five strategies share one closing rule (the spread changes sign, zero
counting as a change).  Within a day the closing rule is checked first; a
position closed on day ``t`` can only be reopened from ``t + 1`` on.  A
return accrues on day ``t`` whenever a position was open at the end of
``t - 1``, so the opening day earns nothing and the closing day earns the
last move.
"""
from __future__ import annotations

import bisect
import csv
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.stats import norm

from hmmstatarb.exceptions import DataError

KINDS = ("PV", "ProbI", "PredI", "RI", "PI", "BuyAndHold")
SPREAD_KINDS = KINDS[:5]
ANNUALISATION = 250

OPEN, CLOSE, HOLD, FLAT, KEEP = "open", "close", "hold", "flat", "keep"
LONG, SHORT, NONE = "long_spread_portfolio", "short_spread_portfolio", "none"

# cost defaults: portfolios with the CNY-denominated contract vs the USD-only ones
COST_WITH_SHANGHAI = 0.0080
COST_WITH_DUBAI = 0.0020


@dataclass(frozen=True)
class StrategyConfig:
    kind: str
    prob_quantile: float = 0.975
    rolling_window_n: int = 20
    increment_quantiles: tuple = (0.025, 0.975)
    cost_c: float = COST_WITH_SHANGHAI

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DataError(f"unknown strategy kind {self.kind!r}; expected one of {KINDS}")
        if not 0.5 < self.prob_quantile < 1.0:
            raise DataError(f"prob_quantile must lie in (0.5, 1), got {self.prob_quantile}")
        lo, hi = self.increment_quantiles
        if not 0.0 <= lo < hi <= 1.0:
            raise DataError(f"increment quantiles must satisfy 0 <= lower < upper <= 1, got {lo}, {hi}")
        if not self.cost_c >= 0:
            raise DataError(f"cost_c must be >= 0, got {self.cost_c}")
        if int(self.rolling_window_n) != self.rolling_window_n or self.rolling_window_n < 2:
            raise DataError(f"rolling_window_n must be an integer >= 2, got {self.rolling_window_n}")
        object.__setattr__(self, "increment_quantiles", (float(lo), float(hi)))

    @cached_property
    def q_alpha(self) -> float:
        return float(norm.ppf(self.prob_quantile))

    def with_cost(self, c: float) -> "StrategyConfig":
        return StrategyConfig(self.kind, self.prob_quantile, self.rolling_window_n,
                              self.increment_quantiles, c)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "prob_quantile": self.prob_quantile,
                "rolling_window_n": self.rolling_window_n,
                "increment_quantiles": list(self.increment_quantiles), "cost_c": self.cost_c}


@dataclass
class PositionState:
    open: bool = False
    side: str = NONE
    opened_at: object = None

    def __post_init__(self):
        if (self.side == NONE) == self.open:
            raise DataError("side must be 'none' exactly when no position is open")

    @classmethod
    def flat(cls) -> "PositionState":
        return cls()

    @classmethod
    def opened(cls, s_t: float, when=None) -> "PositionState":
        # short the portfolio when the spread is positive, long when negative
        return cls(True, SHORT if s_t > 0 else LONG, when)


def _flag(flags, msg):
    if flags is not None:
        flags.append(msg)


# -- opening signals ---------------------------------------------------------

def signal_pv(s_t: float, pos: PositionState) -> str:
    if pos.open:
        return HOLD
    return OPEN if s_t != 0.0 else FLAT


def signal_probi(s_t: float, history, cfg: StrategyConfig, pos: PositionState, flags=None) -> str:
    """Band around the trailing sample mean: open iff ``|S_t - mu| >= q sigma``.

    ``history`` ends at ``t - 1``; its last ``rolling_window_n`` values are
    used, with the sample standard deviation (``ddof = 1``).
    """
    if pos.open:
        return HOLD
    n = cfg.rolling_window_n
    h = np.asarray(history, dtype=float)
    if h.size < n:
        _flag(flags, "insufficient_history")
        return FLAT
    w = h[-n:]
    mu, sd = w.mean(), w.std(ddof=1)
    dev = abs(s_t - mu)
    if sd == 0.0:
        _flag(flags, "degenerate_band")
        return OPEN if dev > 0.0 else FLAT
    return OPEN if dev >= cfg.q_alpha * sd else FLAT


def zscore(s_t: float, history, n: int) -> float:
    """``(S_t - mu) / sigma`` over the last ``n`` values of ``history``."""
    w = np.asarray(history, dtype=float)[-n:]
    return float((s_t - w.mean()) / w.std(ddof=1))


def signal_predi(s_t: float, forecast_mean: float, forecast_var: float, cfg: StrategyConfig,
                 pos: PositionState) -> str:
    """Open iff ``S_t`` leaves the one-step prediction interval made at ``t - 1``."""
    if not forecast_var > 0:
        raise DataError(f"forecast variance must be positive, got {forecast_var}")
    if pos.open:
        return HOLD
    return OPEN if abs(s_t - forecast_mean) >= cfg.q_alpha * math.sqrt(forecast_var) else FLAT


def _quantile_sorted(xs: list, p: float) -> float:
    # same as numpy's default ("linear") method on an already sorted list
    h = (len(xs) - 1) * p
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


def _outside(x: float, qs: tuple) -> bool:
    return x <= qs[0] or x >= qs[1]


def signal_ri(x_t: float, increment_history, cfg: StrategyConfig, pos: PositionState,
              flags=None) -> str:
    """Open iff the realised increment lies outside the empirical quantile interval of past increments.

    ``x_t = nan`` stands for an undefined increment (``S_{t-1} = 0``).
    """
    return _increment_signal(x_t, increment_history, cfg, pos, flags)


def signal_pi(xhat_t: float, predicted_history, cfg: StrategyConfig, pos: PositionState,
              flags=None) -> str:
    """As :func:`signal_ri`, for the predicted increment ``E[S_{t+1} | F_t] / S_t - 1``."""
    return _increment_signal(xhat_t, predicted_history, cfg, pos, flags)


def _increment_signal(x, history, cfg, pos, flags):
    if pos.open:
        return HOLD
    if not math.isfinite(x):
        _flag(flags, "undefined_increment")
        return FLAT
    h = np.asarray(history, dtype=float)
    h = h[np.isfinite(h)]
    if h.size == 0:
        _flag(flags, "empty_history")
        return FLAT
    lo, hi = np.quantile(h, cfg.increment_quantiles)
    return OPEN if _outside(x, (lo, hi)) else FLAT


def closing_rule(s_t: float, s_prev: float, pos: PositionState) -> str:
    """Close iff the sign changes; a zero on either side counts as a change."""
    if not pos.open:
        raise DataError("closing rule evaluated without an open position")
    if s_t == 0.0 or s_prev == 0.0:
        return CLOSE
    return CLOSE if (s_t > 0) != (s_prev > 0) else KEEP


# -- returns -----------------------------------------------------------------

def exposure(prices, weights) -> np.ndarray | float:
    """``V_t = |lambda_0| + sum_i |lambda_i| F_t^i``; ``prices`` may be one row or a matrix."""
    w = np.asarray(weights, dtype=float)
    f = np.asarray(prices, dtype=float)
    v = abs(w[0]) + f @ np.abs(w[1:])
    if np.any(~(v > 0)):
        raise DataError("portfolio exposure V_t must be positive")
    return v


def daily_return(s_t: float, s_prev: float, prices, weights, cfg: StrategyConfig,
                 is_open: bool = True) -> float:
    """``r_t = S_t (S_t - S_{t-1}) / V_t - c |S_t - S_{t-1}|``, or 0 without an open position."""
    if not is_open:
        return 0.0
    ds = s_t - s_prev
    return float(s_t * ds / exposure(prices, weights) - cfg.cost_c * abs(ds))


def annualised_return(r) -> float:
    r = np.asarray(r, dtype=float)
    if r.size == 0:
        raise DataError("no returns")
    return float((np.prod(1.0 + r) - 1.0) * ANNUALISATION / r.size)


def sharpe_ratio(r) -> float:
    """Annualised ``mean / std`` with the population standard deviation; nan when the std is 0."""
    r = np.asarray(r, dtype=float)
    sd = r.std()
    if r.size == 0 or sd == 0.0:
        return math.nan
    return float(r.mean() / sd * math.sqrt(ANNUALISATION))


# -- ledger ------------------------------------------------------------------

@dataclass
class TradeLedger:
    strategy: str
    dates: np.ndarray
    spread: np.ndarray
    signals: list
    positions: list
    returns: np.ndarray
    flags: list
    config: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.returns.size

    @property
    def R(self) -> float:
        return annualised_return(self.returns)

    @property
    def SR(self) -> float:
        return sharpe_ratio(self.returns)

    @property
    def trade_count(self) -> int:
        return sum(1 for s in self.signals if s == OPEN)

    @property
    def max_open_length(self) -> int:
        """Longest run of consecutive return-accruing days."""
        best = run = 0
        for prev, cur in zip([NONE] + self.positions[:-1], self.signals):
            run = run + 1 if prev != NONE and cur in (HOLD, CLOSE) else 0
            best = max(best, run)
        return best

    def summary(self) -> dict:
        sr = self.SR
        return {
            "strategy": self.strategy,
            "n_days": self.n,
            "R": self.R,
            "SR": None if math.isnan(sr) else sr,
            "SR_undefined": math.isnan(sr),
            "trades": self.trade_count,
            "max_open_length": self.max_open_length,
        }

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["date", "S", "signal", "position", "r", "flag"])
            for d, s, sig, p, r, f in zip(self.dates, self.spread, self.signals, self.positions,
                                          self.returns, self.flags):
                w.writerow([str(d), repr(float(s)), sig, p, repr(float(r)), f])


def _hist_quantiles(xs: list, qs: tuple):
    return (_quantile_sorted(xs, qs[0]), _quantile_sorted(xs, qs[1])) if xs else None


def backtest_arrays(kind_cfg: StrategyConfig, spread, exposure_v, n_hist: int,
                    forecast_mean=None, forecast_var=None, dates=None) -> TradeLedger:
    """Core day loop on plain arrays covering history and test days.

    ``spread[t]`` for ``t < n_hist`` is history only (it seeds the ProbI
    window and the increment quantile histories); days ``n_hist..`` are
    traded.  ``forecast_mean[t]`` / ``forecast_var[t]`` are the forecasts of
    ``S_{t+1}`` made at ``t``.  ``exposure_v`` holds ``V_t`` for every row.
    """
    cfg = kind_cfg
    if cfg.kind not in SPREAD_KINDS:
        raise DataError(f"{cfg.kind} is not a spread strategy")
    s = np.asarray(spread, dtype=float)
    v = np.broadcast_to(np.asarray(exposure_v, dtype=float), s.shape)
    n = s.size
    if not 1 <= n_hist < n:
        raise DataError(f"need at least one history row and one test row (n_hist={n_hist}, n={n})")
    needs_fc = cfg.kind in ("PredI", "PI")
    if needs_fc:
        if forecast_mean is None or forecast_var is None:
            raise DataError(f"{cfg.kind} needs forecasts")
        fm = np.asarray(forecast_mean, dtype=float)
        fv = np.asarray(forecast_var, dtype=float)
        if fm.shape != s.shape or fv.shape != s.shape:
            raise DataError("forecasts must be aligned with the spread")

    # increment histories seeded with the history rows
    def incr(t):
        return s[t] / s[t - 1] - 1.0 if s[t - 1] != 0.0 else math.nan

    def pred_incr(t):
        return fm[t] / s[t] - 1.0 if s[t] != 0.0 else math.nan

    hist = []
    if cfg.kind == "RI":
        hist = sorted(x for x in (incr(t) for t in range(1, n_hist)) if math.isfinite(x))
    elif cfg.kind == "PI":
        hist = sorted(x for x in (pred_incr(t) for t in range(n_hist)) if math.isfinite(x))

    pos = PositionState.flat()
    signals, positions, flags = [], [], []
    rets = np.zeros(n - n_hist)
    win = cfg.rolling_window_n
    for k, t in enumerate(range(n_hist, n)):
        st, sp = s[t], s[t - 1]
        fl = []
        if pos.open:
            rets[k] = st * (st - sp) / v[t] - cfg.cost_c * abs(st - sp)
            if closing_rule(st, sp, pos) == CLOSE:
                sig = CLOSE
                pos = PositionState.flat()
            else:
                sig = HOLD
        else:
            if cfg.kind == "PV":
                sig = signal_pv(st, pos)
            elif cfg.kind == "ProbI":
                sig = signal_probi(st, s[max(0, t - win):t], cfg, pos, fl)
            elif cfg.kind == "PredI":
                sig = signal_predi(st, fm[t - 1], fv[t - 1], cfg, pos)
            else:
                x = incr(t) if cfg.kind == "RI" else pred_incr(t)
                if not math.isfinite(x):
                    fl.append("undefined_increment")
                    sig = FLAT
                elif not hist:
                    fl.append("empty_history")
                    sig = FLAT
                else:
                    sig = OPEN if _outside(x, _hist_quantiles(hist, cfg.increment_quantiles)) else FLAT
            if sig == OPEN:
                pos = PositionState.opened(st, None if dates is None else dates[t])
        if cfg.kind in ("RI", "PI"):
            x = incr(t) if cfg.kind == "RI" else pred_incr(t)
            if math.isfinite(x):
                bisect.insort(hist, x)
        signals.append(sig)
        positions.append(pos.side)
        flags.append(";".join(fl))
    d = np.arange(n - n_hist) if dates is None else np.asarray(dates)[n_hist:]
    return TradeLedger(cfg.kind, d, s[n_hist:].copy(), signals, positions, rets, flags,
                       cfg.to_dict())


def buy_and_hold(prices, n_hist: int, dates=None) -> TradeLedger:
    """Passive benchmark: ``r_t = P_t / P_{t-1} - 1`` on every test day, no costs."""
    p = np.asarray(prices, dtype=float)
    if not 1 <= n_hist < p.size:
        raise DataError("need at least one history row and one test row")
    if np.any(p <= 0):
        raise DataError("benchmark prices must be positive")
    r = p[n_hist:] / p[n_hist - 1:-1] - 1.0
    m = r.size
    d = np.arange(m) if dates is None else np.asarray(dates)[n_hist:]
    return TradeLedger("BuyAndHold", d, p[n_hist:].copy(), [HOLD] * m, [LONG] * m, r, [""] * m,
                       {"kind": "BuyAndHold", "cost_c": 0.0})


def run_backtest(spread, panel, forecasts, cfg: StrategyConfig, test_start=None,
                 benchmark=None) -> TradeLedger:
    """Backtest one strategy over the test part of aligned spread / price / forecast series.

    ``spread`` (a :class:`SpreadSeries`), ``panel`` and ``forecasts`` (an
    :class:`EstimateTrace` or ``None`` for strategies that do not use it)
    must share one date index covering the training and test samples; rows
    dated before ``test_start`` are history.  ``benchmark`` is the price
    series for ``BuyAndHold``.
    """
    dates = np.asarray(spread.dates, dtype="datetime64[D]")
    if not np.array_equal(dates, np.asarray(panel.dates, dtype="datetime64[D]")):
        raise DataError("spread and price panel dates are not aligned")
    if forecasts is not None:
        if forecasts.dates is not None and not np.array_equal(dates, forecasts.dates):
            raise DataError("spread and forecast dates are not aligned")
        if forecasts.forecast_mean.size != dates.size:
            raise DataError("forecast trace length differs from the spread")
    if test_start is None:
        raise DataError("test_start is required")
    n_hist = int(np.searchsorted(dates, np.datetime64(test_start, "D")))
    if cfg.kind == "BuyAndHold":
        if benchmark is None:
            raise DataError("BuyAndHold needs a benchmark price series")
        return buy_and_hold(benchmark, n_hist, dates)
    v = exposure(panel.values, spread.weights)
    fm = fv = None
    if forecasts is not None:
        fm, fv = forecasts.forecast_mean, forecasts.forecast_var
    return backtest_arrays(cfg, spread.values, v, n_hist, fm, fv, dates)


def summary_table(ledgers) -> dict:
    """Strategies x {R, SR}, with trade counts alongside."""
    return {lg.strategy: lg.summary() for lg in ledgers}


def write_summary(path, ledgers, extra: dict | None = None) -> None:
    out = {"strategies": summary_table(ledgers)}
    if extra:
        out.update(extra)
    Path(path).write_text(json.dumps(out, indent=2, sort_keys=True) + "\n")
