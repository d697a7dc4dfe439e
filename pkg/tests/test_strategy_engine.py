"""Signals, closing rule, daily returns, ledgers and performance figures."""
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmmstatarb.econometrics.spread import SpreadSeries
from hmmstatarb.exceptions import DataError
from hmmstatarb.market_data import PricePanel
from hmmstatarb.ou_hmm import run_filter_em
from hmmstatarb.strategy_engine import (
    CLOSE, FLAT, HOLD, KEEP, LONG, NONE, OPEN, SHORT, SPREAD_KINDS,
    PositionState, StrategyConfig, annualised_return, backtest_arrays, buy_and_hold,
    closing_rule, daily_return, exposure, run_backtest, sharpe_ratio, signal_pi,
    signal_predi, signal_probi, signal_pv, signal_ri, write_summary, zscore,
)

FLAT_POS = PositionState.flat()
OPEN_POS = PositionState.opened(0.4)
WEIGHTS = (0.4322, 1.0, -0.6982, -0.3402)


def ar_spread(seed, n=400, phi=0.9, sd=0.3):
    rng = np.random.default_rng(seed)
    s = np.zeros(n)
    for t in range(1, n):
        s[t] = phi * s[t - 1] + sd * rng.standard_normal()
    return s


def ledgers_for(s, n_hist, c=0.0, v=100.0):
    tr = run_filter_em(s, 2, m=10)
    out = {}
    for kind in SPREAD_KINDS:
        out[kind] = backtest_arrays(StrategyConfig(kind, cost_c=c), s, v, n_hist,
                                    tr.forecast_mean, tr.forecast_var)
    return out


# -- configuration and position ---------------------------------------------

def test_config_validation_and_quantile():
    cfg = StrategyConfig("ProbI")
    assert cfg.q_alpha == pytest.approx(1.959964, abs=1e-6)
    assert cfg.with_cost(0.002).cost_c == 0.002 and cfg.with_cost(0.002).kind == "ProbI"
    for bad in (dict(kind="MA"), dict(kind="PV", prob_quantile=0.4), dict(kind="PV", cost_c=-1),
                dict(kind="PV", rolling_window_n=1), dict(kind="PV", increment_quantiles=(0.9, 0.1))):
        with pytest.raises(DataError):
            StrategyConfig(**bad)


def test_position_side_convention():
    assert PositionState.opened(0.3).side == SHORT
    assert PositionState.opened(-0.3).side == LONG
    assert FLAT_POS.side == NONE and not FLAT_POS.open
    with pytest.raises(DataError):
        PositionState(True, NONE)


# -- opening and closing signals --------------------------------------------

def test_pv_signal():
    assert signal_pv(0.5, FLAT_POS) == OPEN
    assert signal_pv(0.0, FLAT_POS) == FLAT
    assert signal_pv(0.5, OPEN_POS) == HOLD


def test_probi_signal():
    cfg = StrategyConfig("ProbI", rolling_window_n=20)
    flags = []
    assert signal_probi(0.1, np.zeros(20), cfg, FLAT_POS, flags) == OPEN
    assert flags == ["degenerate_band"]
    # window with sample mean 0 and sample sd 1
    w = np.tile([1.0, -1.0], 10) * math.sqrt(19 / 20)
    assert np.std(w, ddof=1) == pytest.approx(1.0)
    cfg196 = StrategyConfig("ProbI", prob_quantile=0.975)
    assert signal_probi(1.0, w, cfg196, FLAT_POS) == FLAT
    assert signal_probi(2.5, w, cfg196, FLAT_POS) == OPEN
    flags = []
    assert signal_probi(9.0, w[:5], cfg, FLAT_POS, flags) == FLAT and flags == ["insufficient_history"]
    assert signal_probi(9.0, w, cfg, OPEN_POS) == HOLD


def test_predi_signal():
    cfg = StrategyConfig("PredI")
    assert signal_predi(-2.0, 0.0, 1.0, cfg, FLAT_POS) == OPEN
    assert signal_predi(0.3, 0.3, 1.0, cfg, FLAT_POS) == FLAT
    assert signal_predi(5.0, 0.0, 1e6, cfg, FLAT_POS) == FLAT
    with pytest.raises(DataError):
        signal_predi(1.0, 0.0, 0.0, cfg, FLAT_POS)


def test_increment_signals():
    cfg = StrategyConfig("RI")
    hist = np.random.default_rng(0).uniform(-0.01, 0.01, 99)
    assert signal_ri(0.05, hist, cfg, FLAT_POS) == OPEN
    assert signal_ri(float(np.median(hist)), hist, cfg, FLAT_POS) == FLAT
    flags = []
    assert signal_ri(math.nan, hist, cfg, FLAT_POS, flags) == FLAT and flags == ["undefined_increment"]
    flags = []
    assert signal_pi(0.2, [], cfg, FLAT_POS, flags) == FLAT and flags == ["empty_history"]
    sym = np.linspace(-1, 1, 41)
    assert signal_pi(0.0, sym, cfg, FLAT_POS) == FLAT
    assert signal_pi(1.5, sym, cfg, FLAT_POS) == OPEN


def test_closing_rule():
    assert closing_rule(-0.1, 0.4, OPEN_POS) == CLOSE
    assert closing_rule(0.1, 0.4, OPEN_POS) == KEEP
    assert closing_rule(0.0, 0.4, OPEN_POS) == CLOSE
    assert closing_rule(0.4, 0.0, OPEN_POS) == CLOSE
    with pytest.raises(DataError):
        closing_rule(0.1, 0.4, FLAT_POS)


# -- returns -----------------------------------------------------------------

def test_daily_return_hand_value():
    F = (80.0, 70.0, 75.0)
    # 0.4322 + 80 + 0.6982 * 70 + 0.3402 * 75 = 0.4322 + 80 + 48.874 + 25.515
    v = 154.8212
    assert exposure(F, WEIGHTS) == pytest.approx(v, abs=1e-10)
    r = daily_return(2.5, 2.0, F, WEIGHTS, StrategyConfig("PV", cost_c=0.008))
    assert r == pytest.approx(2.5 * 0.5 / v - 0.004, abs=1e-15)
    assert r == pytest.approx(0.0040738, abs=5e-8)
    assert daily_return(2.0, 2.0, F, WEIGHTS, StrategyConfig("PV", cost_c=0.0)) == 0.0
    assert daily_return(2.5, 2.0, F, WEIGHTS, StrategyConfig("PV"), is_open=False) == 0.0
    with pytest.raises(DataError):
        exposure((0.0, 0.0, 0.0), (0.0, 1.0, 1.0, 1.0))


def test_performance_formulas():
    r = np.full(250, 0.001)
    assert annualised_return(r) == pytest.approx(1.001**250 - 1, rel=1e-14)
    assert math.isnan(sharpe_ratio(np.zeros(30)))
    x = np.array([0.01, -0.02, 0.03])
    assert sharpe_ratio(x) == pytest.approx(x.mean() / x.std() * math.sqrt(250))


# -- ledgers -----------------------------------------------------------------

def test_sawtooth_ledger_by_hand():
    # one history row then ten test days; V fixed at 10
    s = np.array([1.0] + [-1.0, 1.0] * 5)
    lg = backtest_arrays(StrategyConfig("PV", cost_c=0.0), s, 10.0, 1)
    # day 1 opens (long, S = -1); day 2 earns 1 * 2 / 10 and closes on the sign change; repeat
    assert lg.signals == [OPEN, CLOSE] * 5
    assert lg.positions == [LONG, NONE] * 5
    expected = np.array([0.0, 0.2] * 5)
    assert np.max(np.abs(lg.returns - expected)) <= 1e-12
    assert lg.R == pytest.approx((1.2**5 - 1) * 25, abs=1e-12)
    assert lg.SR == pytest.approx(math.sqrt(250), abs=1e-12)
    assert lg.trade_count == 5 and lg.max_open_length == 1
    with_cost = backtest_arrays(StrategyConfig("PV", cost_c=0.008), s, 10.0, 1)
    assert np.max(np.abs(with_cost.returns - np.array([0.0, 0.2 - 0.016] * 5))) <= 1e-12


def test_flat_days_earn_nothing_and_all_flat_is_flagged():
    s = np.r_[np.tile([0.1, -0.1], 20), np.full(30, 0.05)]
    lg = backtest_arrays(StrategyConfig("ProbI", prob_quantile=0.999), s, 10.0, 40)
    assert all(sig == FLAT for sig in lg.signals)
    assert np.all(lg.returns == 0) and lg.R == 0.0
    summ = lg.summary()
    assert summ["SR"] is None and summ["SR_undefined"]
    for kind, lg in ledgers_for(ar_spread(1), 200).items():
        flat_days = np.array([p == NONE for p in [NONE] + lg.positions[:-1]])
        assert np.all(lg.returns[flat_days] == 0.0), kind
        assert lg.trade_count == lg.signals.count(OPEN)


def test_no_position_survives_a_zero_crossing():
    s = ar_spread(2)
    for kind, lg in ledgers_for(s, 200).items():
        sp = s[199:]
        for k, side in enumerate([NONE] + lg.positions[:-1]):
            if side != NONE and (sp[k + 1] == 0 or (sp[k + 1] > 0) != (sp[k] > 0)):
                assert lg.signals[k] == CLOSE, kind


def test_buy_and_hold_benchmark():
    n = 261
    total = 0.1643 * n / 250  # total growth whose 250/n annualisation is 16.43%
    p = np.r_[100.0, 100.0 * (1 + total) ** (np.arange(1, n + 1) / n)]
    lg = buy_and_hold(p, 1)
    assert lg.n == 261
    assert lg.R == pytest.approx(0.1643, abs=1e-12)
    with pytest.raises(DataError):
        buy_and_hold(np.r_[1.0, -1.0, 2.0], 1)


def test_costs_change_returns_but_not_signals():
    s = ar_spread(3)
    base = ledgers_for(s, 200, c=0.0)
    tr = run_filter_em(s, 2, m=10)
    for kind in SPREAD_KINDS:
        Rs, sigs = [], []
        for c in (0.0, 0.002, 0.004, 0.006, 0.008, 0.010):
            lg = backtest_arrays(StrategyConfig(kind, cost_c=c), s, 100.0, 200,
                                 tr.forecast_mean, tr.forecast_var)
            Rs.append(lg.R)
            sigs.append(lg.signals)
        assert all(a >= b for a, b in zip(Rs, Rs[1:])), kind
        assert all(x == base[kind].signals for x in sigs), kind


def test_pv_trades_most():
    for seed in range(20):
        lgs = ledgers_for(ar_spread(seed, n=300), 100)
        for kind in SPREAD_KINDS[1:]:
            assert lgs["PV"].trade_count >= lgs[kind].trade_count, (seed, kind)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_probi_band_equals_zscore_rule(seed):
    s = ar_spread(seed, n=200)
    cfg = StrategyConfig("ProbI")
    for t in range(20, 200):
        band = signal_probi(s[t], s[:t], cfg, FLAT_POS) == OPEN
        z = abs(zscore(s[t], s[:t], 20)) >= cfg.q_alpha
        assert band == z


def test_fast_quantile_path_matches_numpy():
    s = ar_spread(7)
    for kind in ("RI",):
        lg = backtest_arrays(StrategyConfig(kind), s, 100.0, 200)
        with np.errstate(divide="ignore", invalid="ignore"):
            incr = s[1:] / s[:-1] - 1
        pos = FLAT_POS
        for k, t in enumerate(range(200, 400)):
            if lg.signals[k] in (OPEN, FLAT):
                ref = signal_ri(incr[t - 1], incr[:t - 1], StrategyConfig(kind), pos)
                assert ref == lg.signals[k]


def test_run_backtest_alignment(tmp_path):
    d = np.datetime64("2022-01-03") + np.arange(60)
    rng = np.random.default_rng(4)
    vals = 50 + rng.standard_normal((60, 3)).cumsum(axis=0)
    panel = PricePanel(("a", "b", "c"), d, vals)
    spread = SpreadSeries(d, ar_spread(5, n=60), np.array(WEIGHTS))
    lg = run_backtest(spread, panel, None, StrategyConfig("PV"), test_start=d[40])
    assert lg.n == 20 and lg.dates[0] == d[40]
    bad = PricePanel(("a", "b", "c"), d + 1, vals)
    with pytest.raises(DataError):
        run_backtest(spread, bad, None, StrategyConfig("PV"), test_start=d[40])
    with pytest.raises(DataError):
        run_backtest(spread, panel, None, StrategyConfig("PredI"), test_start=d[40])
    lg.to_csv(tmp_path / "l.csv")
    head = (tmp_path / "l.csv").read_text().splitlines()
    assert head[0] == "date,S,signal,position,r,flag" and len(head) == 21
    write_summary(tmp_path / "p.json", [lg])
    assert '"PV"' in (tmp_path / "p.json").read_text()
