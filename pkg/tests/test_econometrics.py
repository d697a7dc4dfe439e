"""Unit roots, VAR, Johansen/VECM and spread construction."""
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hmmstatarb.econometrics import (
    adf_test,
    build_spread,
    critical_value,
    fit_var,
    fit_vecm,
    johansen_trace,
    kpss_test,
    select_var_lag,
    trace_pvalue,
    trace_test_from_moments,
)
from hmmstatarb.econometrics.ols import ols
from hmmstatarb.econometrics.unitroot import KPSS_CRITICAL
from hmmstatarb.exceptions import DataError, EstimationError
from hmmstatarb.market_data import PricePanel


def _panel(values):
    values = np.asarray(values, dtype=float)
    d = np.datetime64("2020-01-01") + np.arange(values.shape[0])
    return PricePanel(tuple(f"s{i}" for i in range(values.shape[1])), d, values)


def cointegrated_triple(rng, n=500, beta=(1.0, -0.7, -0.3), c0=0.5, phi=0.5):
    """Two random walks plus a third series closing an AR(1) spread."""
    f2 = np.cumsum(rng.standard_normal(n)) + 50
    f3 = np.cumsum(rng.standard_normal(n)) + 60
    s = np.zeros(n)
    for t in range(1, n):
        s[t] = phi * s[t - 1] + 0.5 * rng.standard_normal()
    f1 = s - c0 - beta[1] * f2 - beta[2] * f3
    return np.column_stack([f1, f2, f3])


# -- OLS ---------------------------------------------------------------------

def test_ols_normal_equations_and_rank_check():
    rng = np.random.default_rng(0)
    x = np.column_stack([np.ones(50), rng.standard_normal(50)])
    y = 1 + 2 * x[:, 1] + 0.1 * rng.standard_normal(50)
    fit = ols(y, x)
    assert np.max(np.abs(x.T @ fit.resid)) < 1e-10
    with pytest.raises(EstimationError):
        ols(y, np.column_stack([x, x[:, 1]]))


# -- ADF / KPSS --------------------------------------------------------------

def test_adf_power_on_stationary_ar1():
    rng = np.random.default_rng(11)
    hits = 0
    for _ in range(200):
        e = rng.standard_normal(274)
        y = np.zeros(274)
        for t in range(1, 274):
            y[t] = 0.5 * y[t - 1] + e[t]
        hits += adf_test(y).p_value < 0.05
    assert hits >= 0.95 * 200


def test_adf_random_walk_mostly_not_rejected():
    rng = np.random.default_rng(12)
    keep = sum(adf_test(np.cumsum(rng.standard_normal(274))).p_value > 0.05 for _ in range(200))
    assert keep >= 0.90 * 200


def test_adf_constant_series_is_singular():
    with pytest.raises(EstimationError):
        adf_test(np.full(100, 3.0))


def test_adf_report_fields():
    rng = np.random.default_rng(1)
    rep = adf_test(rng.standard_normal(200), max_lag=4)
    assert 0 <= rep.p_value <= 1
    assert 0 <= rep.lags_used <= 4
    assert rep.deterministic in ("c", "constant")
    assert set(rep.to_dict()) >= {"statistic", "p_value", "lags_used"}


def test_adf_fixed_lag_matches_statsmodels_statistic():
    from statsmodels.tsa.stattools import adfuller
    rng = np.random.default_rng(3)
    y = np.cumsum(rng.standard_normal(300))
    ours = adf_test(y, lags=3)
    ref = adfuller(y, maxlag=3, autolag=None, regression="c")
    assert ours.statistic == pytest.approx(ref[0], rel=1e-10)
    assert ours.p_value == pytest.approx(ref[1], rel=1e-8)


def test_kpss_white_noise_and_random_walk():
    rng = np.random.default_rng(21)
    crit = KPSS_CRITICAL["c"][0.05]
    below = sum(kpss_test(rng.standard_normal(500)).statistic < crit for _ in range(200))
    above = sum(kpss_test(np.cumsum(rng.standard_normal(500))).statistic > crit for _ in range(200))
    assert below >= 0.90 * 200
    assert above >= 0.90 * 200


def test_kpss_constant_series_gives_zero():
    rep = kpss_test(np.full(50, 2.5))
    assert rep.statistic == 0.0
    assert not rep.rejects(0.05)


def test_kpss_table_values():
    assert KPSS_CRITICAL["c"] == {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739}
    assert KPSS_CRITICAL["ct"][0.05] == 0.146


def test_kpss_too_short():
    with pytest.raises(DataError):
        kpss_test(np.arange(10.0))


# -- VAR ---------------------------------------------------------------------

def _simulate_var2(rng, n=300):
    A1 = np.array([[0.5, 0.1], [0.0, 0.4]])
    A2 = np.array([[-0.3, 0.0], [0.1, -0.25]])
    y = np.zeros((n + 50, 2))
    for t in range(2, n + 50):
        y[t] = A1 @ y[t - 1] + A2 @ y[t - 2] + rng.standard_normal(2)
    return y[50:]


def test_select_var_lag_recovers_two():
    rng = np.random.default_rng(5)
    hits = sum(select_var_lag(_simulate_var2(rng), 6) == 2 for _ in range(50))
    assert hits >= 45


def test_select_var_lag_noise_prefers_one():
    rng = np.random.default_rng(6)
    hits = sum(select_var_lag(rng.standard_normal((300, 3)), 6) == 1 for _ in range(30))
    assert hits > 15
    assert select_var_lag(rng.standard_normal((100, 2)), 1) == 1


def test_fit_var_recovers_coefficients_with_tiny_noise():
    rng = np.random.default_rng(7)
    A1 = np.array([[0.6, 0.2], [-0.1, 0.3]])
    a0 = np.array([1.0, -0.5])
    # start away from the fixed point so the transient identifies A1
    y = np.zeros((400, 2))
    y[0] = [10.0, -10.0]
    for t in range(1, 400):
        y[t] = a0 + A1 @ y[t - 1] + 1e-6 * rng.standard_normal(2)
    m = fit_var(y, 1)
    assert np.max(np.abs(m.coefficient_matrices[0] - A1)) < 1e-2
    assert m.is_stable
    assert np.max(np.abs(m.design.T @ m.residuals)) < 1e-8
    cov = m.residual_covariance
    assert np.allclose(cov, cov.T) and np.all(np.linalg.eigvalsh(cov) >= 0)


def test_fit_var_white_noise_and_collinear():
    rng = np.random.default_rng(8)
    m = fit_var(5.0 + rng.standard_normal((2000, 2)), 1)
    assert np.max(np.abs(m.coefficient_matrices[0])) < 0.1
    x = rng.standard_normal(100)
    with pytest.raises(EstimationError):
        fit_var(np.column_stack([x, x]), 1)


# -- Johansen ----------------------------------------------------------------

def _moment_fixture(stats, n=300, k=3):
    # S00 = S11 = I and S01 = diag(sqrt(mu)) give eigenvalues mu exactly
    tail = np.asarray(stats, dtype=float)
    # stats[r] - stats[r+1] = -n ln(1 - mu_r)
    incr = np.r_[tail[:-1] - tail[1:], tail[-1]]
    mu = 1.0 - np.exp(-incr / n)
    s01 = np.zeros((k, k + 1))
    s01[:k, :k] = np.diag(np.sqrt(mu))
    return np.eye(k), s01, np.eye(k + 1), n


def test_trace_moment_fixture_rejects_zero_not_one():
    s00, s01, s11, n = _moment_fixture([36.107, 10.648, 1.25])
    mu, v, stats, crit, pv, rank = trace_test_from_moments(s00, s01, s11, n)
    assert stats == pytest.approx([36.107, 10.648, 1.25], rel=1e-10)
    assert crit[:2] == pytest.approx([35.1928, 20.2618])
    assert stats[0] > crit[0] and stats[1] < crit[1]
    assert rank == 1
    assert pv[0] == pytest.approx(0.039, abs=0.005)


def test_critical_values_and_pvalues_are_monotone():
    for d in range(1, 7):
        cs = [critical_value(d, lv) for lv in (0.10, 0.05, 0.01)]
        assert cs[0] < cs[1] < cs[2]
        assert trace_pvalue(critical_value(d, 0.05), d) == pytest.approx(0.05, abs=0.004)
        ps = [trace_pvalue(s, d) for s in np.linspace(0, 200, 60)]
        assert all(a >= b for a, b in zip(ps, ps[1:]))
        assert all(0 <= p <= 1 for p in ps)
    with pytest.raises(DataError):
        critical_value(7)


def test_johansen_independent_walks_rank_zero():
    rng = np.random.default_rng(31)
    hits = sum(johansen_trace(np.cumsum(rng.standard_normal((500, 3)), axis=0), 2).selected_rank == 0
               for _ in range(50))
    assert hits >= 45


def test_johansen_recovers_constructed_vector():
    rng = np.random.default_rng(32)
    ok = 0
    for _ in range(30):
        res = johansen_trace(cointegrated_triple(rng), 2)
        ok += res.selected_rank == 1 and np.max(np.abs(res.beta - [1, -0.7, -0.3])) < 0.05
    assert ok >= 27


def test_johansen_invariants():
    rng = np.random.default_rng(33)
    f = cointegrated_triple(rng)
    res = johansen_trace(_panel(f), 2)
    assert np.all(np.diff(res.eigenvalues) <= 0)
    assert np.all((res.eigenvalues >= 0) & (res.eigenvalues < 1))
    assert np.all(np.diff(res.trace_stats) < 0)
    assert res.beta[0] == 1.0
    scaled = johansen_trace(_panel(f * 3.7), 2)
    assert scaled.selected_rank == res.selected_rank
    assert scaled.trace_stats == pytest.approx(res.trace_stats, rel=1e-8)
    assert [row["r"] for row in res.trace_table()] == [0, 1, 2]
    with pytest.raises(DataError):
        johansen_trace(f, 2, det_case="unrestricted")


def test_spread_reproduces_error_correction_term():
    rng = np.random.default_rng(34)
    p = 2
    panel = _panel(cointegrated_triple(rng))
    res = fit_vecm(panel, p, r=1)
    spread = build_spread(panel, res)
    # ECT row j uses F at time p - 1 + j
    assert np.max(np.abs(spread.values[p - 1:-1] - res.ect)) < 1e-10
    assert len(res.short_run) == p - 1
    assert res.alpha.shape == (3,)


def test_build_spread_hand_values():
    panel = _panel(np.full((2, 3), 80.0))
    s = build_spread(panel, beta=[1, -0.6982, -0.3402], c0=0.4322)
    assert s.values == pytest.approx([-2.6398, -2.6398], abs=1e-12)
    assert s.weights.tolist() == [0.4322, 1, -0.6982, -0.3402]
    two = _panel(np.array([[3.0, 3.0], [4.5, 4.5]]))
    assert np.all(build_spread(two, beta=[1, -1], c0=0).values == 0)
    proj = build_spread(panel, beta=[1, 0, 0], c0=0)
    assert np.array_equal(proj.values, panel.values[:, 0])
    with pytest.raises(DataError):
        build_spread(panel, beta=[1, -1], c0=0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10.0), st.integers(0, 10_000))
def test_trace_statistics_invariant_to_common_scaling(scale, seed):
    f = cointegrated_triple(np.random.default_rng(seed), n=200)
    a = johansen_trace(f, 2)
    b = johansen_trace(f * scale, 2)
    assert b.selected_rank == a.selected_rank
    assert np.allclose(b.trace_stats, a.trace_stats, rtol=1e-7, atol=1e-8)
