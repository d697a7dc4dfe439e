"""Augmented Dickey-Fuller and KPSS tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from hmmstatarb.econometrics.ols import ols
from hmmstatarb.exceptions import DataError, EstimationError

# Kwiatkowski, Phillips, Schmidt & Shin (1992), Table 1: upper-tail asymptotic critical values
KPSS_CRITICAL = {
    "c": {0.10: 0.347, 0.05: 0.463, 0.025: 0.574, 0.01: 0.739},
    "ct": {0.10: 0.119, 0.05: 0.146, 0.025: 0.176, 0.01: 0.216},
}

_DETERMINISTIC = {"c": "constant", "ct": "constant+trend"}


@dataclass
class UnitRootReport:
    test: str
    statistic: float
    p_value: float
    lags_used: int
    deterministic: str
    nobs: int
    critical_values: dict = field(default_factory=dict)
    band: str = ""

    def rejects(self, level: float = 0.05) -> bool:
        """Whether the null is rejected at ``level``."""
        if self.test == "kpss":
            return self.statistic > KPSS_CRITICAL[_trend_key(self.deterministic)][level]
        return self.p_value < level

    def to_dict(self) -> dict:
        return {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "lags_used": self.lags_used,
            "deterministic": self.deterministic,
            "nobs": self.nobs,
            "critical_values": {str(k): v for k, v in self.critical_values.items()},
            "band": self.band,
        }


def _trend_key(deterministic: str) -> str:
    for k, v in _DETERMINISTIC.items():
        if deterministic in (k, v):
            return k
    raise DataError(f"deterministic terms must be one of {list(_DETERMINISTIC)}, got {deterministic!r}")


def default_max_lag(nobs: int, trend: str = "c") -> int:
    """Schwert's rule ``ceil(12 (n/100)^(1/4))``, capped so the regression keeps enough dof."""
    lag = int(math.ceil(12.0 * (nobs / 100.0) ** 0.25))
    return max(0, min(lag, nobs // 2 - len(trend) - 1))


def _adf_design(y: np.ndarray, lags: int, trend: str, start: int):
    """Regressand and design of the ADF regression for dy indices ``start..n-2``.

    Row ``j`` explains ``dy[j] = y[j+1] - y[j]``; ``start`` must be >= ``lags``.
    """
    dy = np.diff(y)
    rows = np.arange(start, dy.size)
    cols = [np.ones(rows.size)]
    if trend == "ct":
        cols.append(rows.astype(float) + 1.0)
    cols.append(y[rows])
    for i in range(1, lags + 1):
        cols.append(dy[rows - i])
    return dy[rows], np.column_stack(cols)


def adf_test(series, max_lag: int | None = None, ic: str = "sbic", trend: str = "c",
             lags: int | None = None) -> UnitRootReport:
    """ADF t-test of a unit root against a stationary alternative.

    The number of lagged differences is the SBIC minimiser over ``0..max_lag``,
    all candidates fitted on the same trimmed sample; the chosen model is then
    refitted on every usable observation.  Passing ``lags`` skips the search.
    P-values and critical values use MacKinnon's response surfaces.
    """
    y = np.asarray(series, dtype=float)
    trend = _trend_key(trend)
    if ic.lower() not in ("sbic", "bic", "schwarz"):
        raise ValueError(f"unsupported information criterion {ic!r}")
    n = y.size
    if max_lag is None:
        max_lag = default_max_lag(n, trend)
    if n <= max_lag + 2 + len(trend) + 1:
        raise DataError(f"ADF needs more than {max_lag + 3 + len(trend)} observations, got {n}")
    if np.ptp(y) == 0:
        raise EstimationError("ADF regression is singular: series is constant")

    if lags is None:
        best = None
        for p in range(max_lag + 1):
            dy, x = _adf_design(y, p, trend, max_lag)
            fit = ols(dy, x)
            m = dy.size
            sbic = m * math.log(fit.rss / m) + x.shape[1] * math.log(m)
            if best is None or sbic < best[0]:
                best = (sbic, p)
        lags = best[1]
    dy, x = _adf_design(y, lags, trend, lags)
    fit = ols(dy, x)
    j = 1 if trend == "c" else 2
    if fit.bse[j] == 0:
        raise EstimationError("ADF regression is singular: zero residual variance")
    stat = float(fit.params[j] / fit.bse[j])
    pval = float(mackinnonp(stat, regression=trend, N=1))
    crit = mackinnoncrit(N=1, regression=trend, nobs=dy.size)
    return UnitRootReport(
        test="adf",
        statistic=stat,
        p_value=min(max(pval, 0.0), 1.0),
        lags_used=int(lags),
        deterministic=_DETERMINISTIC[trend],
        nobs=int(dy.size),
        critical_values={0.01: float(crit[0]), 0.05: float(crit[1]), 0.10: float(crit[2])},
    )


def kpss_bandwidth(resid: np.ndarray) -> int:
    """Hobijn, Franses & Ooms (1998) data-dependent Bartlett bandwidth."""
    n = resid.size
    covlags = int(n ** (2.0 / 9.0))
    s0 = resid @ resid / n
    s1 = 0.0
    for i in range(1, covlags + 1):
        prod = resid[i:] @ resid[:-i] / (n / 2.0)
        s0 += prod
        s1 += i * prod
    if s0 <= 0:
        return 0
    gamma_hat = 1.1447 * ((s1 / s0) ** 2) ** (1.0 / 3.0)
    return int(min(gamma_hat * n ** (1.0 / 3.0), n - 1))


def kpss_test(series, bandwidth="auto", trend: str = "c") -> UnitRootReport:
    """KPSS test of (level or trend) stationarity.

    ``bandwidth`` is an integer number of Bartlett lags or ``"auto"``.  The
    p-value is interpolated within the tabulated band [0.01, 0.10] and clipped
    at its ends; ``band`` records which side of the table it fell on.
    """
    y = np.asarray(series, dtype=float)
    trend = _trend_key(trend)
    n = y.size
    if n < 20:
        raise DataError(f"KPSS needs at least 20 observations, got {n}")
    if trend == "c":
        resid = y - y.mean()
    else:
        t = np.arange(n, dtype=float)
        resid = ols(y, np.column_stack([np.ones(n), t])).resid
    if bandwidth in ("auto", "automatic", None):
        lags = kpss_bandwidth(resid)
    else:
        lags = int(bandwidth)
        if not 0 <= lags < n:
            raise DataError(f"KPSS bandwidth must lie in [0, {n - 1}]")
    partial = np.cumsum(resid)
    num = partial @ partial / n**2
    lrv = resid @ resid / n
    for i in range(1, lags + 1):
        lrv += 2.0 * (1.0 - i / (lags + 1.0)) * (resid[i:] @ resid[:-i]) / n
    if num == 0.0:
        stat = 0.0
    elif lrv <= 0:
        raise EstimationError("KPSS long-run variance is not positive")
    else:
        stat = float(num / lrv)
    table = KPSS_CRITICAL[trend]
    levels = sorted(table, reverse=True)  # 0.10, 0.05, 0.025, 0.01
    crits = [table[a] for a in levels]
    p = float(np.interp(stat, crits, levels))
    if stat < crits[0]:
        band = "p > 0.10"
    elif stat > crits[-1]:
        band = "p < 0.01"
    else:
        band = "0.01 <= p <= 0.10"
    return UnitRootReport(
        test="kpss",
        statistic=stat,
        p_value=p,
        lags_used=lags,
        deterministic=_DETERMINISTIC[trend],
        nobs=n,
        critical_values=dict(table),
        band=band,
    )
