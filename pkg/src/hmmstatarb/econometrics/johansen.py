"""Johansen trace test and VECM estimation, constant restricted to the cointegrating space.

The error-correction form is

    dF_t = alpha (beta' F_{t-1} + c0) + sum_{i=1}^{p-1} Gamma_i dF_{t-i} + eps_t

with no unrestricted intercept.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy import stats

from hmmstatarb.econometrics import _johansen_tables as _tab
from hmmstatarb.econometrics.ols import ols
from hmmstatarb.exceptions import DataError, EstimationError

SUPPORTED_CASES = ("restricted_constant",)

# 5% asymptotic critical values for k - r = 1, 2, 3 (MacKinnon, Haug & Michelis 1999);
# larger dimensions fall back to the simulated table.
_PUBLISHED_CRIT_5 = {1: 9.1645, 2: 20.2618, 3: 35.1928}


def critical_value(dim: int, level: float = 0.05) -> float:
    """Upper ``level`` critical value of the trace statistic for ``dim = k - r`` free trends."""
    if dim not in _tab.QUANTILES:
        raise DataError(f"critical values are tabulated for k - r in 1..6, got {dim}")
    if level == 0.05 and dim in _PUBLISHED_CRIT_5:
        return _PUBLISHED_CRIT_5[dim]
    return float(np.interp(1.0 - level, _tab.PROBS, _tab.QUANTILES[dim]))


def trace_pvalue(stat: float, dim: int) -> float:
    """Asymptotic p-value: interpolation in the simulated quantile table, gamma tails outside it."""
    if dim not in _tab.QUANTILES:
        raise DataError(f"p-values are tabulated for k - r in 1..6, got {dim}")
    q = np.asarray(_tab.QUANTILES[dim])
    probs = np.asarray(_tab.PROBS)
    if q[0] <= stat <= q[-1]:
        return float(1.0 - np.interp(stat, q, probs))
    mean, var = _tab.MOMENTS[dim]
    shape, scale = mean**2 / var, var / mean
    if stat > q[-1]:
        # rescale the gamma tail so it is continuous with the table edge
        edge = stats.gamma.sf(q[-1], shape, scale=scale)
        return float((1.0 - probs[-1]) * stats.gamma.sf(stat, shape, scale=scale) / edge)
    edge = stats.gamma.cdf(q[0], shape, scale=scale)
    return float(1.0 - probs[0] * stats.gamma.cdf(max(stat, 0.0), shape, scale=scale) / edge)


@dataclass
class CointegrationResult:
    """Trace-test table plus the estimated error-correction parameters.

    ``beta`` is normalised so its first entry is 1 and the spread reads
    ``S_t = c0 + beta @ F_t``.
    """

    eigenvalues: np.ndarray
    trace_stats: np.ndarray
    critical_values: np.ndarray
    p_values: np.ndarray
    selected_rank: int
    beta: np.ndarray
    c0: float
    alpha: np.ndarray
    lag_order: int
    nobs: int
    names: tuple = ()
    short_run: list = field(default_factory=list)
    ect: np.ndarray | None = None
    rank_used: int = 1
    det_case: str = "restricted_constant"

    @property
    def weights(self) -> np.ndarray:
        """Portfolio weights ``(c0, beta_1, ..., beta_k)``."""
        return np.r_[self.c0, self.beta]

    def trace_table(self) -> list[dict]:
        return [
            {
                "r": r,
                "h": int(self.trace_stats[r] > self.critical_values[r]),
                "stat": float(self.trace_stats[r]),
                "crit": float(self.critical_values[r]),
                "pValue": float(self.p_values[r]),
            }
            for r in range(self.trace_stats.size)
        ]

    def to_dict(self) -> dict:
        return {
            "names": list(self.names),
            "det_case": self.det_case,
            "lag_order": self.lag_order,
            "nobs": self.nobs,
            "eigenvalues": self.eigenvalues.tolist(),
            "trace_test": self.trace_table(),
            "selected_rank": self.selected_rank,
            "beta": self.beta.tolist(),
            "c0": float(self.c0),
            "alpha": self.alpha.tolist(),
            "short_run": [g.tolist() for g in self.short_run],
        }


def _values(panel) -> np.ndarray:
    vals = np.asarray(getattr(panel, "values", panel), dtype=float)
    if vals.ndim != 2 or vals.shape[1] < 2:
        raise DataError("Johansen analysis needs a 2-d panel with at least two series")
    return vals


def _check_case(det_case: str):
    if det_case not in SUPPORTED_CASES:
        raise DataError(f"only the restricted-constant case is implemented, got {det_case!r}")


def _regressions(vals: np.ndarray, p: int):
    n, k = vals.shape
    if p < 1:
        raise DataError("lag order p must be >= 1")
    rows = np.arange(p, n)
    if rows.size <= k * p + 1:
        raise DataError(f"too few observations ({n}) for a VECM with p = {p}")
    d = np.diff(vals, axis=0)  # d[j] = F[j+1] - F[j]
    dy = d[rows - 1]
    lagged = np.hstack([d[rows - 1 - i] for i in range(1, p)]) if p > 1 else np.empty((rows.size, 0))
    level = np.column_stack([vals[rows - 1], np.ones(rows.size)])
    return dy, level, lagged


def _partial_out(a: np.ndarray, z: np.ndarray) -> np.ndarray:
    if z.shape[1] == 0:
        return a
    return ols(a, z).resid


def moment_matrices(panel, p: int):
    """Product moment matrices ``S00, S01, S11`` of the concentrated regressions, and ``n``."""
    vals = _values(panel)
    dy, level, lagged = _regressions(vals, p)
    r0 = _partial_out(dy, lagged)
    r1 = _partial_out(level, lagged)
    n = dy.shape[0]
    return r0.T @ r0 / n, r0.T @ r1 / n, r1.T @ r1 / n, n


def solve_eigenproblem(s00, s01, s11):
    """Solve ``|mu S11 - S10 S00^-1 S01| = 0``; eigenvalues descending, vectors ``v' S11 v = 1``."""
    s00, s01, s11 = (np.asarray(a, dtype=float) for a in (s00, s01, s11))
    try:
        a = s01.T @ np.linalg.solve(s00, s01)
        a = 0.5 * (a + a.T)
        mu, v = scipy.linalg.eigh(a, 0.5 * (s11 + s11.T))
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise EstimationError(f"Johansen eigenproblem failed: {exc}") from exc
    order = np.argsort(mu)[::-1]
    return np.clip(mu[order], 0.0, 1.0 - 1e-15), v[:, order]


def trace_statistics(eigenvalues, n: int, k: int) -> np.ndarray:
    """``-n * sum_{i>=r} ln(1 - mu_i)`` for ``r = 0..k-1`` using the ``k`` largest eigenvalues."""
    lam = np.asarray(eigenvalues, dtype=float)[:k]
    tail = np.cumsum(np.log1p(-lam)[::-1])[::-1]
    return -n * tail


def trace_test_from_moments(s00, s01, s11, n: int, level: float = 0.05):
    """Trace statistics, critical values, p-values and selected rank from moment matrices."""
    k = np.asarray(s00).shape[0]
    if k > 6:
        raise DataError("critical values are tabulated for at most 6 series")
    mu, v = solve_eigenproblem(s00, s01, s11)
    stats_ = trace_statistics(mu, n, k)
    crit = np.array([critical_value(k - r, level) for r in range(k)])
    pv = np.array([trace_pvalue(s, k - r) for r, s in enumerate(stats_)])
    not_rejected = np.flatnonzero(stats_ <= crit)
    rank = int(not_rejected[0]) if not_rejected.size else k
    return mu[:k], v, stats_, crit, pv, rank


def _normalise(v: np.ndarray, k: int, r: int) -> np.ndarray:
    """First ``r`` cointegrating vectors with the leading ``r x r`` block set to identity."""
    b = v[:, :r]
    head = b[:r, :r]
    if abs(np.linalg.det(head)) < 1e-14:
        raise EstimationError("cannot normalise the cointegrating vector on the first series")
    return b @ np.linalg.inv(head)


def fit_vecm(panel, p: int, r: int = 1, det_case: str = "restricted_constant",
             names=None) -> CointegrationResult:
    """Estimate the VECM with cointegration rank ``r``.

    The trace test is run along the way and reported, but estimation uses the
    requested ``r``.  Short-run matrices ``Gamma_1..Gamma_{p-1}`` and the
    adjustment vector come from OLS of ``dF_t`` on the error-correction term and
    the lagged differences.
    """
    _check_case(det_case)
    vals = _values(panel)
    n_all, k = vals.shape
    if not 1 <= r <= k:
        raise DataError(f"rank must lie in 1..{k}, got {r}")
    dy, level, lagged = _regressions(vals, p)
    r0 = _partial_out(dy, lagged)
    r1 = _partial_out(level, lagged)
    n = dy.shape[0]
    s00, s01, s11 = r0.T @ r0 / n, r0.T @ r1 / n, r1.T @ r1 / n
    mu, v, stats_, crit, pv, rank = trace_test_from_moments(s00, s01, s11, n)
    b = _normalise(v, k + 1, r)  # (k + 1, r), last row is the restricted constant
    ect_all = level @ b  # (n, r)
    x = np.hstack([ect_all, lagged])
    fit = ols(dy, x)
    alpha = fit.params[:r].T  # (k, r)
    short = [fit.params[r + i * k: r + (i + 1) * k].T for i in range(p - 1)]
    if names is None:
        names = tuple(getattr(panel, "names", ())) or tuple(f"y{i + 1}" for i in range(k))
    return CointegrationResult(
        eigenvalues=mu,
        trace_stats=stats_,
        critical_values=crit,
        p_values=pv,
        selected_rank=rank,
        beta=b[:k, 0].copy(),
        c0=float(b[k, 0]),
        alpha=alpha[:, 0].copy(),
        lag_order=p,
        nobs=n,
        names=tuple(names),
        short_run=short,
        ect=ect_all[:, 0].copy(),
        rank_used=r,
        det_case=det_case,
    )


def johansen_trace(panel, p: int, det_case: str = "restricted_constant") -> CointegrationResult:
    """Trace test for the cointegration rank.

    ``selected_rank`` is the smallest ``r`` whose null (rank <= r) is not
    rejected at 5%.  The leading relation is always estimated, so ``beta``,
    ``c0`` and ``alpha`` are populated even when the selected rank is zero.
    """
    return fit_vecm(panel, p, r=1, det_case=det_case)
