"""Batchwise filter-based EM with one-step forecasts; choice of the number of regimes."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from hmmstatarb.exceptions import DataError, EstimationError
from hmmstatarb.ou_hmm.filter import FilterState, filter_pass, filter_step, gaussian_base_loglik
from hmmstatarb.ou_hmm.params import HmmParams, init_params, split_init_params

TRUNCATION_FACTOR = 10.0
# level spreads (in units of the OLS residual sd) of the extra starts tried by fit_filter_em
DEFAULT_SPLITS = (0.5, 1.0, 2.0, 3.0)
# an occupation below this is treated as "state never visited"
MIN_OCCUPATION = 1e-8


def _truncate(new: float, prev: float, factor: float | None) -> float:
    if not math.isfinite(new):
        return prev
    if factor is None or prev == 0.0:
        return new
    lo, hi = abs(prev) / factor, abs(prev) * factor
    mag = min(max(abs(new), lo), hi)
    return math.copysign(mag, new)


def em_update(state: FilterState, params: HmmParams, truncation: float | None = TRUNCATION_FACTOR,
              min_occupation: float = MIN_OCCUPATION) -> HmmParams:
    """M-step from the current filtered sufficient statistics.

    For each state the weighted AR(1) normal equations are solved jointly for
    ``(gamma_i, alpha_i)`` and ``eta_i^2`` is the weighted residual mean
    square.  ``Pi[i, j] = Jhat[i, j] / Ohat[j]``.  An estimate whose magnitude
    moves by more than ``truncation`` times its previous value is clipped to
    that bound (sign changes are allowed), states with negligible occupation
    keep their previous values, and columns of ``Pi`` are renormalised.
    """
    occ = state.occupations()
    ls = state.level_sums()
    jumps = state.jumps()
    N = params.N
    gamma, alpha, eta = params.gamma.copy(), params.alpha.copy(), params.eta.copy()
    for i in range(N):
        s0 = occ[i]
        if s0 < min_occupation:
            continue
        sx, sxx = ls["ylag"][i], ls["y2lag"][i]
        sy, syy, sxy = ls["y"][i], ls["y2"][i], ls["yy"][i]
        det = s0 * sxx - sx * sx
        if det <= 1e-12 * s0 * max(sxx, 1e-300):
            continue
        a_new = (s0 * sxy - sx * sy) / det
        g_new = (sy - a_new * sx) / s0
        a_new = _truncate(a_new, params.alpha[i], truncation)
        g_new = _truncate(g_new, params.gamma[i], truncation)
        rss = (syy - 2 * a_new * sxy - 2 * g_new * sy + a_new * a_new * sxx
               + 2 * a_new * g_new * sx + g_new * g_new * s0)
        alpha[i], gamma[i] = a_new, g_new
        if rss > 0:
            e_new = _truncate(math.sqrt(rss / s0), params.eta[i], truncation)
            if e_new > 0:
                eta[i] = e_new
    Pi = params.Pi.copy()
    for j in range(N):
        if occ[j] < min_occupation:
            continue
        col = np.array([_truncate(jumps[i, j] / occ[j], params.Pi[i, j], truncation)
                        for i in range(N)])
        col = np.clip(col, 0.0, None)
        s = col.sum()
        if s > 0:
            Pi[:, j] = col / s
    return HmmParams(gamma, alpha, eta, Pi)


def forecast(params: HmmParams, x_hat, y_now: float) -> tuple[float, float]:
    """One-step mean and variance with the parameter vectors contracted against ``x_hat``."""
    x = np.asarray(x_hat, dtype=float)
    if x.shape != (params.N,) or np.any(x < -1e-12) or abs(x.sum() - 1.0) > 1e-8:
        raise DataError(f"x_hat must be a probability vector of length {params.N}, got {x}")
    mean = float(x @ params.gamma + (x @ params.alpha) * y_now)
    var = float((x @ params.eta) ** 2)
    return mean, var


@dataclass
class EstimateTrace:
    """Per-step output of :func:`run_filter_em`.

    Row ``t`` holds the filtered probabilities after ``y_t``, the forecast of
    ``y_{t+1}`` made at ``t`` and the cumulative log-likelihood of ``y_1..y_t``.
    """

    y: np.ndarray
    probabilities: np.ndarray
    forecast_mean: np.ndarray
    forecast_var: np.ndarray
    loglik: np.ndarray
    snapshot_times: list
    snapshots: list
    m: int
    dates: np.ndarray | None = None
    final_state: FilterState | None = field(default=None, repr=False)
    start: str = "ols_scaled"

    @property
    def N(self) -> int:
        return self.probabilities.shape[1]

    @property
    def final_params(self) -> HmmParams:
        return self.snapshots[-1]

    def params_at(self, t: int) -> HmmParams:
        """Parameters in force after processing ``y_t``."""
        k = int(np.searchsorted(self.snapshot_times, t, side="right")) - 1
        return self.snapshots[max(k, 0)]

    def total_loglik(self) -> float:
        return float(self.loglik[-1])

    def mse(self) -> float:
        """Mean squared one-step forecast error over the sample."""
        err = self.y[1:] - self.forecast_mean[:-1]
        return float(np.mean(err * err))

    def to_csv(self, path) -> None:
        N = self.N
        header = ["t", "date", "y"] + [f"p{i + 1}" for i in range(N)] + [
            "forecast_mean", "forecast_var", "loglik"]
        header += [f"gamma{i + 1}" for i in range(N)] + [f"alpha{i + 1}" for i in range(N)]
        header += [f"eta{i + 1}" for i in range(N)]
        header += [f"pi{i + 1}{j + 1}" for i in range(N) for j in range(N)]
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            k = 0
            for t in range(self.y.size):
                while k + 1 < len(self.snapshot_times) and self.snapshot_times[k + 1] <= t:
                    k += 1
                p = self.snapshots[k]
                date = str(self.dates[t]) if self.dates is not None else ""
                row = [t, date, repr(float(self.y[t]))]
                row += [repr(float(v)) for v in self.probabilities[t]]
                row += [repr(float(self.forecast_mean[t])), repr(float(self.forecast_var[t])),
                        repr(float(self.loglik[t]))]
                row += [repr(float(v)) for v in np.r_[p.gamma, p.alpha, p.eta, p.Pi.ravel()]]
                w.writerow(row)

    @classmethod
    def from_csv(cls, path) -> "EstimateTrace":
        with Path(path).open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise DataError(f"{path}: empty trace")
        N = sum(1 for c in rows[0] if c.startswith("p") and c[1:].isdigit())
        col = lambda name: np.array([float(r[name]) for r in rows])  # noqa: E731
        y = col("y")
        probs = np.column_stack([col(f"p{i + 1}") for i in range(N)])
        dates = None
        if rows[0]["date"]:
            dates = np.array([r["date"] for r in rows], dtype="datetime64[D]")
        times, snaps, last = [], [], None
        for t, r in enumerate(rows):
            vec = tuple(float(r[c]) for c in r if c[:3] in ("gam", "alp", "eta") or
                        (c.startswith("pi") and c[2:].isdigit()))
            if vec != last:
                v = np.array(vec)
                snaps.append(HmmParams(v[:N], v[N:2 * N], v[2 * N:3 * N],
                                       v[3 * N:].reshape(N, N)))
                times.append(t)
                last = vec
        return cls(y, probs, col("forecast_mean"), col("forecast_var"), col("loglik"),
                   times, snaps, m=0, dates=dates)


def run_filter_em(y, N: int, m: int = 10, n_init: int = 20, init: HmmParams | None = None,
                  truncation: float | None = TRUNCATION_FACTOR, dates=None) -> EstimateTrace:
    """Filter the whole series, re-estimating parameters every ``m`` observations.

    Starting values come from :func:`init_params` on the first ``n_init``
    points unless ``init`` is given.  The filters start from ``X_0 = e_1``
    at ``y_0`` and the parameters used inside each step are the latest
    estimates.
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if m < 1:
        raise DataError("batch parameter m must be >= 1")
    if n < n_init + m:
        raise DataError(f"need at least {n_init + m} observations, got {n}")
    params = init_params(y, N, n_init) if init is None else init.copy()
    state = FilterState.initial(N, y[0])
    probs = np.empty((n, N))
    fmean = np.empty(n)
    fvar = np.empty(n)
    loglik = np.empty(n)
    times, snaps = [0], [params]
    base = 0.0
    probs[0] = state.probabilities()
    fmean[0], fvar[0] = forecast(params, probs[0], y[0])
    loglik[0] = 0.0
    for t in range(1, n):
        state = filter_step(state, params, y[t])
        base += gaussian_base_loglik(y[t:t + 1])
        if t % m == 0:
            params = em_update(state, params, truncation=truncation)
            times.append(t)
            snaps.append(params)
        probs[t] = state.probabilities()
        fmean[t], fvar[t] = forecast(params, probs[t], y[t])
        loglik[t] = state.log_normaliser() + base
    return EstimateTrace(y, probs, fmean, fvar, loglik, times, snaps, m,
                         dates=None if dates is None else np.asarray(dates, dtype="datetime64[D]"),
                         final_state=state)


def fit_filter_em(y, N: int, m: int = 10, n_init: int = 20, splits=DEFAULT_SPLITS,
                  truncation: float | None = TRUNCATION_FACTOR, dates=None,
                  select_until: int | None = None) -> EstimateTrace:
    """:func:`run_filter_em` from several starting points, keeping the best total log-likelihood.

    The starts are the multiplicative spread of :func:`init_params` plus one
    :func:`split_init_params` start per entry of ``splits``.  Every run is
    itself causal; only the choice between runs looks at the whole sample,
    the same way :func:`select_num_states` does.  ``select_until = k``
    compares the runs on the log-likelihood of ``y_1..y_k`` only, which keeps
    the choice free of anything after ``k``.  With ``N = 1`` or empty
    ``splits`` this is a single :func:`run_filter_em`.
    """
    y = np.asarray(y, dtype=float)
    k_sel = y.size - 1 if select_until is None else int(select_until)
    if not 0 < k_sel < y.size:
        raise DataError(f"select_until must lie in 1..{y.size - 1}")
    best = run_filter_em(y, N, m=m, n_init=n_init, truncation=truncation, dates=dates)
    if N == 1:
        return best
    for k in splits:
        try:
            tr = run_filter_em(y, N, m=m, n_init=n_init, truncation=truncation, dates=dates,
                               init=split_init_params(y, N, k, n_init))
        except EstimationError:
            continue  # a start that underflows is simply not a candidate
        tr.start = f"split_{k:g}"
        if tr.loglik[k_sel] > best.loglik[k_sel]:
            best = tr
    return best


def refine_em(y, params: HmmParams, max_iter: int = 200, tol: float = 1e-3):
    """Offline EM sweeps with the same filters, for scoring a fitted model.

    Each sweep filters the whole of ``y`` at fixed parameters and applies
    :func:`em_update` (no truncation) to the end-of-sample statistics, which
    are exact conditional expectations at those parameters, so the
    log-likelihood cannot decrease.  Stops when a sweep gains less than
    ``tol``.  Returns ``(params, loglik, sweeps)`` where ``loglik`` is the
    exact log-likelihood of ``y_1..y_n`` given ``y_0`` at the returned
    parameters.
    """
    y = np.asarray(y, dtype=float)
    base = gaussian_base_loglik(y[1:])
    state = filter_pass(params, y)
    ll = state.log_normaliser() + base
    for k in range(1, max_iter + 1):
        new = em_update(state, params, truncation=None)
        try:
            new_state = filter_pass(new, y)
        except EstimationError:
            return params, ll, k - 1
        new_ll = new_state.log_normaliser() + base
        if not new_ll > ll:
            return params, ll, k - 1
        gain = new_ll - ll
        params, state, ll = new, new_state, new_ll
        if gain < tol:
            return params, ll, k
    return params, ll, max_iter


def n_free_parameters(N: int) -> int:
    return N * (N - 1) + 3 * N


@dataclass
class ModelSelection:
    best: int
    table: list
    traces: dict

    def to_dict(self) -> dict:
        return {"selected_N": self.best, "criterion": "SBIC", "candidates": self.table}


def select_num_states(y, candidates=(1, 2, 3), m: int = 10, n_init: int = 20,
                      splits=DEFAULT_SPLITS, refine_iter: int = 25,
                      refine_tol: float = 0.05) -> ModelSelection:
    """Pick ``N`` by ``SBIC = -2 logL + k ln n`` with ``k = N(N-1) + 3N`` and ``n`` transitions.

    Each candidate is fitted with :func:`fit_filter_em` and its end-of-sample
    estimate is polished by :func:`refine_em`; ``logL`` is the exact
    likelihood at the polished parameters.  The cumulative one-pass
    log-likelihood is biased low by the early learning phase, and by
    different amounts for different ``N``, so it is only reported
    (``online_loglik``).  ``refine_iter = 0`` scores the one-pass estimate
    itself.  The sweep cap matters only for redundant states, whose
    likelihood creeps up slowly by amounts far below the SBIC penalty of the
    extra parameters.  The one-step mean squared forecast error is reported alongside
    but not used for the decision.
    """
    y = np.asarray(y, dtype=float)
    cands = sorted(set(int(c) for c in candidates))
    if not cands:
        raise DataError("no candidate numbers of states")
    n = y.size - 1
    table, traces = [], {}
    for N in cands:
        tr = fit_filter_em(y, N, m=m, n_init=n_init, splits=splits)
        params, ll, sweeps = refine_em(y, tr.final_params, max_iter=refine_iter, tol=refine_tol)
        k = n_free_parameters(N)
        table.append({"N": N, "loglik": ll, "online_loglik": tr.total_loglik(), "k": k,
                      "sbic": -2.0 * ll + k * math.log(n), "mse": tr.mse(),
                      "refine_sweeps": sweeps, "params": params.to_dict()})
        traces[N] = tr
    best = min(table, key=lambda r: r["sbic"])["N"]
    return ModelSelection(best, table, traces)
