"""Reduced-form VAR(p) estimation by equation-wise OLS and SBIC lag selection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hmmstatarb.econometrics.ols import ols
from hmmstatarb.exceptions import DataError


@dataclass
class VarModel:
    p: int
    intercept: np.ndarray
    coefficient_matrices: list
    intercept_se: np.ndarray
    coefficient_se: list
    residual_covariance: np.ndarray
    residuals: np.ndarray
    design: np.ndarray
    log_likelihood: float
    sbic: float
    nobs: int

    @property
    def companion_moduli(self) -> np.ndarray:
        """Moduli of the companion-matrix eigenvalues, descending; all < 1 means stable."""
        k = self.intercept.size
        comp = np.zeros((k * self.p, k * self.p))
        comp[:k] = np.hstack(self.coefficient_matrices)
        comp[k:, :-k] = np.eye(k * (self.p - 1))
        return np.sort(np.abs(np.linalg.eigvals(comp)))[::-1]

    @property
    def is_stable(self) -> bool:
        return bool(np.all(self.companion_moduli < 1.0))


def _values(panel) -> np.ndarray:
    vals = getattr(panel, "values", panel)
    vals = np.asarray(vals, dtype=float)
    if vals.ndim != 2:
        raise DataError("expected a 2-d panel of shape (n, k)")
    return vals


def lagged_design(values: np.ndarray, p: int, start: int) -> tuple[np.ndarray, np.ndarray]:
    """``Y = F_t`` and ``X = [1, F_{t-1}, ..., F_{t-p}]`` for ``t = start..n-1``."""
    n = values.shape[0]
    rows = np.arange(start, n)
    x = [np.ones((rows.size, 1))]
    for i in range(1, p + 1):
        x.append(values[rows - i])
    return values[rows], np.hstack(x)


def fit_var(panel, p: int, start: int | None = None) -> VarModel:
    """OLS fit of ``F_t = a0 + A_1 F_{t-1} + ... + A_p F_{t-p} + u_t``.

    ``start`` (default ``p``) is the first row used as a regressand, which lets
    several lag orders share one effective sample.
    """
    vals = _values(panel)
    n, k = vals.shape
    if p < 1:
        raise DataError("VAR lag order must be >= 1")
    start = p if start is None else start
    if start < p:
        raise DataError("start must be >= p")
    if n - start <= k * p + 1:
        raise DataError(f"VAR({p}) needs more than {k * p + 1 + start} observations, got {n}")
    y, x = lagged_design(vals, p, start)
    fit = ols(y, x)
    m = y.shape[0]
    sigma_ml = fit.resid.T @ fit.resid / m
    sign, logdet = np.linalg.slogdet(sigma_ml)
    if sign <= 0:
        raise DataError("residual covariance is singular")
    loglik = -0.5 * m * (k * math.log(2 * math.pi) + logdet + k)
    sbic = logdet + (k * k * p + k) * math.log(m) / m
    coefs = [fit.params[1 + i * k: 1 + (i + 1) * k].T for i in range(p)]
    ses = [fit.bse[1 + i * k: 1 + (i + 1) * k].T for i in range(p)]
    return VarModel(
        p=p,
        intercept=fit.params[0].copy(),
        coefficient_matrices=coefs,
        intercept_se=fit.bse[0].copy(),
        coefficient_se=ses,
        residual_covariance=fit.resid.T @ fit.resid / (m - k * p - 1),
        residuals=fit.resid,
        design=x,
        log_likelihood=float(loglik),
        sbic=float(sbic),
        nobs=m,
    )


def select_var_lag(panel, p_max: int) -> int:
    """SBIC-minimising lag order in ``1..p_max`` on the common sample ``p_max..n-1``."""
    vals = _values(panel)
    n, k = vals.shape
    if p_max < 1:
        raise DataError("p_max must be >= 1")
    if n <= k * p_max + p_max + 1:
        raise DataError(f"lag selection up to {p_max} needs more than {k * p_max + p_max + 1} rows")
    scores = [fit_var(vals, p, start=p_max).sbic for p in range(1, p_max + 1)]
    return int(np.argmin(scores)) + 1
