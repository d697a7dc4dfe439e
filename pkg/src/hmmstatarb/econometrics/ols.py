from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hmmstatarb.exceptions import EstimationError


@dataclass
class OLSFit:
    params: np.ndarray
    bse: np.ndarray
    resid: np.ndarray
    rss: float
    sigma2: float
    xtx_inv: np.ndarray


def ols(y: np.ndarray, x: np.ndarray, check_rank: bool = True) -> OLSFit:
    """Least squares of ``y`` (n,) or (n, k) on the design ``x`` (n, p).

    Standard errors use ``rss / (n - p)``.  A rank-deficient design raises
    :class:`EstimationError`.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n, p = x.shape
    if n <= p:
        raise EstimationError(f"regression has {n} observations for {p} regressors")
    if check_rank and np.linalg.matrix_rank(x) < p:
        raise EstimationError("regressor matrix is rank deficient")
    q, r = np.linalg.qr(x)
    params = np.linalg.solve(r, q.T @ y)
    resid = y - x @ params
    r_inv = np.linalg.solve(r, np.eye(p))
    xtx_inv = r_inv @ r_inv.T
    rss = resid.T @ resid if resid.ndim == 1 else resid.T @ resid
    if resid.ndim == 1:
        sigma2 = float(rss) / (n - p)
        bse = np.sqrt(np.clip(np.diag(xtx_inv) * sigma2, 0.0, None))
        rss = float(rss)
    else:
        sigma2 = np.diag(rss) / (n - p)
        bse = np.sqrt(np.clip(np.outer(np.diag(xtx_inv), sigma2), 0.0, None))
    return OLSFit(params, bse, resid, rss, sigma2, xtx_inv)
