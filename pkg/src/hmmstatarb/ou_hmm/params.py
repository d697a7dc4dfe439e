"""Parameters of the regime-switching AR(1)/OU spread model.

Discrete form, for a chain ``X_t`` on the unit vectors ``e_1..e_N``::

    y_{t+1} = gamma(X_t) + alpha(X_t) y_t + eta(X_t) z_{t+1}

with ``Pi[i, j] = P(X_{t+1} = e_i | X_t = e_j)`` (columns sum to one).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hmmstatarb.exceptions import DataError, EstimationError

DAILY_DELTA = 1.0 / 250.0
WEEKLY_DELTA = 1.0 / 52.0


@dataclass
class HmmParams:
    gamma: np.ndarray
    alpha: np.ndarray
    eta: np.ndarray
    Pi: np.ndarray

    def __post_init__(self):
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float)).copy()
        self.alpha = np.atleast_1d(np.asarray(self.alpha, dtype=float)).copy()
        self.eta = np.atleast_1d(np.asarray(self.eta, dtype=float)).copy()
        self.Pi = np.atleast_2d(np.asarray(self.Pi, dtype=float)).copy()
        n = self.gamma.size
        if not (self.alpha.size == self.eta.size == n and self.Pi.shape == (n, n)):
            raise DataError("gamma, alpha, eta must have length N and Pi shape (N, N)")
        if not np.all(self.eta > 0) or not np.all(np.isfinite(self.eta)):
            raise DataError(f"eta must be finite and positive, got {self.eta}")
        if np.any(self.Pi < 0) or np.any(self.Pi > 1):
            raise DataError("transition probabilities must lie in [0, 1]")
        if not np.allclose(self.Pi.sum(axis=0), 1.0, rtol=0, atol=1e-10):
            raise DataError(f"columns of Pi must sum to 1, got {self.Pi.sum(axis=0)}")

    @property
    def N(self) -> int:
        return self.gamma.size

    def copy(self) -> "HmmParams":
        return HmmParams(self.gamma, self.alpha, self.eta, self.Pi)

    def stationary_distribution(self) -> np.ndarray:
        """Stationary law of the chain; raises :class:`EstimationError` if not unique."""
        n = self.N
        if n == 1:
            return np.ones(1)
        w, v = np.linalg.eig(self.Pi)
        ones = np.isclose(w, 1.0, atol=1e-10)
        if ones.sum() != 1:
            raise EstimationError("transition matrix has no unique stationary distribution")
        pi = np.real(v[:, np.flatnonzero(ones)[0]])
        pi = pi / pi.sum()
        if np.any(pi < -1e-12):
            raise EstimationError("stationary vector is not a probability vector")
        return np.clip(pi, 0.0, None) / np.clip(pi, 0.0, None).sum()

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "gamma": self.gamma.tolist(),
            "alpha": self.alpha.tolist(),
            "eta": self.eta.tolist(),
            "Pi": self.Pi.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HmmParams":
        return cls(d["gamma"], d["alpha"], d["eta"], d["Pi"])


@dataclass
class ContinuousParams:
    """Regime-wise OU parameters of ``dS = a (beta - S) dt + xi dW`` sampled every ``delta`` years."""

    a: np.ndarray
    beta: np.ndarray
    xi: np.ndarray
    delta: float

    def __post_init__(self):
        self.a = np.atleast_1d(np.asarray(self.a, dtype=float))
        self.beta = np.atleast_1d(np.asarray(self.beta, dtype=float))
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        if np.any(self.a <= 0) or np.any(self.xi <= 0) or self.delta <= 0:
            raise DataError("a and xi must be positive, as must delta")

    def to_dict(self) -> dict:
        return {"a": self.a.tolist(), "beta": self.beta.tolist(), "xi": self.xi.tolist(),
                "delta": self.delta}


def to_continuous(params: HmmParams, delta: float = DAILY_DELTA) -> ContinuousParams:
    """Invert ``alpha = e^{-a delta}``, ``gamma = beta (1 - alpha)``,
    ``eta = xi sqrt((1 - e^{-2 a delta}) / (2 a))``."""
    alpha = params.alpha
    if np.any(alpha <= 0) or np.any(alpha >= 1):
        raise DataError(f"continuous-time mapping needs 0 < alpha < 1, got {alpha}")
    a = -np.log(alpha) / delta
    beta = params.gamma / (1.0 - alpha)
    xi = params.eta * np.sqrt(2.0 * a / (1.0 - alpha**2))
    return ContinuousParams(a, beta, xi, delta)


def to_discrete(cp: ContinuousParams, Pi=None) -> HmmParams:
    alpha = np.exp(-cp.a * cp.delta)
    gamma = cp.beta * (1.0 - alpha)
    eta = cp.xi * np.sqrt((1.0 - alpha**2) / (2.0 * cp.a))
    if Pi is None:
        Pi = np.eye(alpha.size)
    return HmmParams(gamma, alpha, eta, Pi)


def ar1_ols(y) -> tuple[float, float, float]:
    """OLS of ``y_{t+1} = gamma + alpha y_t + eps``; returns ``(gamma, alpha, rss / (n - 2))``."""
    y = np.asarray(y, dtype=float)
    x, z = y[:-1], y[1:]
    n = x.size
    if n < 3:
        raise DataError("AR(1) OLS needs at least 4 observations")
    xm = x.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx <= 1e-14 * max(1.0, np.sum(x**2)):
        raise EstimationError("degenerate AR(1) regression: lagged values have no variance")
    alpha = np.sum((x - xm) * (z - z.mean())) / sxx
    gamma = z.mean() - alpha * xm
    resid = z - gamma - alpha * x
    s2 = resid @ resid / (n - 2)
    if s2 <= 0:
        raise EstimationError("degenerate AR(1) regression: zero residual variance")
    return float(gamma), float(alpha), float(s2)


# Remark-style starting transition matrices (column j = distribution of the next state given j)
_INIT_PI = {
    1: np.array([[1.0]]),
    2: np.array([[0.6, 0.5],
                 [0.4, 0.5]]),
    3: np.array([[0.5, 0.25, 0.2],
                 [0.3, 0.40, 0.2],
                 [0.2, 0.35, 0.6]]),
}
_SCALES = {1: (1.0,), 2: (1.3, 0.7), 3: (1.3, 1.0, 0.7)}


def init_params(y, N: int, n_init: int = 20) -> HmmParams:
    """Starting values from an AR(1) OLS fit on the first ``n_init`` points.

    Every parameter is spread around its OLS value with multipliers 1.3/0.7
    (N = 2) or 1.3/1.0/0.7 (N = 3).  Larger N uses evenly spaced multipliers
    in [0.7, 1.3] and a uniform transition matrix with extra weight on the
    diagonal.
    """
    y = np.asarray(y, dtype=float)
    if y.size < n_init:
        raise DataError(f"initialisation needs {n_init} observations, got {y.size}")
    if N < 1:
        raise DataError("N must be >= 1")
    g, a, s2 = ar1_ols(y[:n_init])
    if N in _SCALES:
        scale = np.array(_SCALES[N])
        Pi = _INIT_PI[N].copy()
    else:
        scale = np.linspace(1.3, 0.7, N)
        Pi = np.full((N, N), 0.5 / (N - 1))
        np.fill_diagonal(Pi, 0.5)
    return HmmParams(g * scale, a * scale, np.sqrt(s2) * scale, Pi)


def split_init_params(y, N: int, spread: float = 1.0, n_init: int = 20) -> HmmParams:
    """Alternative start that separates the states by level only.

    ``gamma_i = gamma_OLS + z_i * spread * eta_OLS`` with ``z`` evenly spaced
    from +1 to -1, while ``alpha`` and ``eta`` start at their OLS values in
    every state.  The transition matrix is the same as in
    :func:`init_params`.  Useful when ``gamma_OLS`` is close to zero, where
    the multiplicative spread gives no separation in the level.
    """
    y = np.asarray(y, dtype=float)
    if y.size < n_init:
        raise DataError(f"initialisation needs {n_init} observations, got {y.size}")
    if N < 1:
        raise DataError("N must be >= 1")
    g, a, s2 = ar1_ols(y[:n_init])
    s = np.sqrt(s2)
    z = np.linspace(1.0, -1.0, N) if N > 1 else np.zeros(1)
    Pi = init_params(y, N, n_init).Pi
    return HmmParams(g + spread * s * z, np.full(N, a), np.full(N, s), Pi)
