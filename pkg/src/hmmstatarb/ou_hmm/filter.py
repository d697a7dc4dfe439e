"""Reference-probability filters for the chain and its additive functionals.

Under the reference measure the observations are i.i.d. N(0, 1) and the
chain is unaffected, so every filtered quantity is a linear recursion in
unnormalised N-vectors ``E~[Lambda_t H_t X_t | y_0..y_t]``:

* ``q``              the chain itself
* ``J[i, j]``        jumps from state ``j`` to state ``i``
* ``O[j]``           occupation of ``j`` at the start of each transition
* ``T[f, j]``        ``sum_n 1{X_{n-1} = e_j} f_n`` for the five ``f`` in :data:`LEVEL_SUMS`

Normalised estimates are ``<1, H-vector> / <1, q>``.  Every quantity is
divided by a common factor each step (a no-op for the ratios) and the log
of that factor is accumulated, which gives the log-likelihood.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hmmstatarb.exceptions import EstimationError
from hmmstatarb.ou_hmm.params import HmmParams

# f_n for the level sums, in storage order
LEVEL_SUMS = ("y", "y2", "yy", "ylag", "y2lag")
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def _f_values(y_prev: float, y_now: float) -> np.ndarray:
    return np.array([y_now, y_now * y_now, y_now * y_prev, y_prev, y_prev * y_prev])


def log_density_diag(params: HmmParams, y_prev: float, y_now: float) -> np.ndarray:
    """``log d_ii``: log-density ratio of ``y_now`` under state ``i`` against N(0, 1)."""
    resid = (y_now - params.alpha * y_prev - params.gamma) / params.eta
    return -np.log(params.eta) - 0.5 * (resid * resid - y_now * y_now)


def observation_density_matrix(params: HmmParams, y_prev: float, y_now: float) -> np.ndarray:
    """Diagonal matrix ``D`` with ``d_ii = eta_i^-1 exp(-((y_now - alpha_i y_prev - gamma_i)^2 / eta_i^2 - y_now^2) / 2)``."""
    return np.diag(np.exp(log_density_diag(params, y_prev, y_now)))


@dataclass
class FilterState:
    q: np.ndarray          # (N,)
    J: np.ndarray          # (N, N, N): J[i, j] is the vector for jumps j -> i
    O: np.ndarray          # (N, N):    O[j] is the vector for occupation of j
    T: np.ndarray          # (5, N, N): T[f, j] is the vector for level sum f of state j
    log_scale: float
    t: int
    last_y: float

    @classmethod
    def initial(cls, N: int, y0: float, x0=None) -> "FilterState":
        """Start at ``X_0 = x0`` (default ``e_1``) with all counters at zero."""
        q = np.zeros(N)
        if x0 is None:
            q[0] = 1.0
        else:
            q[:] = np.asarray(x0, dtype=float)
        return cls(q=q, J=np.zeros((N, N, N)), O=np.zeros((N, N)),
                   T=np.zeros((len(LEVEL_SUMS), N, N)), log_scale=0.0, t=0, last_y=float(y0))

    @property
    def N(self) -> int:
        return self.q.size

    def copy(self) -> "FilterState":
        return FilterState(self.q.copy(), self.J.copy(), self.O.copy(), self.T.copy(),
                           self.log_scale, self.t, self.last_y)

    def scaled(self, c: float) -> "FilterState":
        """Same state with every unnormalised quantity multiplied by ``c``."""
        return FilterState(self.q * c, self.J * c, self.O * c, self.T * c,
                           self.log_scale - math.log(c), self.t, self.last_y)

    @property
    def total(self) -> float:
        return float(self.q.sum())

    def probabilities(self) -> np.ndarray:
        return self.q / self.q.sum()

    def jumps(self) -> np.ndarray:
        """``Jhat[i, j]``: expected number of jumps ``j -> i`` so far."""
        return self.J.sum(axis=2) / self.q.sum()

    def occupations(self) -> np.ndarray:
        return self.O.sum(axis=1) / self.q.sum()

    def level_sums(self) -> dict:
        s = self.T.sum(axis=2) / self.q.sum()
        return {name: s[i] for i, name in enumerate(LEVEL_SUMS)}

    def log_normaliser(self) -> float:
        """``log`` of the likelihood ratio of ``y_1..y_t`` against i.i.d. N(0, 1)."""
        return self.log_scale + math.log(self.q.sum())


def filter_step(state: FilterState, params: HmmParams, y_now: float,
                rescale: bool = True) -> FilterState:
    """Advance every filter by one observation.

    Only the largest ``d_ii`` is factored out when ``rescale`` is false, so
    the stored quantities stay unnormalised up to a known constant.
    """
    if params.N != state.N:
        raise ValueError(f"state has N={state.N} but params have N={params.N}")
    y_prev = state.last_y
    logd = log_density_diag(params, y_prev, y_now)
    shift = float(np.max(logd))
    d = np.exp(logd - shift)
    Pi = params.Pi
    B = Pi * d[None, :]  # Pi @ diag(d)
    qd = state.q * d
    q_new = Pi @ qd
    total = q_new.sum()
    if not total > 0 or not math.isfinite(total):
        raise EstimationError(
            f"filter underflow at t={state.t + 1}: log-densities {logd.tolist()}, q={state.q.tolist()}"
        )
    N = state.N
    J_new = state.J @ B.T
    idx = np.arange(N)
    # jumps j -> i add q_j d_j Pi[i, j] to component i
    J_new[idx[:, None], idx[None, :], idx[:, None]] += Pi * qd[None, :]
    inc = qd[:, None] * Pi.T  # row j: q_j d_j Pi[:, j]
    O_new = state.O @ B.T + inc
    f = _f_values(y_prev, y_now)
    T_new = state.T @ B.T + f[:, None, None] * inc[None, :, :]
    log_scale = state.log_scale + shift
    if rescale:
        c = 1.0 / total
        q_new *= c
        J_new *= c
        O_new *= c
        T_new *= c
        log_scale -= math.log(c)
    return FilterState(q_new, J_new, O_new, T_new, log_scale, state.t + 1, float(y_now))


def gaussian_base_loglik(y) -> float:
    """Log-density of ``y`` under i.i.d. N(0, 1); add to :meth:`FilterState.log_normaliser`."""
    y = np.asarray(y, dtype=float)
    return float(-y.size * _HALF_LOG_2PI - 0.5 * y @ y)


def filter_probabilities(params: HmmParams, y, x0=None) -> np.ndarray:
    """Normalised chain filter only, parameters held fixed; row ``t`` is ``Xhat_t``.

    ``y`` may be 1-d (one path) or 2-d ``(n_paths, n)``; paths are filtered
    independently.
    """
    y = np.asarray(y, dtype=float)
    single = y.ndim == 1
    y2 = np.atleast_2d(y)
    b, n = y2.shape
    N = params.N
    out = np.empty((b, n, N))
    q = np.zeros((b, N))
    if x0 is None:
        q[:, 0] = 1.0
    else:
        q[:] = np.asarray(x0, dtype=float)
    out[:, 0] = q
    PiT = params.Pi.T
    for t in range(1, n):
        resid = (y2[:, t, None] - params.alpha * y2[:, t - 1, None] - params.gamma) / params.eta
        logd = -np.log(params.eta) - 0.5 * resid * resid
        logd -= logd.max(axis=1, keepdims=True)
        q = (q * np.exp(logd)) @ PiT
        q /= q.sum(axis=1, keepdims=True)
        out[:, t] = q
    return out[0] if single else out


def filter_pass(params: HmmParams, y, x0=None) -> FilterState:
    """All filters over ``y_1..y_n`` with the parameters held fixed.

    Same result as repeated :func:`filter_step` (rescaling every step) but
    with every filtered vector stacked into one matrix, so a step costs one
    matrix product.  Used by the offline refinement in the EM module.
    """
    y = np.asarray(y, dtype=float)
    N = params.N
    state = FilterState.initial(N, y[0], x0)
    nJ, nT = N * N, len(LEVEL_SUMS) * N
    Z = np.zeros((nJ + N + nT, N))  # rows: J[i, j], O[j], T[f, j]
    q = state.q.copy()
    Pi = params.Pi
    iJ = np.repeat(np.arange(N), N) * N + np.tile(np.arange(N), N)  # row of J[i, j]
    iJc = np.repeat(np.arange(N), N)                                 # component i
    jJ = np.tile(np.arange(N), N)                                    # origin j
    resid = (y[1:, None] - params.alpha * y[:-1, None] - params.gamma) / params.eta
    logd = -np.log(params.eta) - 0.5 * (resid * resid - y[1:, None] ** 2)
    shift = logd.max(axis=1)
    D = np.exp(logd - shift[:, None])
    log_scale = 0.0
    for t in range(y.size - 1):
        d = D[t]
        qd = q * d
        inc = qd[:, None] * Pi.T
        Z = Z @ (Pi * d[None, :]).T
        Z[iJ, iJc] += Pi[iJc, jJ] * qd[jJ]
        Z[nJ:nJ + N] += inc
        f = _f_values(y[t], y[t + 1])
        Z[nJ + N:] += (f[:, None, None] * inc[None, :, :]).reshape(nT, N)
        q = Pi @ qd
        total = q.sum()
        if not total > 0 or not math.isfinite(total):
            raise EstimationError(f"filter underflow at t={t + 1}: log-densities {logd[t].tolist()}")
        q /= total
        Z /= total
        log_scale += shift[t] + math.log(total)
    return FilterState(q, Z[:nJ].reshape(N, N, N), Z[nJ:nJ + N].copy(),
                       Z[nJ + N:].reshape(len(LEVEL_SUMS), N, N), log_scale, y.size - 1, float(y[-1]))
