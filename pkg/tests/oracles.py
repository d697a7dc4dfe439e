"""Independent reference computations used by the test-suite.

Nothing here imports the filtering code: the enumeration oracle works from
the model definition directly.
"""
import itertools
import math

import numpy as np


def gaussian_pdf(x, mean, sd):
    return math.exp(-0.5 * ((x - mean) / sd) ** 2) / (sd * math.sqrt(2 * math.pi))


def enumerate_filter(gamma, alpha, eta, Pi, y, x0=0):
    """Exact posterior expectations by summing over every chain path X_1..X_T.

    The chain starts in state ``x0`` at time 0; y[n] given X_{n-1} and y[n-1]
    is N(gamma + alpha y[n-1], eta^2).  Returns the normalised filtered state
    E[X_T | y], jumps E[J_T] (J[i, j] counts j -> i), origin occupations
    E[O_T], level sums E[T_T(f)] for f in (y_n, y_n^2, y_n y_{n-1}, y_{n-1},
    y_{n-1}^2) and the likelihood p(y_1..y_T | y_0).
    """
    N = len(gamma)
    T = len(y) - 1
    total = 0.0
    x_T = np.zeros(N)
    J = np.zeros((N, N))
    O = np.zeros(N)
    L = np.zeros((5, N))
    for path in itertools.product(range(N), repeat=T):
        states = (x0,) + path
        w = 1.0
        for n in range(1, T + 1):
            prev, cur = states[n - 1], states[n]
            w *= Pi[cur][prev]
            w *= gaussian_pdf(y[n], gamma[prev] + alpha[prev] * y[n - 1], eta[prev])
        if w == 0.0:
            continue
        total += w
        x_T[states[T]] += w
        for n in range(1, T + 1):
            prev, cur = states[n - 1], states[n]
            J[cur, prev] += w
            O[prev] += w
            f = (y[n], y[n] ** 2, y[n] * y[n - 1], y[n - 1], y[n - 1] ** 2)
            for k in range(5):
                L[k, prev] += w * f[k]
    return x_T / total, J / total, O / total, L / total, total


def recursive_ols(y, t):
    """Closed-form AR(1) fit on the pairs (y[n-1], y[n]), n = 1..t; eta^2 = RSS / t."""
    x = np.asarray(y[:t], dtype=float)
    z = np.asarray(y[1:t + 1], dtype=float)
    xm, zm = x.mean(), z.mean()
    alpha = np.sum((x - xm) * (z - zm)) / np.sum((x - xm) ** 2)
    gamma = zm - alpha * xm
    resid = z - gamma - alpha * x
    return gamma, alpha, resid @ resid / t


def simulate_hmm_ar1(gamma, alpha, eta, Pi, n, rng, y0=0.0, x0=0):
    """Draw (states, y) of length n from the regime-switching AR(1)."""
    gamma, alpha, eta, Pi = map(np.asarray, (gamma, alpha, eta, Pi))
    N = gamma.size
    states = np.empty(n, dtype=int)
    y = np.empty(n)
    states[0], y[0] = x0, y0
    for t in range(1, n):
        s = states[t - 1]
        y[t] = gamma[s] + alpha[s] * y[t - 1] + eta[s] * rng.standard_normal()
        states[t] = rng.choice(N, p=Pi[:, s])
    return states, y


def ar1_increment_variances(alpha, eta, horizon):
    """Var of y_t - y_{t-1}, t = 1..horizon, for an AR(1) started at its stationary mean.

    y_{t-1} - mu ~ N(0, eta^2 (1 - alpha^(2(t-1))) / (1 - alpha^2)), and
    y_t - y_{t-1} = (alpha - 1)(y_{t-1} - mu) + eta z_t.
    """
    t = np.arange(1, horizon + 1)
    level = eta**2 * (1 - alpha ** (2 * (t - 1))) / (1 - alpha**2)
    return (1 - alpha) ** 2 * level + eta**2


def mixture_quantile(p, variances):
    """q with mean_t Phi(q / sd_t) = p for zero-mean Gaussians of the given variances."""
    from scipy.optimize import brentq
    from scipy.stats import norm

    sd = np.sqrt(np.asarray(variances, dtype=float))
    f = lambda q: float(np.mean(norm.cdf(q / sd))) - p
    return brentq(f, -20 * sd.max(), 20 * sd.max(), xtol=1e-14)
