"""Synthetic price panels with a known cointegrating vector and regime-switching spread.

Used by the end-to-end tests and the demo scripts; nothing here is needed
for estimation.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from hmmstatarb.market_data import PricePanel, write_series_csv
from hmmstatarb.ou_hmm.params import HmmParams

# a weight vector of the same shape as the one estimated for the crude-oil triple
DEFAULT_WEIGHTS = (0.4322, 1.0, -0.6982, -0.3402)
DEFAULT_SPREAD = HmmParams(gamma=[0.3, -0.3], alpha=[0.8, 0.8], eta=[0.25, 0.25],
                           Pi=[[0.95, 0.05], [0.05, 0.95]])


def business_days(start: str, end: str) -> np.ndarray:
    d = np.arange(np.datetime64(start, "D"), np.datetime64(end, "D") + 1)
    return d[np.is_busday(d)]


def simulate_hmm_spread(params: HmmParams, n: int, rng: np.random.Generator,
                        burn: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Regime path and spread of length ``n`` after ``burn`` discarded steps."""
    N = params.N
    x = int(rng.integers(N))
    y = 0.0
    states, ys = np.empty(n, dtype=np.int64), np.empty(n)
    for t in range(n + burn):
        y = params.gamma[x] + params.alpha[x] * y + params.eta[x] * rng.standard_normal()
        if t >= burn:
            states[t - burn], ys[t - burn] = x, y
        x = int(rng.choice(N, p=params.Pi[:, x]))
    return states, ys


@dataclass
class SyntheticTriple:
    panel: PricePanel
    spread: np.ndarray
    states: np.ndarray
    weights: np.ndarray
    params: HmmParams
    benchmark: np.ndarray

    def write_csvs(self, directory) -> dict:
        """One ``date,price`` CSV per series plus ``benchmark.csv``; returns name -> path."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        paths = {}
        for i, name in enumerate(self.panel.names):
            p = directory / f"{name}.csv"
            write_series_csv(p, self.panel.dates, {"price": self.panel.values[:, i]})
            paths[name] = p
        p = directory / "benchmark.csv"
        write_series_csv(p, self.panel.dates, {"price": self.benchmark})
        paths["benchmark"] = p
        return paths


def make_cointegrated_triple(seed: int, start: str = "2018-03-26", end: str = "2023-06-30",
                             weights=DEFAULT_WEIGHTS, params: HmmParams = DEFAULT_SPREAD,
                             vol: float = 0.012, names=("SC", "BRENT", "WTI")) -> SyntheticTriple:
    """Two geometric random walks plus a third series closing the relation ``c0 + beta @ F = S``.

    ``weights = (c0, 1, beta_2, beta_3)``; ``S`` follows the regime-switching
    AR(1) ``params``.
    """
    rng = np.random.default_rng(seed)
    dates = business_days(start, end)
    n = dates.size
    w = np.asarray(weights, dtype=float)
    if w.size != 4 or w[1] != 1.0:
        raise ValueError("weights must be (c0, 1, beta_2, beta_3)")
    f2 = 70.0 * np.exp(np.cumsum(vol * rng.standard_normal(n)))
    f3 = 75.0 * np.exp(np.cumsum(vol * rng.standard_normal(n)))
    states, s = simulate_hmm_spread(params, n, rng)
    f1 = s - w[0] - w[2] * f2 - w[3] * f3
    if np.any(f1 <= 0):
        raise ValueError("constructed price went non-positive; use other weights or a smaller vol")
    bench = 2700.0 * np.exp(np.cumsum(0.0004 + 0.011 * rng.standard_normal(n)))
    panel = PricePanel(tuple(names), dates, np.column_stack([f1, f2, f3]))
    return SyntheticTriple(panel, s, states, w, params, bench)
