from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from hmmstatarb.exceptions import DataError


@dataclass(frozen=True)
class SpreadSeries:
    """``values[t] = weights[0] + weights[1:] @ F_t`` on ``dates``."""

    dates: np.ndarray
    values: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.values.size


def build_spread(panel, result=None, *, beta=None, c0=None) -> SpreadSeries:
    """Evaluate the cointegrating combination on every row of ``panel``.

    Weights come from ``result`` (a :class:`CointegrationResult`) or from the
    explicit ``beta`` / ``c0`` keywords.
    """
    if result is not None:
        beta, c0 = result.beta, result.c0
    if beta is None or c0 is None:
        raise DataError("build_spread needs a cointegration result or beta and c0")
    beta = np.asarray(beta, dtype=float)
    vals = np.asarray(panel.values, dtype=float)
    if vals.shape[1] != beta.size:
        raise DataError(f"panel has {vals.shape[1]} series but beta has {beta.size} entries")
    values = float(c0) + vals @ beta
    return SpreadSeries(np.asarray(panel.dates), values, np.r_[float(c0), beta])
