"""Regime-switching statistical arbitrage on cointegrated futures panels.

Cointegration analysis, filter-based EM estimation of an Ornstein-Uhlenbeck
spread driven by a hidden Markov chain, trading rules with transaction costs,
and Monte Carlo value-at-risk.
"""
from hmmstatarb.exceptions import (
    DataError,
    EstimationError,
    NoCointegrationError,
    StatArbError,
)

__version__ = "0.1.0"

__all__ = [
    "DataError",
    "EstimationError",
    "NoCointegrationError",
    "StatArbError",
    "__version__",
]
