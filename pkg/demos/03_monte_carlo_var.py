"""Monte Carlo VaR of the spread strategies under an estimated two-regime model.

Each simulation draws a one-year chain and spread, reruns every strategy
over it and keeps the empirical (lower-tail) daily VaR.  The report holds
the mean VaR per level and a Gaussian kernel density of the simulated
annual returns.
"""
from pathlib import Path

import numpy as np

from hmmstatarb.ou_hmm import HmmParams, run_filter_em
from hmmstatarb.risk_engine import SimulationConfig, run_risk_analysis, simulate_chain, simulate_spread
from hmmstatarb.strategy_engine import SPREAD_KINDS, StrategyConfig

params = HmmParams([0.1632, 0.0869], [0.8077, 0.7313], [1.4312, 1.4832],
                   [[0.7138, 0.3360], [0.2862, 0.6640]])
weights = (0.4322, 1.0, -0.6982, -0.3402)
rng = np.random.default_rng(0)
history = simulate_spread(params, simulate_chain(params.Pi, 2, 299, rng), 0.5, rng)
trace = run_filter_em(history, 2)

cfg = SimulationConfig(n_sim=1000, horizon=250, seed=42, workers=2)
rep = run_risk_analysis(params, weights, (80.0, 78.0, 75.0), [StrategyConfig(k) for k in SPREAD_KINDS],
                        cfg, history, (trace.forecast_mean, trace.forecast_var), trace.probabilities[-1])
print("level " + "".join(f"{k:>10s}" for k in SPREAD_KINDS))
for row in rep.table():
    print(f"{row['level']:.2f}  " + "".join(f"{row[k]:+10.4f}" for k in SPREAD_KINDS))
for k in SPREAD_KINDS:
    r = rep.annual_returns[k]
    print(f"{k:6s} annual return: median {np.median(r):+.3f}, 5th pct {np.quantile(r, 0.05):+.3f}")
out = Path(__file__).resolve().parent / "demo_output" / "risk"
print("written:", [p.name for p in rep.write(out)])
