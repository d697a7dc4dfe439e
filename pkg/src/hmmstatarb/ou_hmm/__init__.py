"""Regime-switching OU spread model: filters, batchwise EM, forecasts, model selection."""
from hmmstatarb.ou_hmm.em import (
    EstimateTrace,
    ModelSelection,
    DEFAULT_SPLITS,
    em_update,
    fit_filter_em,
    forecast,
    n_free_parameters,
    refine_em,
    run_filter_em,
    select_num_states,
)
from hmmstatarb.ou_hmm.filter import (
    LEVEL_SUMS,
    FilterState,
    filter_probabilities,
    filter_pass,
    filter_step,
    log_density_diag,
    observation_density_matrix,
)
from hmmstatarb.ou_hmm.params import (
    DAILY_DELTA,
    WEEKLY_DELTA,
    ContinuousParams,
    HmmParams,
    ar1_ols,
    init_params,
    split_init_params,
    to_continuous,
    to_discrete,
)

__all__ = [
    "DEFAULT_SPLITS",
    "fit_filter_em",
    "split_init_params",
    "DAILY_DELTA",
    "LEVEL_SUMS",
    "WEEKLY_DELTA",
    "ContinuousParams",
    "EstimateTrace",
    "FilterState",
    "HmmParams",
    "ModelSelection",
    "ar1_ols",
    "em_update",
    "filter_probabilities",
    "filter_pass",
    "filter_step",
    "forecast",
    "init_params",
    "log_density_diag",
    "n_free_parameters",
    "refine_em",
    "observation_density_matrix",
    "run_filter_em",
    "select_num_states",
    "to_continuous",
    "to_discrete",
]
