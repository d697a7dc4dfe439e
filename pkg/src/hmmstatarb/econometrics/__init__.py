"""Unit roots, VAR lag selection, Johansen cointegration and spread construction."""
from hmmstatarb.econometrics.johansen import (
    CointegrationResult,
    critical_value,
    fit_vecm,
    johansen_trace,
    moment_matrices,
    trace_pvalue,
    trace_test_from_moments,
)
from hmmstatarb.econometrics.spread import SpreadSeries, build_spread
from hmmstatarb.econometrics.unitroot import UnitRootReport, adf_test, kpss_test
from hmmstatarb.econometrics.var import VarModel, fit_var, select_var_lag

__all__ = [
    "CointegrationResult",
    "SpreadSeries",
    "UnitRootReport",
    "VarModel",
    "adf_test",
    "build_spread",
    "critical_value",
    "fit_var",
    "fit_vecm",
    "johansen_trace",
    "kpss_test",
    "moment_matrices",
    "select_var_lag",
    "trace_pvalue",
    "trace_test_from_moments",
]
