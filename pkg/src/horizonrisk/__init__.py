"""
Model-free forecasts of the distribution of long-horizon integrated returns
under time-varying volatility, with VaR and CTE read off the forecast.
"""

from horizonrisk.backtest import BacktestResult, rolling_backtest, rolling_backtest_levels
from horizonrisk.errors import (
    DataError,
    DegeneracyError,
    HorizonRiskError,
    InsufficientDataError,
    ParameterError,
    RangeError,
    StationarityError,
)
from horizonrisk.horizon import (
    EmpiricalDistribution,
    ErrorPools,
    ForecastConfig,
    MagnitudeDecomposition,
    build_error_pools,
    forecast_distribution,
    magnitude_sign_split,
)
from horizonrisk.linpred import (
    AutocovarianceTable,
    InnovationsSolution,
    PredictorWindow,
    h_step_predict,
    innovations_coefficients,
    one_step_predict,
    sample_autocovariance,
)
from horizonrisk.model_sim import (
    GarchParams,
    ReturnSeries,
    SVParams,
    garch_ma_coefficients,
    simulate_garch,
    simulate_sv,
)
from horizonrisk.risk import RiskReport, conditional_tail_expectation, risk_report, value_at_risk
from horizonrisk.serial import (
    SerialDecomposition,
    decompose_integrated,
    forecast_correlated_distribution,
    innovation_residuals,
)
from horizonrisk.signs import SignModel, fit_sign_model, sample_signs

__version__ = "0.1.0"
