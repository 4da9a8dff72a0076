"""
Forecast distribution of the T-period integrated return of a serially
uncorrelated return series with time-varying volatility.

Centered returns are split into magnitudes and signs.  Future magnitudes
are predicted linearly from the last ``n`` magnitudes, each horizon's
prediction error is resampled from the errors the same predictor made in
the past, and signs are drawn independently.  Each bootstrap draw is::

    R = T * mu_hat + sum_{h=1}^{T} (mhat_h + W_h) * sign_h
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from horizonrisk._sampling import bootstrap_sums
from horizonrisk.errors import InsufficientDataError, ParameterError
from horizonrisk.linpred import (
    InnovationsSolution,
    default_window,
    innovations_coefficients,
    predict_windows,
    sample_autocovariance,
)
from horizonrisk.model_sim import ReturnSeries
from horizonrisk.signs import SignModel, fit_sign_model

__all__ = [
    "EmpiricalDistribution",
    "ErrorPools",
    "ForecastConfig",
    "MagnitudeDecomposition",
    "MagnitudeForecast",
    "build_error_pools",
    "fit_magnitude_predictor",
    "forecast_distribution",
    "magnitude_forecast",
    "magnitude_sign_split",
]

MIN_POOL_SIZE = 20


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted bootstrap samples of a forecast distribution."""

    samples: np.ndarray
    info: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        s = np.sort(np.asarray(self.samples, dtype=float).ravel())
        if s.size < 1:
            raise ParameterError("an empirical distribution needs at least one sample")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def draws(self) -> int:
        return int(self.samples.size)

    def __len__(self) -> int:
        return self.draws

    def tail_count(self, p: float) -> int:
        """Number of order statistics in the lower ``p`` tail, ``ceil(p * B)``."""
        if not 0.0 < p < 1.0:
            raise ParameterError(f"tail probability must lie in (0, 1), got {p}")
        # guard against p * B landing a hair above an integer
        k = math.ceil(p * self.draws * (1.0 - 1e-12))
        return min(max(k, 1), self.draws)

    def quantile(self, p: float) -> float:
        """Lower empirical quantile: the ``ceil(p * B)``-th smallest sample."""
        return float(self.samples[self.tail_count(p) - 1])

    def tail_mean(self, p: float) -> float:
        """Mean of the ``ceil(p * B)`` smallest samples."""
        return float(self.samples[: self.tail_count(p)].mean())

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.samples, x, side="right") / self.draws


@dataclass(frozen=True)
class MagnitudeDecomposition:
    """``r_t = mu_hat + m_t * delta_t`` with ``m_t >= 0`` and ``delta_t = +-1``."""

    mu_hat: float
    m: np.ndarray
    delta: np.ndarray

    @property
    def mu_m(self) -> float:
        return float(self.m.mean())

    def __len__(self) -> int:
        return int(self.m.size)


def magnitude_sign_split(series, mu_hat: float | None = None) -> MagnitudeDecomposition:
    """
    Split returns into magnitudes ``|r_t - mu_hat|`` and signs.

    A return equal to ``mu_hat`` gets sign ``+1``.  ``mu_hat`` defaults to
    the sample mean.
    """
    r = np.asarray(getattr(series, "values", series), dtype=float)
    if r.size < 1:
        raise ParameterError("cannot split an empty series")
    if mu_hat is None:
        mu_hat = float(r.mean())
    dev = r - mu_hat
    m = np.abs(dev)
    delta = np.where(dev >= 0.0, 1.0, -1.0)
    return MagnitudeDecomposition(float(mu_hat), m, delta)


@dataclass(frozen=True)
class ErrorPools:
    """Observed ``h``-step prediction errors of the magnitude predictor, ``h = 1..T``."""

    pools: tuple[np.ndarray, ...]
    n: int

    @property
    def horizon(self) -> int:
        return len(self.pools)

    @property
    def sizes(self) -> list[int]:
        return [int(p.size) for p in self.pools]

    def __getitem__(self, h: int) -> np.ndarray:
        """Pool for horizon ``h`` (1-based)."""
        if not 1 <= h <= self.horizon:
            raise IndexError(f"horizon {h} outside 1..{self.horizon}")
        return self.pools[h - 1]


def fit_magnitude_predictor(values, n: int, horizon: int) -> InnovationsSolution:
    """
    Innovations solution with rows up to ``n + horizon - 1`` for a series.

    A constant series has nothing to predict beyond its mean: all
    coefficients are zero (and so are the MSEs).
    """
    size = n + horizon - 1
    acov = sample_autocovariance(values, size)
    if acov.gamma[0] == 0.0:
        return InnovationsSolution(np.zeros((size + 1, size + 1)), np.zeros(size + 1))
    return innovations_coefficients(acov, size)


def _all_window_predictions(
    m: np.ndarray, sol: InnovationsSolution, n: int, horizon: int, clip_nonneg: bool
) -> np.ndarray:
    # row k predicts from the window ending at t = n + k (1-based), k = 0..N-n
    mu_m = float(m.mean())
    windows = sliding_window_view(m - mu_m, n)
    return predict_windows(sol, windows, horizon, mean=mu_m, clip_nonneg=clip_nonneg)


def _pools_from_predictions(m: np.ndarray, preds: np.ndarray, n: int, horizon: int) -> ErrorPools:
    n_obs = m.size
    pools = []
    for h in range(1, horizon + 1):
        # origins t = n..N-h; the target m_{t+h} sits at 0-based index t+h-1
        k = n_obs - h - n + 1
        targets = m[n - 1 + h : n - 1 + h + k]
        pool = targets - preds[:k, h - 1]
        pool.setflags(write=False)
        pools.append(pool)
    return ErrorPools(tuple(pools), n)


def _check_lengths(n_obs: int, n: int, horizon: int, min_pool_size: int) -> None:
    if n < 1 or horizon < 1:
        raise ParameterError("window size and horizon must be positive")
    if n_obs < n + horizon:
        raise InsufficientDataError(
            f"{n_obs} observations cannot support window {n} and horizon {horizon}"
        )
    smallest = n_obs - horizon - n + 1
    if smallest < min_pool_size:
        raise InsufficientDataError(
            f"horizon-{horizon} error pool would hold {smallest} errors; "
            f"at least {min_pool_size} are required"
        )


def build_error_pools(
    decomp: MagnitudeDecomposition,
    sol: InnovationsSolution,
    n: int,
    horizon: int,
    clip_nonneg: bool = True,
    min_pool_size: int = MIN_POOL_SIZE,
) -> ErrorPools:
    """
    Collect ``Delta_h(t, n) = m_{t+h} - mhat_{n,t,h}`` for ``t = n..N-h``.

    ``mhat`` is the h-step innovations predictor from the window
    ``m_{t-n+1..t}``, with the sample mean of ``m`` added back and (by
    default) clipped at zero.  Pool ``h`` holds ``N - h - n + 1`` errors.

    Raises
    ------
    InsufficientDataError
        If ``N < n + horizon`` or the smallest pool is below ``min_pool_size``.
    """
    m = decomp.m
    _check_lengths(m.size, n, horizon, min_pool_size)
    preds = _all_window_predictions(m, sol, n, horizon, clip_nonneg)
    return _pools_from_predictions(m, preds, n, horizon)


@dataclass(frozen=True)
class MagnitudeForecast:
    """Point forecasts of the next ``T`` magnitudes and their error pools."""

    centers: np.ndarray
    pools: ErrorPools
    solution: InnovationsSolution
    mu_m: float


def magnitude_forecast(
    m,
    n: int,
    horizon: int,
    clip_nonneg: bool = True,
    min_pool_size: int = MIN_POOL_SIZE,
) -> MagnitudeForecast:
    """Fit the magnitude predictor on ``m``, forecast from its last window, build pools."""
    m = np.asarray(m, dtype=float)
    _check_lengths(m.size, n, horizon, min_pool_size)
    sol = fit_magnitude_predictor(m, n, horizon)
    preds = _all_window_predictions(m, sol, n, horizon, clip_nonneg)
    pools = _pools_from_predictions(m, preds, n, horizon)
    centers = preds[-1].copy()
    centers.setflags(write=False)
    return MagnitudeForecast(centers, pools, sol, float(m.mean()))


@dataclass(frozen=True)
class ForecastConfig:
    """
    Settings shared by the forecasting pipelines.

    ``n=None`` picks ``min(N // 4, 50)`` for the series at hand.
    ``sign_model`` is ``"symmetric"``, ``"asymmetric"`` (fit a binned sign
    law with width ``sign_lambda``, default a tenth of the standard
    deviation) or a fitted :class:`SignModel`.  ``pool_sampling`` is
    ``"joint"`` (resample whole error vectors of one past origin) or
    ``"independent"`` (resample each horizon's error on its own).
    """

    horizon: int
    n: int | None = None
    draws: int = 10000
    seed: int = 0
    clip_nonneg: bool = True
    sign_model: str | SignModel = "symmetric"
    sign_lambda: float | None = None
    min_pool_size: int = MIN_POOL_SIZE
    pool_sampling: str = "joint"

    def __post_init__(self) -> None:
        if int(self.horizon) != self.horizon or self.horizon < 1:
            raise ParameterError(f"horizon must be a positive integer, got {self.horizon}")
        if self.n is not None and (int(self.n) != self.n or self.n < 1):
            raise ParameterError(f"window size must be a positive integer, got {self.n}")
        if int(self.draws) != self.draws or self.draws < 1:
            raise ParameterError(f"draws must be a positive integer, got {self.draws}")
        if isinstance(self.sign_model, str) and self.sign_model not in ("symmetric", "asymmetric"):
            raise ParameterError(f"unknown sign model {self.sign_model!r}")
        if self.sign_lambda is not None and not self.sign_lambda > 0.0:
            raise ParameterError("sign_lambda must be positive")
        if self.pool_sampling not in ("joint", "independent"):
            raise ParameterError(f"unknown pool sampling {self.pool_sampling!r}")

    def window_for(self, length: int) -> int:
        return default_window(length) if self.n is None else int(self.n)

    def resolved(self, length: int) -> ForecastConfig:
        """Copy with ``n`` filled in and checked against a series of ``length``."""
        n = self.window_for(length)
        _check_lengths(length, n, self.horizon, self.min_pool_size)
        return replace(self, n=n)

    def sign_law(self, centered: np.ndarray) -> SignModel | None:
        if isinstance(self.sign_model, SignModel):
            return self.sign_model
        if self.sign_model == "asymmetric":
            return fit_sign_model(centered, self.sign_lambda)
        return None


def forecast_distribution(series, cfg: ForecastConfig, workers: int = 1) -> EmpiricalDistribution:
    """
    Bootstrap forecast of ``R_{N,T} = r_{N+1} + ... + r_{N+T}``.

    Parameters
    ----------
    series : ReturnSeries or array_like
        Observed returns ``r_1..r_N``.
    cfg : ForecastConfig
        Horizon, window, draw count, seed and sign law.
    workers : int
        Threads used for the draws; the result does not depend on it.

    Returns
    -------
    EmpiricalDistribution
        ``cfg.draws`` sorted samples; ``info`` records ``mu_hat``, ``n``,
        ``horizon``, ``draws``, ``seed`` and the magnitude forecasts.
    """
    r = np.asarray(getattr(series, "values", series), dtype=float)
    if not isinstance(series, ReturnSeries):
        ReturnSeries(r)
    cfg = cfg.resolved(r.size)
    decomp = magnitude_sign_split(r)
    fc = magnitude_forecast(decomp.m, cfg.n, cfg.horizon, cfg.clip_nonneg, cfg.min_pool_size)
    law = cfg.sign_law(r - decomp.mu_hat)
    sums = bootstrap_sums(
        fc.centers,
        list(fc.pools.pools),
        cfg.draws,
        cfg.seed,
        sign_model=law,
        workers=workers,
        joint=cfg.pool_sampling == "joint",
    )
    location = cfg.horizon * decomp.mu_hat
    info = {
        "mode": "whitenoise",
        "mu_hat": decomp.mu_hat,
        "location": location,
        "n": cfg.n,
        "horizon": cfg.horizon,
        "draws": cfg.draws,
        "seed": cfg.seed,
        "pool_sampling": cfg.pool_sampling,
        "magnitude_forecasts": fc.centers.tolist(),
    }
    return EmpiricalDistribution(location + sums, info)
