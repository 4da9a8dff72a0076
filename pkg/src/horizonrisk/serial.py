"""
Forecast distribution of the integrated return of a serially correlated
series ``x_t`` whose innovations follow a time-varying volatility model.

The centered future sum splits exactly into a part predictable from the
last ``n`` observations and a weighted sum of future one-step innovations::

    S - T*mu = T_term + sum_{k=1}^{T} w_k * U_{n+k}

where ``U`` are innovations of the block ``x*_{N-n+1..N+T}`` and
``w_k = sum_{l=0}^{T-k} theta[n+k+l-1, l]`` (``theta[., 0] = 1``).  The
future innovations are bootstrapped like returns in
:mod:`horizonrisk.horizon`, using magnitudes and signs of the in-sample
one-step residuals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from horizonrisk._sampling import bootstrap_sums
from horizonrisk.errors import InsufficientDataError, ParameterError
from horizonrisk.horizon import (
    EmpiricalDistribution,
    ErrorPools,
    ForecastConfig,
    magnitude_forecast,
)
from horizonrisk.linpred import (
    InnovationsSolution,
    innovations_coefficients,
    sample_autocovariance,
    window_innovations,
)
from horizonrisk.model_sim import ReturnSeries

__all__ = [
    "ResidualMagnitudePools",
    "SerialDecomposition",
    "decompose_integrated",
    "fit_series_predictor",
    "forecast_correlated_distribution",
    "innovation_residuals",
]


def _values(series) -> np.ndarray:
    return np.asarray(getattr(series, "values", series), dtype=float)


def fit_series_predictor(x_star: np.ndarray, n_max: int) -> InnovationsSolution:
    return innovations_coefficients(sample_autocovariance(x_star, n_max), n_max)


def innovation_residuals(
    series, n: int, sol: InnovationsSolution | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """
    One-step residuals ``z_t = x*_t - xhat*_{t-1}`` of the centered series.

    For ``t > n`` the predictor uses the window ``x*_{t-n..t-1}``; for
    ``t <= n`` it uses all earlier points.  Returns ``(z, fitted)``, both of
    length ``N``, with ``fitted[0] = 0``.
    """
    x = _values(series)
    n_obs = x.size
    if n < 1 or n_obs <= n:
        raise InsufficientDataError(f"need more than n={n} observations, got {n_obs}")
    x_star = x - x.mean()
    if sol is None:
        sol = fit_series_predictor(x_star, n)
    # growing window from the start covers t = 1..n+1
    head = window_innovations(sol, x_star[: n + 1])
    windows = sliding_window_view(x_star[:-1], n)[1:]
    u = window_innovations(sol, windows)
    tail_fit = u @ sol.theta[n, n:0:-1]
    fitted = np.concatenate([x_star[: n + 1] - head, tail_fit])
    return x_star - fitted, fitted


@dataclass(frozen=True)
class SerialDecomposition:
    """
    Linear forecast and future-innovation weights at one origin.

    ``window_innovations`` are the innovations of the last ``n`` observed
    values; ``future_innovations`` are the realized ``U_{n+1..n+T}`` when
    the origin lies inside the sample, else ``None``.
    """

    t_term: float
    group_weights: np.ndarray
    window_innovations: np.ndarray
    future_innovations: np.ndarray | None = None

    @property
    def horizon(self) -> int:
        return int(self.group_weights.size)

    def innovation_term(self, innovations=None) -> float:
        """``sum_k w_k U_{n+k}`` for given (or the realized) future innovations."""
        u = self.future_innovations if innovations is None else np.asarray(innovations)
        if u is None:
            raise ParameterError("no future innovations: origin is at the end of the sample")
        return float(self.group_weights @ u)


def decompose_integrated(
    x_star,
    n: int,
    horizon: int,
    sol: InnovationsSolution,
    origin: int | None = None,
) -> SerialDecomposition:
    """
    Split the centered sum ``x*_{o+1} + ... + x*_{o+T}`` at origin ``o``.

    ``x_star`` is the centered series and ``origin`` (default: its length)
    counts the observations known at forecast time.  ``sol`` must have rows
    up to ``n + horizon - 1``.  With an in-sample origin the realized future
    innovations are attached, and ``t_term + innovation_term()`` equals the
    realized centered sum.
    """
    x = _values(x_star)
    origin = x.size if origin is None else int(origin)
    if n < 1 or horizon < 1:
        raise ParameterError("window size and horizon must be positive")
    if origin < n or origin > x.size:
        raise InsufficientDataError(f"origin {origin} needs at least n={n} prior observations")
    if sol.n_max < n + horizon - 1:
        raise InsufficientDataError(
            f"innovations solution has n_max={sol.n_max}, needs {n + horizon - 1}"
        )
    theta = sol.theta
    window = x[origin - n : origin]
    u_obs = window_innovations(sol, window)

    # observed innovation U_{n+1-j} (j = 1..n) collects sum_h theta[n+h-1, j+h-1]
    t_coef = np.zeros(n)
    for h in range(1, horizon + 1):
        t_coef += theta[n + h - 1, h : n + h]
    t_term = float(t_coef[::-1] @ u_obs)

    weights = np.ones(horizon)
    for k in range(1, horizon + 1):
        for lag in range(1, horizon - k + 1):
            weights[k - 1] += theta[n + k + lag - 1, lag]
    weights.setflags(write=False)

    future = None
    if origin + horizon <= x.size:
        block = x[origin - n : origin + horizon]
        future = window_innovations(sol, block)[n:]
        future.setflags(write=False)
    return SerialDecomposition(t_term, weights, u_obs, future)


@dataclass(frozen=True)
class ResidualMagnitudePools:
    """Magnitudes and signs of the residuals with their prediction-error pools."""

    m_tilde: np.ndarray
    signs: np.ndarray
    centers: np.ndarray
    pools: ErrorPools


def _residual_pools(z: np.ndarray, cfg: ForecastConfig) -> ResidualMagnitudePools:
    m_tilde = np.abs(z)
    signs = np.where(z >= 0.0, 1.0, -1.0)
    fc = magnitude_forecast(m_tilde, cfg.n, cfg.horizon, cfg.clip_nonneg, cfg.min_pool_size)
    return ResidualMagnitudePools(m_tilde, signs, fc.centers, fc.pools)


def required_length(n: int, horizon: int, min_pool_size: int) -> int:
    """Shortest series the correlated pipeline accepts for the given settings."""
    return 2 * n + horizon + min_pool_size - 1


def forecast_correlated_distribution(
    series, cfg: ForecastConfig, workers: int = 1
) -> EmpiricalDistribution:
    """
    Bootstrap forecast of ``S_{N,T} = x_{N+1} + ... + x_{N+T}``.

    Each draw is ``T*mu_hat + T_term + sum_k w_k (mtilde_k + W_k) * sign_k``
    with ``W_k`` resampled from the residual-magnitude error pools.  The
    residuals ``z_t`` for ``t = n+1..N`` feed the magnitude model, so the
    series needs at least ``2n + T + min_pool_size - 1`` points.
    """
    x = _values(series)
    if not isinstance(series, ReturnSeries):
        ReturnSeries(x)
    n = cfg.window_for(x.size)
    if x.size < required_length(n, cfg.horizon, cfg.min_pool_size):
        raise InsufficientDataError(
            f"{x.size} observations are too few for window {n}, horizon {cfg.horizon} "
            f"and pool size {cfg.min_pool_size}"
        )
    cfg = replace(cfg, n=n).resolved(x.size - n)
    mu_hat = float(x.mean())
    x_star = x - mu_hat
    sol = fit_series_predictor(x_star, n + cfg.horizon - 1)
    decomp = decompose_integrated(x_star, n, cfg.horizon, sol)
    z, _ = innovation_residuals(x, n, sol)
    resid = _residual_pools(z[n:], cfg)
    law = cfg.sign_law(z[n:])
    sums = bootstrap_sums(
        resid.centers,
        list(resid.pools.pools),
        cfg.draws,
        cfg.seed,
        weights=np.asarray(decomp.group_weights),
        sign_model=law,
        workers=workers,
        joint=cfg.pool_sampling == "joint",
    )
    location = cfg.horizon * mu_hat + decomp.t_term
    info = {
        "mode": "correlated",
        "mu_hat": mu_hat,
        "linear_forecast": decomp.t_term,
        "location": location,
        "n": n,
        "horizon": cfg.horizon,
        "draws": cfg.draws,
        "seed": cfg.seed,
        "pool_sampling": cfg.pool_sampling,
        "group_weights": decomp.group_weights.tolist(),
        "magnitude_forecasts": resid.centers.tolist(),
    }
    return EmpiricalDistribution(location + sums, info)
