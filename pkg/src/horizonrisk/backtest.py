"""
Rolling-origin VaR backtest.

At each origin ``t0`` the forecaster sees ``r_1..r_t0`` only, forecasts the
distribution of ``r_{t0+1} + ... + r_{t0+T}`` and the realized sum is
compared with the forecast VaR.  With overlapping horizons (``stride < T``)
the hits are dependent and the binomial z-score is only indicative.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from horizonrisk.errors import InsufficientDataError, ParameterError
from horizonrisk.horizon import EmpiricalDistribution, ForecastConfig, forecast_distribution
from horizonrisk.risk import value_at_risk
from horizonrisk.serial import forecast_correlated_distribution, required_length

__all__ = [
    "BacktestResult",
    "MIN_ORIGINS",
    "origin_seed",
    "rolling_backtest",
    "rolling_backtest_levels",
]

MIN_ORIGINS = 10

Forecaster = Callable[[np.ndarray, ForecastConfig], "EmpiricalDistribution | np.ndarray"]

PIPELINES = {
    "whitenoise": forecast_distribution,
    "correlated": forecast_correlated_distribution,
}


@dataclass(frozen=True)
class BacktestResult:
    origins: np.ndarray
    var: np.ndarray
    realized: np.ndarray
    hits: np.ndarray
    expected: float

    @property
    def n_origins(self) -> int:
        return int(self.origins.size)

    @property
    def coverage(self) -> float:
        return float(self.hits.mean())

    @property
    def z_score(self) -> float:
        p, k = self.expected, self.n_origins
        return (self.coverage - p) / float(np.sqrt(p * (1.0 - p) / k))

    @property
    def hit_runs(self) -> list[int]:
        """Lengths of consecutive runs of hits, in origin order."""
        runs, current = [], 0
        for h in self.hits:
            if h:
                current += 1
            elif current:
                runs.append(current)
                current = 0
        if current:
            runs.append(current)
        return runs

    def summary(self) -> dict:
        runs = self.hit_runs
        return {
            "origins": self.n_origins,
            "level": self.expected,
            "hits": int(self.hits.sum()),
            "coverage": self.coverage,
            "z_score": self.z_score,
            "hit_runs": len(runs),
            "longest_hit_run": max(runs, default=0),
        }


def origin_seed(seed: int, origin: int) -> int:
    """Seed for the forecast at ``origin``; depends on nothing else."""
    return int(np.random.SeedSequence(int(seed), spawn_key=(int(origin),)).generate_state(1)[0])


def _minimal_history(cfg: ForecastConfig, mode: str, limit: int) -> int:
    for t0 in range(1, limit + 1):
        n = cfg.window_for(t0)
        try:
            if mode == "correlated":
                if t0 < required_length(n, cfg.horizon, cfg.min_pool_size):
                    continue
                replace(cfg, n=n).resolved(t0 - n)
            else:
                cfg.resolved(t0)
        except (InsufficientDataError, ParameterError):
            continue
        return t0
    raise InsufficientDataError("series is too short for a single forecast")


def rolling_backtest(
    series,
    cfg: ForecastConfig,
    p: float,
    stride: int | None = None,
    mode: str = "whitenoise",
    start: int | None = None,
    forecaster: Forecaster | None = None,
    workers: int = 1,
) -> BacktestResult:
    """
    Replay ``series`` and record VaR(p) exceedances of the T-period sum.

    Parameters
    ----------
    series : ReturnSeries or array_like
    cfg : ForecastConfig
        Forecast settings; the seed of each origin is derived from
        ``cfg.seed`` and the origin.
    p : float
        VaR level in (0, 1).
    stride : int, optional
        Distance between origins, default ``cfg.horizon``.
    mode : {"whitenoise", "correlated"}
        Pipeline used when no ``forecaster`` is given.
    start : int, optional
        First origin (number of observations available); defaults to the
        shortest history the pipeline accepts, but at least 200.
    forecaster : callable, optional
        ``forecaster(history, cfg)`` returning an EmpiricalDistribution or
        samples; replaces the pipeline.
    workers : int
        Threads used across origins; the result does not depend on it.
    """
    return rolling_backtest_levels(series, cfg, [p], stride, mode, start, forecaster, workers)[p]


def rolling_backtest_levels(
    series,
    cfg: ForecastConfig,
    levels,
    stride: int | None = None,
    mode: str = "whitenoise",
    start: int | None = None,
    forecaster: Forecaster | None = None,
    workers: int = 1,
) -> dict[float, BacktestResult]:
    """:func:`rolling_backtest` at several levels, forecasting each origin once."""
    x = np.asarray(getattr(series, "values", series), dtype=float)
    levels = [float(p) for p in levels]
    for p in levels:
        if not 0.0 < p < 1.0:
            raise ParameterError(f"VaR level must lie in (0, 1), got {p}")
    if mode not in PIPELINES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {sorted(PIPELINES)}")
    horizon = cfg.horizon
    stride = horizon if stride is None else int(stride)
    if stride < 1:
        raise ParameterError("stride must be at least 1")
    last = x.size - horizon
    if start is None:
        start = 200 if forecaster is not None else max(200, _minimal_history(cfg, mode, max(last, 1)))
    origins = np.arange(int(start), last + 1, stride)
    if origins.size < MIN_ORIGINS:
        raise InsufficientDataError(
            f"only {origins.size} origins fit in {x.size} observations; need {MIN_ORIGINS}"
        )
    run = forecaster or PIPELINES[mode]

    def one(t0: int) -> list[float]:
        local = replace(cfg, seed=origin_seed(cfg.seed, t0))
        dist = run(x[:t0], local)
        return [value_at_risk(dist, p) for p in levels]

    if workers <= 1:
        var = [one(int(t0)) for t0 in origins]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            var = list(ex.map(one, [int(t0) for t0 in origins]))
    var = np.asarray(var).reshape(origins.size, len(levels))
    realized = np.array([x[t0 : t0 + horizon].sum() for t0 in origins])
    return {
        p: BacktestResult(origins, var[:, i].copy(), realized, realized <= var[:, i], p)
        for i, p in enumerate(levels)
    }
