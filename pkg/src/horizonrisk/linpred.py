"""
Best linear prediction of a stationary series from a finite window via the
innovations algorithm.

The one-step predictor of the value after a window of ``n`` centered
observations is written in terms of the window's own innovations
``U_k = x_k - xhat_k``, where ``xhat_k`` is the predictor of the ``k``-th
window value from the ``k - 1`` values before it (``xhat_1 = 0``)::

    xhat_{n+1}   = sum_{j=1}^{n}     theta[n, j]       * U_{n+1-j}
    xhat_{n+h}   = sum_{j=h}^{n+h-1} theta[n+h-1, j]   * U_{n+h-j}

Only lags that reference observed data enter the h-step sum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from horizonrisk.errors import DegeneracyError, ParameterError, RangeError

__all__ = [
    "AutocovarianceTable",
    "InnovationsSolution",
    "PredictorWindow",
    "default_window",
    "h_step_predict",
    "innovations_coefficients",
    "one_step_predict",
    "predict_windows",
    "sample_autocovariance",
    "window_innovations",
]

DEGENERACY_TOL = 1e-12


def default_window(length: int) -> int:
    """Default predictor window ``min(length // 4, 50)`` (at least 1)."""
    return max(1, min(int(length) // 4, 50))


@dataclass(frozen=True)
class AutocovarianceTable:
    """Autocovariances ``gamma[0..L]`` of a stationary series."""

    gamma: np.ndarray

    def __post_init__(self) -> None:
        gamma = np.array(self.gamma, dtype=float)
        if gamma.ndim != 1 or gamma.size < 1:
            raise ParameterError("autocovariance table needs at least gamma(0)")
        gamma.setflags(write=False)
        object.__setattr__(self, "gamma", gamma)

    @property
    def max_lag(self) -> int:
        return self.gamma.size - 1

    def __getitem__(self, lag: int) -> float:
        return float(self.gamma[abs(lag)])


def sample_autocovariance(series, max_lag: int) -> AutocovarianceTable:
    """
    Biased sample autocovariances up to ``max_lag``.

    ``gamma(h) = (1/N) sum_{t=1}^{N-h} (x_t - xbar)(x_{t+h} - xbar)``; the
    divisor ``N`` keeps the table positive semidefinite.
    """
    x = np.asarray(getattr(series, "values", series), dtype=float)
    n_obs = x.size
    if max_lag < 0 or max_lag >= n_obs:
        raise RangeError(f"max_lag={max_lag} must lie in [0, {n_obs - 1}] for {n_obs} observations")
    xc = x - x.mean()
    gamma = np.array([xc[: n_obs - h] @ xc[h:] for h in range(max_lag + 1)]) / n_obs
    return AutocovarianceTable(gamma)


@dataclass(frozen=True)
class InnovationsSolution:
    """
    Innovations-algorithm coefficients.

    ``theta[k, j]`` holds the coefficient for ``1 <= j <= k <= n_max``
    (other entries are zero) and ``v[k]`` is the mean squared error of the
    one-step predictor built on ``k`` observations.
    """

    theta: np.ndarray
    v: np.ndarray

    @property
    def n_max(self) -> int:
        return self.v.size - 1

    def row(self, k: int) -> np.ndarray:
        """``theta[k, 1..k]``."""
        return self.theta[k, 1 : k + 1]


def innovations_coefficients(
    acov: AutocovarianceTable, n_max: int, tol: float = DEGENERACY_TOL
) -> InnovationsSolution:
    """
    Run the innovations recursion on a stationary autocovariance table.

    ``v_0 = gamma(0)``, and for ``k = 1..n_max``, ``j = 0..k-1``::

        theta[k, k-j] = (gamma(k-j) - sum_{i<j} theta[j, j-i] theta[k, k-i] v_i) / v_j
        v_k = gamma(0) - sum_{j<k} theta[k, k-j]**2 v_j

    Raises
    ------
    DegeneracyError
        If some ``v_k <= tol * gamma(0)``.
    """
    gamma = acov.gamma
    if n_max < 0 or n_max > acov.max_lag:
        raise RangeError(f"n_max={n_max} exceeds the table's maximum lag {acov.max_lag}")
    if not gamma[0] > 0.0:
        raise DegeneracyError("gamma(0) must be positive")
    floor = tol * gamma[0]
    theta = np.zeros((n_max + 1, n_max + 1))
    v = np.empty(n_max + 1)
    v[0] = gamma[0]
    for k in range(1, n_max + 1):
        for j in range(k):
            # sum_{i=0}^{j-1} theta[j, j-i] * theta[k, k-i] * v[i]
            s = np.dot(theta[j, j:0:-1] * theta[k, k : k - j : -1], v[:j]) if j else 0.0
            theta[k, k - j] = (gamma[k - j] - s) / v[j]
        v[k] = gamma[0] - np.dot(theta[k, k:0:-1] ** 2, v[:k])
        if v[k] <= floor:
            raise DegeneracyError(
                f"innovations MSE v[{k}]={v[k]:.3g} is not positive; "
                "autocovariance table is not positive definite"
            )
    theta.setflags(write=False)
    v.setflags(write=False)
    return InnovationsSolution(theta, v)


def window_innovations(sol: InnovationsSolution, values: np.ndarray) -> np.ndarray:
    """
    Innovations ``U_k = x_k - xhat_k`` of centered windows.

    ``values`` is one window (1-D) or a stack of windows (rows); the
    recursion runs forward through each window starting from ``xhat_1 = 0``.
    """
    x = np.asarray(values, dtype=float)
    n = x.shape[-1]
    if n > sol.n_max + 1:
        raise RangeError(f"window of {n} needs theta rows up to {n - 1}, have {sol.n_max}")
    u = np.empty_like(x)
    for k in range(n):
        # xhat_{k+1} = sum_{j=1}^{k} theta[k, j] U_{k+1-j}
        pred = u[..., :k] @ sol.theta[k, k:0:-1] if k else 0.0
        u[..., k] = x[..., k] - pred
    return u


@dataclass(frozen=True)
class PredictorWindow:
    """Centered window ``x_{t-n+1..t}`` with its cached in-window innovations."""

    values: np.ndarray
    innovations: np.ndarray

    @classmethod
    def build(cls, sol: InnovationsSolution, values) -> PredictorWindow:
        x = np.array(values, dtype=float)
        if x.ndim != 1 or x.size < 1:
            raise ParameterError("predictor window must be a nonempty 1-D sequence")
        if x.size > sol.n_max:
            raise RangeError(f"window length {x.size} exceeds n_max={sol.n_max}")
        u = window_innovations(sol, x)
        x.setflags(write=False)
        u.setflags(write=False)
        return cls(x, u)

    def __len__(self) -> int:
        return int(self.values.size)


def _h_step_weights(sol: InnovationsSolution, n: int, h: int) -> np.ndarray:
    """Weights on the window innovations ``U_1..U_n`` for the h-step predictor."""
    row = n + h - 1
    if h < 1 or row > sol.n_max:
        raise RangeError(
            f"horizon {h} with window {n} needs theta row {row}; solution has n_max={sol.n_max}"
        )
    # U_i (1-based) enters with lag j = n + h - i, i = 1..n
    return sol.theta[row, n + h - 1 : h - 1 : -1]


def one_step_predict(sol: InnovationsSolution, window: PredictorWindow) -> float:
    """Centered one-step prediction of the value following ``window``."""
    n = len(window)
    return float(window.innovations @ sol.theta[n, n:0:-1])


def h_step_predict(
    sol: InnovationsSolution,
    window: PredictorWindow,
    h: int,
    mean: float = 0.0,
    clip_nonneg: bool = False,
) -> float:
    """
    Prediction ``h`` steps past the end of ``window`` with ``mean`` added back.

    With ``clip_nonneg`` the result is ``max(prediction + mean, 0)``, for
    series such as absolute returns that cannot be negative.
    """
    weights = _h_step_weights(sol, len(window), h)
    value = float(window.innovations @ weights) + mean
    return max(value, 0.0) if clip_nonneg else value


def predict_windows(
    sol: InnovationsSolution,
    windows: np.ndarray,
    horizon: int,
    mean: float = 0.0,
    clip_nonneg: bool = False,
) -> np.ndarray:
    """
    Vectorized :func:`h_step_predict` for a stack of centered windows.

    Returns an array of shape ``(n_windows, horizon)`` whose column ``h - 1``
    holds the ``h``-step predictions.
    """
    windows = np.atleast_2d(np.asarray(windows, dtype=float))
    n = windows.shape[1]
    if n > sol.n_max:
        raise RangeError(f"window length {n} exceeds n_max={sol.n_max}")
    u = window_innovations(sol, windows)
    weights = np.column_stack([_h_step_weights(sol, n, h) for h in range(1, horizon + 1)])
    out = u @ weights + mean
    if clip_nonneg:
        np.maximum(out, 0.0, out=out)
    return out
