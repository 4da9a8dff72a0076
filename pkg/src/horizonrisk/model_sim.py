"""
Synthetic return paths from two special cases of the general time-varying
volatility model ``r_t = mu + h_t * u_t``: log-normal stochastic volatility
(SV) and GARCH(p, q).

The simulators take known parameters and are pure functions of
``(params, length, seed)``.  They are used to validate the model-free
forecasting pipelines, so each also exposes the latent state needed to
continue the true model past the end of the sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from horizonrisk.errors import InsufficientDataError, ParameterError, StationarityError

__all__ = [
    "GarchParams",
    "GarchPath",
    "ReturnSeries",
    "SVParams",
    "SVPath",
    "ar_filter",
    "continue_garch",
    "continue_sv",
    "continue_sv_filtered",
    "garch_continuation_paths",
    "draw_shocks",
    "garch_ma_coefficients",
    "simulate_garch",
    "simulate_garch_path",
    "simulate_sv",
    "simulate_sv_path",
]


@dataclass(frozen=True)
class ReturnSeries:
    """Ordered, finite return observations with optional timestamps."""

    values: np.ndarray
    timestamps: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ParameterError("a return series needs at least one observation")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ParameterError(f"non-finite return at position {bad}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.timestamps is not None:
            stamps = tuple(self.timestamps)
            if len(stamps) != values.size:
                raise ParameterError("timestamps and values differ in length")
            object.__setattr__(self, "timestamps", stamps)

    def __len__(self) -> int:
        return int(self.values.size)

    @cached_property
    def mean(self) -> float:
        return float(self.values.mean())

    def head(self, stop: int) -> ReturnSeries:
        """Series truncated to the first ``stop`` observations."""
        stamps = None if self.timestamps is None else self.timestamps[:stop]
        return ReturnSeries(self.values[:stop], stamps)


@dataclass(frozen=True)
class SVParams:
    """
    Log-normal stochastic volatility.

    ``h_t = delta0 * exp(sum_{i=0}^{trunc} phi**i * eta_{t-1-i} / 2)`` with
    ``eta`` iid normal(0, sigma_eta**2).
    """

    mu: float = 0.0
    delta0: float = 0.01
    phi: float = 0.9
    sigma_eta: float = 0.3
    trunc: int = 200

    def __post_init__(self) -> None:
        if not 0.0 < self.phi < 1.0:
            raise ParameterError(f"phi must lie in (0, 1), got {self.phi}")
        if not self.delta0 > 0.0:
            raise ParameterError(f"delta0 must be positive, got {self.delta0}")
        if not self.sigma_eta >= 0.0:
            raise ParameterError(f"sigma_eta must be nonnegative, got {self.sigma_eta}")
        if int(self.trunc) != self.trunc or self.trunc < 1:
            raise ParameterError(f"trunc must be a positive integer, got {self.trunc}")
        if not np.isfinite(self.mu):
            raise ParameterError("mu must be finite")

    @property
    def variance(self) -> float:
        """Stationary variance of ``r_t - mu`` (infinite-sum limit)."""
        return self.delta0**2 * float(np.exp(self.sigma_eta**2 / (2.0 * (1.0 - self.phi**2))))


@dataclass(frozen=True)
class GarchParams:
    """
    GARCH(p, q) in the convention ``h_t^2 = alpha0 + sum alpha_i h_{t-i}^2 +
    sum beta_j (r_{t-j} - mu)^2``: ``alpha`` multiplies lagged variances and
    ``beta`` multiplies lagged squared deviations.
    """

    mu: float = 0.0
    alpha0: float = 1e-6
    alpha: tuple[float, ...] = (0.9,)
    beta: tuple[float, ...] = (0.05,)

    def __post_init__(self) -> None:
        alpha = tuple(float(a) for a in np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        beta = tuple(float(b) for b in np.atleast_1d(np.asarray(self.beta, dtype=float)))
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if not self.alpha0 > 0.0:
            raise ParameterError(f"alpha0 must be positive, got {self.alpha0}")
        if any(a < 0.0 for a in alpha) or any(b < 0.0 for b in beta):
            raise ParameterError("GARCH coefficients must be nonnegative")
        if not np.isfinite(self.mu):
            raise ParameterError("mu must be finite")
        persistence = sum(alpha) + sum(beta)
        if persistence >= 1.0:
            raise StationarityError(
                f"sum(alpha) + sum(beta) = {persistence:.6g} >= 1; no finite variance"
            )

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> int:
        return len(self.beta)

    @property
    def variance(self) -> float:
        """Unconditional variance ``alpha0 / (1 - sum(alpha) - sum(beta))``."""
        return self.alpha0 / (1.0 - sum(self.alpha) - sum(self.beta))


def draw_shocks(
    rng: np.random.Generator, size: int, shocks: str = "normal", shape: float | None = None
) -> np.ndarray:
    """
    Draw iid zero-mean, unit-variance shocks.

    ``shocks`` is ``"normal"``, ``"t"`` (standardized Student-t, ``shape`` is
    the degrees of freedom, default 8) or ``"skewnormal"`` (standardized
    skew-normal, ``shape`` is the slant, default 4).  Only the first two are
    symmetric.
    """
    if shocks == "normal":
        return rng.standard_normal(size)
    if shocks == "t":
        df = 8.0 if shape is None else float(shape)
        if df <= 2.0:
            raise ParameterError("Student-t shocks need more than 2 degrees of freedom")
        return rng.standard_t(df, size) / np.sqrt(df / (df - 2.0))
    if shocks == "skewnormal":
        slant = 4.0 if shape is None else float(shape)
        d = slant / np.sqrt(1.0 + slant**2)
        z0 = rng.standard_normal(size)
        z1 = rng.standard_normal(size)
        x = d * np.abs(z0) + np.sqrt(1.0 - d**2) * z1
        mean = d * np.sqrt(2.0 / np.pi)
        return (x - mean) / np.sqrt(1.0 - mean**2)
    raise ParameterError(f"unknown shock distribution {shocks!r}")


@dataclass(frozen=True)
class SVPath:
    """SV returns together with the latent volatility state."""

    params: SVParams
    returns: ReturnSeries
    h: np.ndarray
    # eta[k] is eta_{k - trunc}; the last element is eta_N, which drives h_{N+1}
    eta: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class GarchPath:
    """GARCH returns with the recorded conditional variances ``h_t^2``."""

    params: GarchParams
    returns: ReturnSeries
    h2: np.ndarray


def _check_length(length: int) -> int:
    if int(length) != length or length < 1:
        raise ParameterError(f"length must be a positive integer, got {length}")
    return int(length)


def _log_vol(eta: np.ndarray, phi: float, trunc: int) -> np.ndarray:
    # entry k of the result is sum_{i=0}^{trunc} phi^i eta[k + trunc - i]
    weights = phi ** np.arange(trunc + 1)
    return np.convolve(eta, weights, mode="valid")


def simulate_sv_path(
    params: SVParams,
    length: int,
    seed: int,
    shocks: str = "normal",
    shape: float | None = None,
) -> SVPath:
    length = _check_length(length)
    rng = np.random.default_rng(seed)
    trunc = int(params.trunc)
    eta = params.sigma_eta * rng.standard_normal(length + trunc + 1)
    u = draw_shocks(rng, length, shocks, shape)
    # h_t uses eta_{t-1}, ..., eta_{t-1-trunc}
    h = params.delta0 * np.exp(_log_vol(eta[:-1], params.phi, trunc) / 2.0)
    r = params.mu + h * u
    return SVPath(params, ReturnSeries(r), h, eta)


def simulate_sv(
    params: SVParams,
    length: int,
    seed: int,
    shocks: str = "normal",
    shape: float | None = None,
) -> ReturnSeries:
    """
    Simulate ``length`` returns from the SV model.

    Parameters
    ----------
    params : SVParams
        Model parameters.
    length : int
        Number of returns to record.
    seed : int
        Seed for ``numpy.random.default_rng``; identical inputs give
        bit-identical output.
    shocks, shape
        Shock distribution, see :func:`draw_shocks`.

    Returns
    -------
    ReturnSeries
    """
    return simulate_sv_path(params, length, seed, shocks, shape).returns


def simulate_garch_path(
    params: GarchParams,
    length: int,
    seed: int,
    burnin: int = 1000,
    shocks: str = "normal",
    shape: float | None = None,
) -> GarchPath:
    length = _check_length(length)
    if int(burnin) != burnin or burnin < 0:
        raise ParameterError(f"burnin must be a nonnegative integer, got {burnin}")
    burnin = int(burnin)
    rng = np.random.default_rng(seed)
    total = length + burnin
    u = draw_shocks(rng, total, shocks, shape)

    p, q = params.p, params.q
    alpha, beta = params.alpha, params.beta
    lag = max(p, q, 1)
    start_var = params.variance
    # pre-sample: variances at the unconditional level, squared deviations too
    h2 = np.empty(total + lag)
    e2 = np.empty(total + lag)
    h2[:lag] = start_var
    e2[:lag] = start_var
    e = np.empty(total)
    a0 = params.alpha0
    for t in range(lag, total + lag):
        v = a0
        for i in range(p):
            v += alpha[i] * h2[t - 1 - i]
        for j in range(q):
            v += beta[j] * e2[t - 1 - j]
        h2[t] = v
        et = np.sqrt(v) * u[t - lag]
        e[t - lag] = et
        e2[t] = et * et
    keep = slice(lag + burnin, None)
    r = params.mu + e[burnin:]
    return GarchPath(params, ReturnSeries(r), h2[keep].copy())


def simulate_garch(
    params: GarchParams,
    length: int,
    seed: int,
    burnin: int = 1000,
    shocks: str = "normal",
    shape: float | None = None,
) -> ReturnSeries:
    """
    Simulate ``length`` GARCH(p, q) returns after discarding ``burnin``.

    The variance recursion starts at the unconditional variance.  Identical
    inputs give bit-identical output.
    """
    return simulate_garch_path(params, length, seed, burnin, shocks, shape).returns


def garch_ma_coefficients(params: GarchParams, count: int) -> tuple[float, np.ndarray]:
    """
    ARCH(infinity) form of a GARCH(p, q) variance.

    Returns ``(c, g)`` with ``h_t^2 = c + sum_{i>=1} g_i (r_{t-i} - mu)^2``
    truncated after ``count`` terms.  ``g`` is the power series of
    ``B(L) / (1 - A(L))`` where ``A`` holds ``alpha`` and ``B`` holds ``beta``;
    ``c = alpha0 / (1 - sum(alpha))``.
    """
    if int(count) != count or count < 1:
        raise ParameterError(f"count must be a positive integer, got {count}")
    count = int(count)
    alpha, beta = params.alpha, params.beta
    g = np.zeros(count)
    for k in range(1, count + 1):
        v = beta[k - 1] if k <= len(beta) else 0.0
        for i in range(1, min(len(alpha), k - 1) + 1):
            v += alpha[i - 1] * g[k - 1 - i]
        g[k - 1] = v
    intercept = params.alpha0 / (1.0 - sum(alpha))
    return intercept, g


def ar_filter(innovations: np.ndarray, coeffs, mean: float = 0.0, burnin: int = 0) -> np.ndarray:
    """
    Pass zero-mean innovations through an AR filter:
    ``x_t = mean + sum_i coeffs[i] (x_{t-1-i} - mean) + innovations_t``.

    The first ``burnin`` outputs are dropped.
    """
    from scipy.signal import lfilter

    a = np.concatenate([[1.0], -np.asarray(coeffs, dtype=float)])
    x = lfilter([1.0], a, np.asarray(innovations, dtype=float))
    return mean + x[burnin:]


def continue_sv(path: SVPath, horizon: int, n_paths: int, seed: int) -> np.ndarray:
    """
    Integrated returns ``sum_{k=1}^{horizon} r_{N+k}`` of the true SV model
    continued from the end of ``path`` (conditioning on the latent history).
    """
    params = path.params
    trunc = int(params.trunc)
    rng = np.random.default_rng(seed)
    past = path.eta[-(trunc + 1):]
    fresh = params.sigma_eta * rng.standard_normal((n_paths, horizon - 1))
    eta = np.concatenate([np.broadcast_to(past, (n_paths, trunc + 1)), fresh], axis=1)
    weights = params.phi ** np.arange(trunc + 1)
    log_h = np.empty((n_paths, horizon))
    for k in range(horizon):
        window = eta[:, k : k + trunc + 1]
        log_h[:, k] = window @ weights[::-1]
    h = params.delta0 * np.exp(log_h / 2.0)
    u = rng.standard_normal((n_paths, horizon))
    return horizon * params.mu + (h * u).sum(axis=1)


def garch_continuation_paths(path: GarchPath, horizon: int, n_paths: int, seed: int) -> np.ndarray:
    """
    Future deviations ``r_{N+k} - mu``, ``k = 1..horizon``, of the true GARCH
    model continued from the last recorded variances and deviations of
    ``path``; shape ``(n_paths, horizon)``.
    """
    params = path.params
    p, q = params.p, params.q
    lag = max(p, q, 1)
    if len(path.returns) < lag:
        raise InsufficientDataError("path is shorter than the GARCH lag order")
    rng = np.random.default_rng(seed)
    h2_hist = [np.full(n_paths, v) for v in path.h2[-lag:]]
    dev = path.returns.values[-lag:] - params.mu
    e2_hist = [np.full(n_paths, v * v) for v in dev]
    out = np.empty((n_paths, horizon))
    for k in range(horizon):
        v = np.full(n_paths, params.alpha0)
        for i in range(p):
            v = v + params.alpha[i] * h2_hist[-1 - i]
        for j in range(q):
            v = v + params.beta[j] * e2_hist[-1 - j]
        e = np.sqrt(v) * rng.standard_normal(n_paths)
        out[:, k] = e
        h2_hist.append(v)
        e2_hist.append(e * e)
    return out


def continue_garch(path: GarchPath, horizon: int, n_paths: int, seed: int) -> np.ndarray:
    """
    Integrated returns ``sum_{k=1}^{horizon} r_{N+k}`` of the true GARCH model
    continued from the end of ``path``.
    """
    dev = garch_continuation_paths(path, horizon, n_paths, seed)
    return horizon * path.params.mu + dev.sum(axis=1)


def continue_sv_filtered(
    returns,
    params: SVParams,
    horizon: int,
    n_paths: int,
    seed: int,
    particles: int = 20000,
) -> np.ndarray:
    """
    Integrated returns of the SV model continued from its state *given the
    observed returns only*.

    The log-volatility state ``s_t = sum_i phi^i eta_{t-1-i}`` follows
    ``s_{t+1} = phi s_t + eta_t``; a bootstrap particle filter with
    systematic resampling tracks ``s_t | r_1..r_t``.  Paths are then drawn
    from the filtered law at time ``N`` and simulated forward.
    """
    r = np.asarray(getattr(returns, "values", returns), dtype=float) - params.mu
    rng = np.random.default_rng(seed)
    phi, sig = params.phi, params.sigma_eta
    log_d2 = 2.0 * np.log(params.delta0)
    s = rng.standard_normal(particles) * sig / np.sqrt(1.0 - phi**2)
    logw = np.zeros(particles)
    for t, rt in enumerate(r):
        if t:
            s = phi * s + sig * rng.standard_normal(particles)
        log_var = log_d2 + s
        logw += -0.5 * (log_var + rt * rt * np.exp(-log_var))
        w = np.exp(logw - logw.max())
        w /= w.sum()
        if 1.0 / np.dot(w, w) < particles / 2:
            positions = (rng.random() + np.arange(particles)) / particles
            idx = np.minimum(np.searchsorted(np.cumsum(w), positions), particles - 1)
            s = s[idx]
            logw = np.zeros(particles)
    w = np.exp(logw - logw.max())
    w /= w.sum()
    state = s[rng.choice(particles, size=n_paths, p=w)]
    total = np.zeros(n_paths)
    for _ in range(horizon):
        state = phi * state + sig * rng.standard_normal(n_paths)
        total += np.exp(0.5 * (log_d2 + state)) * rng.standard_normal(n_paths)
    return horizon * params.mu + total
