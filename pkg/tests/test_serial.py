import numpy as np
from numpy.testing import assert_array_equal
import pytest

from horizonrisk.errors import DegeneracyError, InsufficientDataError
from horizonrisk.horizon import ForecastConfig
from horizonrisk.linpred import AutocovarianceTable, innovations_coefficients, sample_autocovariance
from horizonrisk.model_sim import (
    GarchParams,
    ar_filter,
    garch_continuation_paths,
    simulate_garch_path,
)
from horizonrisk.serial import (
    decompose_integrated,
    fit_series_predictor,
    forecast_correlated_distribution,
    innovation_residuals,
    required_length,
)
from tests.conftest import ar1_acov
from tests.oracles import acf, ar1_continuation_sums, projection_coefficients, skewness

GARCH = GarchParams(mu=0.0, alpha0=1e-6, alpha=(0.9,), beta=(0.05,))


def ar_garch(length, seed, phi=0.5, mu=5e-4):
    path = simulate_garch_path(GARCH, length, seed)
    return path, ar_filter(path.returns.values, [phi], mean=mu)


def test_white_noise_residuals_approach_series():
    gen = np.random.default_rng(2)
    gaps = []
    for n_obs in (500, 50_000):
        x = gen.standard_normal(n_obs)
        z, fitted = innovation_residuals(x, 5)
        assert fitted[0] == 0.0
        assert np.allclose(z + fitted, x - x.mean())
        gaps.append(np.max(np.abs(z - (x - x.mean()))))
    assert gaps[1] < gaps[0]
    assert gaps[1] < 0.1


def test_ar_garch_residuals_are_white():
    _, x = ar_garch(10_000, seed=3)
    z, _ = innovation_residuals(x, 20)
    z = z[20:]
    for lag in range(1, 6):
        assert abs(acf(z, lag)) < 4 / np.sqrt(z.size)
    z2, _ = innovation_residuals(x, 20)
    assert_array_equal(z2[20:], z)


def test_residuals_match_fixed_window_definition():
    gen = np.random.default_rng(5)
    x = ar_filter(gen.standard_normal(60), [0.4])
    n = 4
    x_star = x - x.mean()
    sol = fit_series_predictor(x_star, n)
    z, _ = innovation_residuals(x, n, sol)
    a = projection_coefficients(sample_autocovariance(x_star, n).gamma, n, 1)
    for t in range(n, 60):
        assert z[t] == pytest.approx(x_star[t] - a @ x_star[t - n : t], abs=1e-12)


def test_residuals_need_more_than_window():
    with pytest.raises(InsufficientDataError):
        innovation_residuals(np.arange(5.0), 5)


def test_white_noise_table_gives_unit_weights():
    sol = innovations_coefficients(AutocovarianceTable(np.r_[1.0, np.zeros(20)]), 20)
    d = decompose_integrated(np.random.default_rng(0).standard_normal(40), 8, 6, sol)
    assert d.t_term == 0.0
    assert_array_equal(d.group_weights, np.ones(6))
    assert d.future_innovations is None


@pytest.mark.parametrize("phi", [0.3, 0.8, -0.5])
def test_linear_term_matches_projection_of_sum(phi):
    n, horizon = 12, 5
    gamma = ar1_acov(phi, n + horizon)
    sol = innovations_coefficients(AutocovarianceTable(gamma), n + horizon - 1)
    x = np.random.default_rng(1).standard_normal(30)
    d = decompose_integrated(x, n, horizon, sol)
    coef = sum(projection_coefficients(gamma, n, h) for h in range(1, horizon + 1))
    assert d.t_term == pytest.approx(coef @ x[-n:], abs=1e-6)
    # for AR(1) the projection of the sum is sum_h phi^h x_N
    assert d.t_term == pytest.approx(sum(phi**h for h in range(1, horizon + 1)) * x[-1], abs=1e-10)


def test_in_sample_identity():
    _, x = ar_garch(3000, seed=8)
    x_star = x - x.mean()
    n, horizon = 15, 7
    sol = fit_series_predictor(x_star, n + horizon - 1)
    for origin in (n, 400, 2993):
        d = decompose_integrated(x_star, n, horizon, sol, origin=origin)
        total = x_star[origin : origin + horizon].sum()
        assert d.t_term + d.innovation_term() == pytest.approx(total, abs=1e-10)


def test_correlated_forecast_determinism_and_info():
    _, x = ar_garch(1500, seed=4)
    cfg = ForecastConfig(horizon=5, draws=6000, seed=3)
    a = forecast_correlated_distribution(x, cfg)
    b = forecast_correlated_distribution(x, cfg, workers=4)
    assert_array_equal(a.samples, b.samples)
    assert a.info["mode"] == "correlated"
    assert a.info["location"] == pytest.approx(5 * x.mean() + a.info["linear_forecast"])
    assert len(a.info["group_weights"]) == 5


def test_correlated_forecast_is_symmetric_about_location():
    _, x = ar_garch(3000, seed=6)
    dist = forecast_correlated_distribution(x, ForecastConfig(horizon=10, draws=100_000, seed=2))
    assert abs(skewness(dist.samples - dist.info["location"])) < 0.05


def test_correlated_quantile_matches_generative_model():
    phi, mu = 0.5, 5e-4
    path, x = ar_garch(5000, seed=0, phi=phi, mu=mu)
    dev = garch_continuation_paths(path, 10, 50_000, seed=1)
    truth = np.quantile(ar1_continuation_sums(x[-1], dev, phi, mu), 0.05)
    dist = forecast_correlated_distribution(x, ForecastConfig(horizon=10, draws=20_000, seed=0))
    assert dist.quantile(0.05) == pytest.approx(truth, rel=0.15)


def test_correlated_length_and_degeneracy_errors():
    assert required_length(10, 5, 20) == 44
    x = np.random.default_rng(0).standard_normal(43)
    with pytest.raises(InsufficientDataError):
        forecast_correlated_distribution(x, ForecastConfig(horizon=5, n=10))
    with pytest.raises(DegeneracyError):
        forecast_correlated_distribution(np.full(200, 0.01), ForecastConfig(horizon=5, n=10))
