import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from horizonrisk.errors import ParameterError, StationarityError
from horizonrisk.model_sim import (
    GarchParams,
    SVParams,
    ar_filter,
    continue_garch,
    continue_sv,
    garch_ma_coefficients,
    simulate_garch,
    simulate_garch_path,
    simulate_sv,
    simulate_sv_path,
)
from tests.oracles import acf, batch_means_se, garch_impulse_response, robust_acf_se


def test_sv_without_latent_noise_is_iid_normal():
    params = SVParams(mu=0.002, delta0=0.01, phi=0.9, sigma_eta=0.0)
    path = simulate_sv_path(params, 20000, seed=3)
    assert_array_equal(path.h, np.full(20000, 0.01))
    res = stats.kstest(path.returns.values, "norm", args=(0.002, 0.01))
    assert res.pvalue > 0.001


def test_sv_is_deterministic_given_seed():
    params = SVParams()
    a = simulate_sv(params, 500, seed=11)
    b = simulate_sv(params, 500, seed=11)
    c = simulate_sv(params, 500, seed=12)
    assert_array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_sv_variance_matches_lognormal_moment():
    params = SVParams(mu=0.0, delta0=0.01, phi=0.9, sigma_eta=0.3)
    r = simulate_sv(params, 100_000, seed=5).values
    dev2 = (r - params.mu) ** 2
    # independent Monte Carlo of E h_t^2: the truncated log-volatility sum is
    # normal with variance sigma_eta^2 (1 - phi^(2(trunc+1))) / (1 - phi^2)
    mc = np.random.default_rng(99)
    var_s = params.sigma_eta**2 * (1 - params.phi ** (2 * (params.trunc + 1))) / (1 - params.phi**2)
    oracle = params.delta0**2 * np.mean(np.exp(mc.normal(0.0, np.sqrt(var_s), 2_000_000)))
    assert_allclose(oracle, params.variance, rtol=5e-3)
    se = batch_means_se(dev2)
    assert abs(dev2.mean() - oracle) < 3 * se


def test_garch_without_dynamics_is_iid_with_intercept_variance():
    params = GarchParams(mu=0.0, alpha0=4e-4, alpha=(), beta=())
    path = simulate_garch_path(params, 20000, seed=2, burnin=10)
    assert_array_equal(path.h2, np.full(20000, 4e-4))
    res = stats.kstest(path.returns.values, "norm", args=(0.0, 0.02))
    assert res.pvalue > 0.001


def test_garch_long_run_variance():
    params = GarchParams(mu=0.0, alpha0=1e-6, alpha=(0.9,), beta=(0.05,))
    r = simulate_garch(params, 1_000_000, seed=8, burnin=10_000).values
    assert params.variance == pytest.approx(2e-5)
    assert np.var(r - params.mu) == pytest.approx(2e-5, rel=0.05)


def test_garch_is_deterministic_and_variance_floor_holds():
    params = GarchParams(mu=0.001, alpha0=2e-6, alpha=(0.7, 0.1), beta=(0.1, 0.05))
    a = simulate_garch_path(params, 3000, seed=4, burnin=100)
    b = simulate_garch_path(params, 3000, seed=4, burnin=100)
    assert_array_equal(a.returns.values, b.returns.values)
    assert np.all(a.h2 >= params.alpha0)


@pytest.mark.parametrize(
    "make",
    [
        lambda: simulate_sv(SVParams(delta0=0.01, phi=0.9, sigma_eta=0.3), 20000, seed=1),
        lambda: simulate_garch(GarchParams(alpha0=1e-6, alpha=(0.85,), beta=(0.1,)), 20000, seed=1),
    ],
    ids=["sv", "garch"],
)
def test_returns_are_white_noise(make):
    r = make().values
    for lag in range(1, 11):
        assert abs(acf(r, lag)) < 3 * robust_acf_se(r, lag)


def test_invalid_parameters_raise():
    with pytest.raises(ParameterError):
        SVParams(phi=1.0)
    with pytest.raises(ParameterError):
        SVParams(delta0=0.0)
    with pytest.raises(ParameterError):
        SVParams(sigma_eta=-0.1)
    with pytest.raises(ParameterError):
        SVParams(trunc=0)
    with pytest.raises(StationarityError):
        GarchParams(alpha0=1e-6, alpha=(0.9,), beta=(0.1,))
    with pytest.raises(ParameterError):
        GarchParams(alpha0=0.0)
    with pytest.raises(ParameterError):
        simulate_sv(SVParams(), 0, seed=1)


def test_arch1_coefficients():
    params = GarchParams(alpha0=2e-5, alpha=(), beta=(0.4,))
    c, g = garch_ma_coefficients(params, 6)
    assert c == 2e-5
    assert_array_equal(g, [0.4, 0, 0, 0, 0, 0])


def test_garch11_coefficients_match_recursion():
    params = GarchParams(alpha0=1e-6, alpha=(0.9,), beta=(0.05,))
    c, g = garch_ma_coefficients(params, 50)
    assert c == pytest.approx(1e-6 / 0.1)
    assert_allclose(g, 0.05 * 0.9 ** np.arange(50), rtol=1e-12)
    assert_allclose(g, garch_impulse_response((0.9,), (0.05,), 50), rtol=1e-12)


def test_garch22_coefficients_match_impulse_response():
    params = GarchParams(alpha0=1e-6, alpha=(0.5, 0.2), beta=(0.1, 0.08))
    _, g = garch_ma_coefficients(params, 80)
    assert_allclose(g, garch_impulse_response((0.5, 0.2), (0.1, 0.08), 80), rtol=1e-12, atol=1e-300)


def test_arch_infinity_reconstructs_simulated_variance():
    params = GarchParams(mu=0.0005, alpha0=1e-6, alpha=(0.9,), beta=(0.05,))
    path = simulate_garch_path(params, 1500, seed=21, burnin=500)
    c, g = garch_ma_coefficients(params, 200)
    dev2 = (path.returns.values - params.mu) ** 2
    for t in range(200, 1500, 37):
        recon = c + g @ dev2[t - 1 :: -1][:200]
        assert recon == pytest.approx(path.h2[t], rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.lists(st.floats(0.0, 0.3), min_size=0, max_size=3),
    beta=st.lists(st.floats(0.0, 0.3), min_size=1, max_size=3),
)
def test_ma_partial_sums_monotone_and_bounded(alpha, beta):
    if sum(alpha) + sum(beta) >= 0.99:
        return
    params = GarchParams(alpha0=1e-6, alpha=tuple(alpha), beta=tuple(beta))
    _, g = garch_ma_coefficients(params, 300)
    assert np.all(g >= 0.0)
    partial = np.cumsum(g)
    assert np.all(np.diff(partial) >= 0.0)
    assert partial[-1] <= sum(beta) / (1.0 - sum(alpha)) * (1 + 1e-12)


def test_ar_filter_recursion():
    e = np.array([1.0, 0.0, 0.0, 2.0])
    x = ar_filter(e, [0.5], mean=1.0)
    assert_allclose(x, [2.0, 1.5, 1.25, 3.125])


def test_continuations_have_the_model_scale():
    sv = simulate_sv_path(SVParams(sigma_eta=0.0, delta0=0.01), 500, seed=1)
    sums = continue_sv(sv, horizon=4, n_paths=100_000, seed=2)
    assert np.std(sums) == pytest.approx(0.02, rel=0.02)
    flat = GarchParams(alpha0=1e-4, alpha=(), beta=())
    gp = simulate_garch_path(flat, 100, seed=1)
    sums = continue_garch(gp, horizon=9, n_paths=100_000, seed=3)
    assert np.std(sums) == pytest.approx(0.03, rel=0.02)
