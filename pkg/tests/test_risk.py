import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy import stats

from horizonrisk.errors import ParameterError
from horizonrisk.horizon import EmpiricalDistribution
from horizonrisk.risk import conditional_tail_expectation, risk_report, value_at_risk

samples_st = arrays(np.float64, st.integers(1, 200), elements=st.floats(-1e3, 1e3))
level_st = st.floats(1e-3, 0.999)


def test_order_statistic_examples():
    dist = EmpiricalDistribution(np.arange(100, 0, -1, dtype=float))
    assert value_at_risk(dist, 0.05) == 5.0
    assert conditional_tail_expectation(dist, 0.05) == 3.0
    ten = np.arange(1.0, 11.0)
    assert value_at_risk(ten, 0.999) == 10.0
    assert conditional_tail_expectation(ten, 0.999) == 5.5
    assert value_at_risk(ten, 0.1) == 1.0
    assert value_at_risk(ten, 0.3) == 3.0


def test_normal_closed_forms():
    x = np.random.default_rng(11).standard_normal(1_000_000)
    z = stats.norm.ppf(0.05)
    assert value_at_risk(x, 0.05) == pytest.approx(z, abs=0.01)
    assert conditional_tail_expectation(x, 0.05) == pytest.approx(-stats.norm.pdf(z) / 0.05, abs=0.02)


def test_report():
    rep = risk_report(np.arange(1.0, 101.0), [0.01, 0.05])
    assert [r.as_dict() for r in rep] == [
        {"level": 0.01, "var": 1.0, "cte": 1.0, "n_tail": 1},
        {"level": 0.05, "var": 5.0, "cte": 3.0, "n_tail": 5},
    ]


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, float("nan")])
def test_level_out_of_range(p):
    with pytest.raises(ParameterError):
        value_at_risk(np.arange(5.0), p)
    with pytest.raises(ParameterError):
        conditional_tail_expectation(np.arange(5.0), p)


@settings(max_examples=200, deadline=None)
@given(x=samples_st, p1=level_st, p2=level_st)
def test_monotone_in_level_and_cte_below_var(x, p1, p2):
    lo, hi = sorted((p1, p2))
    assert value_at_risk(x, lo) <= value_at_risk(x, hi)
    assert conditional_tail_expectation(x, lo) <= conditional_tail_expectation(x, hi) + 1e-9
    assert conditional_tail_expectation(x, lo) <= value_at_risk(x, lo) + 1e-9


@settings(max_examples=200, deadline=None)
@given(x=samples_st, p=level_st, c=st.floats(-100, 100), s=st.floats(1e-3, 1e3))
def test_translation_and_homogeneity(x, p, c, s):
    var, cte = value_at_risk(x, p), conditional_tail_expectation(x, p)
    assert value_at_risk(x + c, p) == pytest.approx(var + c, abs=1e-9)
    assert conditional_tail_expectation(x + c, p) == pytest.approx(cte + c, abs=1e-9)
    assert value_at_risk(s * x, p) == s * var
    assert conditional_tail_expectation(s * x, p) == pytest.approx(s * cte, rel=1e-12, abs=1e-9)
