"""Lower-tail risk measures of a forecast distribution."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from horizonrisk.horizon import EmpiricalDistribution

__all__ = ["RiskReport", "conditional_tail_expectation", "risk_report", "value_at_risk"]


def _as_distribution(dist) -> EmpiricalDistribution:
    return dist if isinstance(dist, EmpiricalDistribution) else EmpiricalDistribution(np.asarray(dist))


def value_at_risk(dist, p: float) -> float:
    """
    Lower ``p``-quantile of the return distribution: the ``ceil(p * B)``-th
    smallest sample, without interpolation.
    """
    return _as_distribution(dist).quantile(p)


def conditional_tail_expectation(dist, p: float) -> float:
    """Mean of the ``ceil(p * B)`` smallest samples (the VaR sample included)."""
    return _as_distribution(dist).tail_mean(p)


@dataclass(frozen=True)
class RiskReport:
    level: float
    var: float
    cte: float
    n_tail: int

    def as_dict(self) -> dict:
        return {"level": self.level, "var": self.var, "cte": self.cte, "n_tail": self.n_tail}


def risk_report(dist, levels) -> list[RiskReport]:
    """VaR and CTE at each level in ``levels``."""
    d = _as_distribution(dist)
    return [
        RiskReport(float(p), d.quantile(p), d.tail_mean(p), d.tail_count(p)) for p in levels
    ]
