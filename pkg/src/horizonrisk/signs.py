"""
Sign laws for the bootstrap: the symmetric Rademacher law and a binned
conditional law for asymmetric shocks.

The asymmetric model discretizes magnitudes into bins ``[j*lam, (j+1)*lam)``
and estimates, per bin, the probability that a centered return with that
magnitude is positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from horizonrisk.errors import ParameterError

__all__ = ["SignModel", "fit_sign_model", "rademacher", "sample_signs"]


@dataclass(frozen=True)
class SignModel:
    """
    Per-bin probabilities of a positive sign.

    Attributes
    ----------
    lam : float
        Bin width.
    p_plus : ndarray
        ``p_plus[j]`` is the smoothed probability of ``+1`` for magnitudes in
        bin ``j``; bins without observations hold ``fallback``.
    counts, positives : ndarray
        Observations and positive observations per bin.
    fallback : float
        Probability used for empty bins and bins beyond the table.
    """

    lam: float
    p_plus: np.ndarray
    counts: np.ndarray
    positives: np.ndarray
    fallback: float = 0.5

    def __post_init__(self) -> None:
        if not self.lam > 0.0:
            raise ParameterError(f"bin width must be positive, got {self.lam}")
        if not 0.0 <= self.fallback <= 1.0:
            raise ParameterError("fallback probability must lie in [0, 1]")
        p = np.asarray(self.p_plus, dtype=float)
        if np.any((p < 0.0) | (p > 1.0)):
            raise ParameterError("bin probabilities must lie in [0, 1]")

    @property
    def n_bins(self) -> int:
        return int(self.p_plus.size)

    def bin_index(self, magnitudes) -> np.ndarray:
        m = np.abs(np.asarray(magnitudes, dtype=float))
        return np.floor(m / self.lam).astype(np.int64)

    def probability(self, magnitudes) -> np.ndarray:
        """Probability of ``+1`` for each magnitude (absolute value is binned)."""
        j = self.bin_index(magnitudes)
        inside = j < self.n_bins
        out = np.full(j.shape, self.fallback)
        out[inside] = self.p_plus[j[inside]]
        return out

    @classmethod
    def symmetric(cls, lam: float = 1.0) -> SignModel:
        empty = np.zeros(0)
        return cls(lam, empty, empty.astype(np.int64), empty.astype(np.int64), 0.5)


def fit_sign_model(centered_returns, lam: float | None = None, fallback: float = 0.5) -> SignModel:
    """
    Estimate the binned sign law of centered returns.

    Each value goes to bin ``floor(|r| / lam)``; the bin probability is
    ``(positives + 0.5) / (count + 1)``.  Zero counts as positive, matching
    the sign convention of :func:`horizonrisk.horizon.magnitude_sign_split`.
    ``lam`` defaults to a tenth of the sample standard deviation.
    """
    r = np.asarray(getattr(centered_returns, "values", centered_returns), dtype=float)
    if r.size < 1:
        raise ParameterError("cannot fit a sign model to an empty sequence")
    if lam is None:
        lam = 0.1 * float(r.std())
    if not lam > 0.0:
        raise ParameterError(f"bin width must be positive, got {lam}")
    j = np.floor(np.abs(r) / lam).astype(np.int64)
    n_bins = int(j.max()) + 1
    counts = np.bincount(j, minlength=n_bins)
    positives = np.bincount(j, weights=(r >= 0.0), minlength=n_bins).astype(np.int64)
    p_plus = np.full(n_bins, float(fallback))
    seen = counts > 0
    p_plus[seen] = (positives[seen] + 0.5) / (counts[seen] + 1.0)
    return SignModel(float(lam), p_plus, counts, positives, float(fallback))


def rademacher(rng: np.random.Generator, size) -> np.ndarray:
    """iid signs, +1 and -1 with probability 1/2 each."""
    return 2.0 * rng.integers(0, 2, size=size) - 1.0


def sample_signs(model: SignModel | None, magnitudes, seed) -> np.ndarray:
    """
    Draw one sign per magnitude, ``+1`` with the model's bin probability.

    ``model=None`` gives symmetric Rademacher signs.  ``seed`` is anything
    accepted by ``numpy.random.default_rng`` (including a Generator).
    """
    m = np.asarray(magnitudes, dtype=float)
    rng = np.random.default_rng(seed)
    if model is None:
        return rademacher(rng, m.shape)
    u = rng.random(m.shape)
    return np.where(u < model.probability(m), 1.0, -1.0)
