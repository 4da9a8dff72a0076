"""Seeded, block-parallel bootstrap of weighted signed magnitude sums."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from horizonrisk.signs import SignModel

BLOCK_SIZE = 4096


def block_rng(seed: int, stream: int, block: int) -> np.random.Generator:
    """Independent counter-based generator for one block of draws."""
    seq = np.random.SeedSequence(int(seed), spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.Philox(seq))


def bootstrap_sums(
    centers: np.ndarray,
    pools: list[np.ndarray],
    draws: int,
    seed: int,
    weights: np.ndarray | None = None,
    sign_model: SignModel | None = None,
    workers: int = 1,
    flip: bool = False,
    stream: int = 0,
    joint: bool = True,
) -> np.ndarray:
    """
    ``B`` draws of ``sum_h w_h (centers_h + W_h) * s_h``.

    With ``joint`` (the default) each draw picks one past origin uniformly
    and takes its errors at every horizon, ``W_h = pools[h][j]``, so the
    cross-horizon covariance of the errors is kept; pools must then be
    aligned by origin (entry ``j`` of every pool comes from the same
    origin) and only the first ``len(pools[-1])`` entries are used.
    Otherwise ``W_h`` is drawn from ``pools[h]`` independently across
    horizons.  ``s_h`` are Rademacher signs or, with a ``sign_model``, signs
    drawn from its binned law at ``|centers_h + W_h|``.  Draw ``i`` only depends on ``(seed, stream, i //
    BLOCK_SIZE)``, so the output does not depend on ``workers``.  ``flip``
    negates every sign (the mirror-image sample).
    """
    centers = np.asarray(centers, dtype=float)
    horizon = centers.size
    w = np.ones(horizon) if weights is None else np.asarray(weights, dtype=float)
    sizes = [len(p) for p in pools]
    n_blocks = -(-int(draws) // BLOCK_SIZE)

    def run_block(b: int) -> np.ndarray:
        nb = min(BLOCK_SIZE, draws - b * BLOCK_SIZE)
        rng = block_rng(seed, stream, b)
        mags = np.empty((nb, horizon))
        if joint:
            idx = rng.integers(0, sizes[-1], size=nb)
        for h in range(horizon):
            if not joint:
                idx = rng.integers(0, sizes[h], size=nb)
            mags[:, h] = centers[h] + pools[h][idx]
        if sign_model is None:
            signs = 2.0 * rng.integers(0, 2, size=(nb, horizon)) - 1.0
        else:
            u = rng.random((nb, horizon))
            signs = np.where(u < sign_model.probability(mags), 1.0, -1.0)
        if flip:
            signs = -signs
        return (mags * signs * w).sum(axis=1)

    if workers <= 1 or n_blocks == 1:
        parts = [run_block(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(run_block, range(n_blocks)))
    return np.concatenate(parts)
