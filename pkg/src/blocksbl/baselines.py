"""Reference estimators used by the benchmark and acceptance suites."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import RankDeficient
from .model import ProblemInstance


def oracle_mmse(inst: ProblemInstance, support: Sequence[int]) -> np.ndarray:
    """Least-squares fit on the true-support columns, zeros elsewhere.

    ``support`` lists the indices of the truly nonzero blocks.  Realized via
    a least-squares factorization rather than an explicit pseudoinverse for
    conditioning; raises :class:`RankDeficient` if the selected columns do
    not have full column rank.
    """
    support = sorted(set(int(i) for i in support))
    x_hat = np.zeros(inst.m, dtype=inst.dtype)
    if not support:
        return x_hat
    cols = inst.blocks.columns(support)
    phi_s = inst.dictionary[:, cols]
    sol, _, rank, _ = np.linalg.lstsq(phi_s, inst.y, rcond=None)
    if rank < len(cols):
        raise RankDeficient(
            f"support columns have rank {rank} < {len(cols)}"
        )
    x_hat[cols] = sol
    return x_hat


def hard_threshold_reference(y: np.ndarray, d: int) -> np.ndarray:
    """Hard-thresholding reference for the single-block identity setup.

    Returns ``y`` when ``||y|| / sqrt(d) > 1`` (strict) and zero otherwise.
    """
    y = np.asarray(y)
    if np.linalg.norm(y) / np.sqrt(d) > 1.0:
        return y.copy()
    return np.zeros_like(y)
