"""Evaluation metrics: NMSE, support classification, SNR, and OSPA."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ZeroReference
from .model import ProblemInstance


@dataclass(frozen=True)
class TrialResult:
    """Per-trial outcome row of a benchmark run."""

    nmse: float
    support_accuracy: float
    iterations: int
    active_count: int
    runtime_seconds: float
    ospa: float | None = None


def nmse(x_true: np.ndarray, x_hat: np.ndarray) -> float:
    """Normalized mean squared error ||x - x_hat||^2 / ||x||^2."""
    x_true = np.asarray(x_true)
    x_hat = np.asarray(x_hat)
    denom = float(np.real(np.vdot(x_true, x_true)))
    if denom == 0.0:
        raise ZeroReference("reference vector is zero")
    diff = x_true - x_hat
    return float(np.real(np.vdot(diff, diff))) / denom


def support_accuracy(true_support: Sequence[int], est_support: Sequence[int], K: int) -> float:
    """Fraction of the K blocks classified correctly as zero/nonzero."""
    t = set(int(i) for i in true_support)
    e = set(int(i) for i in est_support)
    wrong = len(t.symmetric_difference(e))
    return (K - wrong) / K


def snr_db(inst: ProblemInstance, x_true: np.ndarray, lambda_true: float) -> float:
    """SNR = lambda * ||Phi x||^2 / N, in dB."""
    px = inst.dictionary @ np.asarray(x_true)
    return 10.0 * np.log10(lambda_true * float(np.real(np.vdot(px, px))) / inst.n)


def array_snr_db(Psi: np.ndarray, x_snapshot: np.ndarray, lambda_true: float) -> float:
    """Array SNR = lambda * ||Psi x||^2 for one snapshot, in dB."""
    px = np.asarray(Psi) @ np.asarray(x_snapshot)
    return 10.0 * np.log10(lambda_true * float(np.real(np.vdot(px, px))))


def ospa(
    est: Sequence[float],
    truth: Sequence[float],
    cutoff: float = 5.0,
    order: int = 1,
) -> float:
    """Optimal subpattern assignment distance between two angle lists.

    Distances are absolute differences in degrees (no wraparound), clipped
    at ``cutoff``; unmatched elements cost ``cutoff`` each; the total is
    normalized by the larger cardinality.  The assignment is solved exactly
    with the Hungarian method.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    a = np.asarray(est, dtype=float)
    b = np.asarray(truth, dtype=float)
    n, m = len(a), len(b)
    if n == 0 and m == 0:
        return 0.0
    if n == 0 or m == 0:
        return float(cutoff)
    dist = np.minimum(np.abs(a[:, None] - b[None, :]), cutoff) ** order
    rows, cols = linear_sum_assignment(dist)
    total = float(dist[rows, cols].sum()) + cutoff**order * abs(n - m)
    return float((total / max(n, m)) ** (1.0 / order))
