"""Shared generators for the test suite."""

import numpy as np
import pytest

import blocksbl as bl


def random_instance(rng, field="real", K=None, sizes=None, n=None, pd_precisions=True):
    """Random validated instance with Hermitian PD intra-block precisions."""
    if sizes is None:
        K = K or int(rng.integers(2, 6))
        sizes = [int(rng.integers(1, 5)) for _ in range(K)]
    m = sum(sizes)
    if n is None:
        n = int(rng.integers(m // 2 + 2, max(m + 3, 40)))
    if field == "complex":
        phi = (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    else:
        phi = rng.standard_normal((n, m))
        y = rng.standard_normal(n)
    precisions = None
    if pd_precisions:
        precisions = []
        for d in sizes:
            q = rng.standard_normal((d, d))
            if field == "complex":
                q = q + 1j * rng.standard_normal((d, d))
            precisions.append(q @ q.conj().T + d * np.eye(d))
    return bl.build_instance(y, phi, sizes, intra_block_precisions=precisions)


def random_context(rng, inst):
    """Random partially active hyperparameter context plus noise precision."""
    K = inst.blocks.K
    gamma = np.full(K, np.inf)
    active = np.zeros(K, dtype=bool)
    for k in range(K):
        if rng.random() < 0.5:
            gamma[k] = 10.0 ** rng.uniform(-1, 1.5)
            active[k] = True
    lam = 10.0 ** rng.uniform(-0.5, 1.5)
    return gamma, active, float(lam)


def make_state(inst, gamma, lam, active=None):
    gamma = np.asarray(gamma, dtype=float)
    if active is None:
        active = np.isfinite(gamma)
    return bl.PosteriorState(
        gamma=gamma,
        lam=float(lam),
        x_hat=np.zeros(inst.m, dtype=inst.dtype),
        sigma_hat=np.zeros((0, 0), dtype=inst.dtype),
        active=np.asarray(active, dtype=bool),
        iteration=0,
        objective=0.0,
    )


def random_block_data(rng, d, field="real", rho=None):
    """Random per-block spectral data with strictly positive eigenvalues."""
    s = 10.0 ** rng.uniform(-2, 1, size=d)
    if field == "complex":
        q = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        rho = 1.0 if rho is None else rho
    else:
        q = rng.standard_normal(d)
        rho = 0.5 if rho is None else rho
    from blocksbl.fastupdate import BlockLocalData

    return BlockLocalData(s=np.sort(s), q=q, d=d, rho=rho)


def sparse_problem(rng, n, block_size, K, k_active, snr_db, strong=True):
    """Planted block-sparse recovery problem at a target SNR."""
    m = block_size * K
    phi = rng.standard_normal((n, m))
    phi /= np.linalg.norm(phi, axis=0, keepdims=True)
    support = np.sort(rng.choice(K, size=k_active, replace=False))
    x = np.zeros(m)
    for i in support:
        w = rng.standard_normal(block_size)
        if strong:
            w *= max(1.0, np.sqrt(block_size) / np.linalg.norm(w))
        x[i * block_size : (i + 1) * block_size] = w
    px = phi @ x
    lam = 10.0 ** (snr_db / 10.0) * n / float(px @ px)
    y = px + rng.standard_normal(n) / np.sqrt(lam)
    return bl.build_instance(y, phi, [block_size] * K), x, support, lam


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
