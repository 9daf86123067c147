"""Per-block fixed-point machinery for the fast hyperparameter update.

For one block, repeated alternating updates of the weight posterior and of
that block's precision hyperparameter form a first-order recurrence
``gamma <- f(gamma)``.  Because the Gaussian expectation

    h(gamma) = sum_l (gamma*s_l^2 + |q_l|^2 + s_l) / (1 + gamma*s_l)^2

is a strictly decreasing rational function B(gamma)/A(gamma) of the block's
own hyperparameter, the recurrence is strictly increasing and its fixed
points are the positive real roots of a small polynomial G.  The limit of
the infinite update sequence from any starting point then follows from a
monotone-convergence case analysis and replaces the whole inner iteration
with a single step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.special import kve

from .errors import (
    DegeneratePolynomial,
    BesselOverflow,
    EigenFailure,
    SingularMatrix,
    UnsupportedPrior,
)
from .model import HyperpriorSpec, ProblemInstance

DEFAULT_IMAG_TOL = 1e-8
_ROOT_DEDUP_RTOL = 1e-8
_DEGENERATE_FLOOR = 1e-300
_EIG_CLAMP_RTOL = 1e-12
_NEAR_ROOT_RTOL = 1e-9


class GramCache:
    """Lazily computed blocks of the dictionary Gram matrix Phi^H Phi.

    Only block pairs touched by the solver are ever formed, which keeps the
    cost proportional to the active-set size instead of the full dictionary.
    """

    def __init__(self, inst: ProblemInstance):
        self._phi = inst.dictionary
        self._phi_h = np.ascontiguousarray(inst.dictionary.conj().T)
        self._blocks = inst.blocks
        self._cache: dict[tuple[int, int], np.ndarray] = {}

    def block(self, k: int, l: int) -> np.ndarray:
        """Gram block Phi_k^H Phi_l (cached canonically for k <= l)."""
        if k > l:
            return self.block(l, k).conj().T
        key = (k, l)
        out = self._cache.get(key)
        if out is None:
            bl = self._blocks
            out = self._phi_h[bl.block_slice(k)] @ self._phi[:, bl.block_slice(l)]
            self._cache[key] = out
        return out

    def restricted(self, ids: Sequence[int]) -> np.ndarray:
        """Gram matrix of the concatenated columns of the given blocks."""
        sizes = [self._blocks.sizes[i] for i in ids]
        m = int(sum(sizes))
        out = np.empty((m, m), dtype=self._phi.dtype)
        pos = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
        for a, k in enumerate(ids):
            ra = slice(pos[a], pos[a + 1])
            for b, l in enumerate(ids):
                if b < a:
                    continue
                blk = self.block(k, l)
                out[ra, pos[b]:pos[b + 1]] = blk
                if b > a:
                    out[pos[b]:pos[b + 1], ra] = blk.conj().T
        return out


@dataclass(frozen=True)
class SigmaBar:
    """Leave-one-block-out posterior covariance, restricted to the blocks
    that actually carry nonzero rows/columns (active blocks plus block i).

    ``matrix`` is Hermitian; ``block_ids`` lists the participating blocks in
    ascending order and ``slices`` maps each of them to its row range.
    """

    matrix: np.ndarray
    block_ids: tuple[int, ...]
    slices: dict[int, slice]
    excluded: int


@dataclass(frozen=True)
class BlockLocalData:
    """Spectral data of one block given the rest of the model.

    ``s`` holds the eigenvalues of L_i^H SigmaBar_i L_i and ``q`` the rotated
    data vector; together they determine the block's update polynomials.
    """

    s: np.ndarray
    q: np.ndarray
    d: int
    rho: float

    def __post_init__(self):
        if len(self.s) != self.d or len(self.q) != self.d:
            raise ValueError("s and q must both have length d")

    @property
    def q_abs2(self) -> np.ndarray:
        return (self.q.conj() * self.q).real


@dataclass(frozen=True)
class PolySet:
    """Coefficient arrays (ascending order) of the block update polynomials."""

    A: np.ndarray
    B: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class FixedPointResult:
    """Outcome of the single-step limit computation for one block."""

    roots: np.ndarray
    stability: np.ndarray
    limit: float
    branch: str


def sigma_bar(state, inst: ProblemInstance, i: int, gram: GramCache | None = None) -> SigmaBar:
    """Posterior covariance with block i's own prior term removed.

    Computes ``inv(lam * Phi^H Phi + sum_{k active, k != i} gamma_k E_k B_k E_k^T)``
    on the subspace spanned by the active blocks plus block ``i``; rows and
    columns of pruned blocks are identically zero and never materialized.
    """
    return sigma_bar_core(
        inst,
        np.asarray(state.gamma, dtype=float),
        np.asarray(state.active, dtype=bool),
        float(state.lam),
        i,
        gram,
    )


def sigma_bar_core(
    inst: ProblemInstance,
    gamma: np.ndarray,
    active: np.ndarray,
    lam: float,
    i: int,
    gram: GramCache | None = None,
) -> SigmaBar:
    if gram is None:
        gram = GramCache(inst)
    ids = sorted(set(np.flatnonzero(active).tolist()) | {i})
    prec = _restricted_precision(inst, gram, ids, gamma, lam, exclude=i)
    sizes = [inst.blocks.sizes[k] for k in ids]
    pos = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    slices = {k: slice(pos[a], pos[a + 1]) for a, k in enumerate(ids)}
    try:
        c, lower = scipy.linalg.cho_factor(prec, lower=True)
    except (scipy.linalg.LinAlgError, np.linalg.LinAlgError) as exc:
        raise SingularMatrix(
            f"precision restricted to blocks {ids} is not positive definite "
            f"(lam = {lam})"
        ) from exc
    mat = scipy.linalg.cho_solve((c, lower), np.eye(prec.shape[0], dtype=prec.dtype))
    mat = 0.5 * (mat + mat.conj().T)
    return SigmaBar(matrix=mat, block_ids=tuple(ids), slices=slices, excluded=i)


def _restricted_precision(inst, gram, ids, gamma, lam, exclude=None) -> np.ndarray:
    prec = lam * gram.restricted(ids)
    sizes = [inst.blocks.sizes[k] for k in ids]
    pos = np.concatenate([[0], np.cumsum(sizes)]).astype(int)
    for a, k in enumerate(ids):
        if k == exclude or not np.isfinite(gamma[k]):
            continue
        sl = slice(pos[a], pos[a + 1])
        prec[sl, sl] += gamma[k] * inst.intra_block_precisions[k]
    return prec


def block_local_data(
    sb: SigmaBar,
    inst: ProblemInstance,
    i: int,
    lambda_hat: float,
    phi_h_y: np.ndarray | None = None,
) -> BlockLocalData:
    """Eigenvalues s and rotated data vector q of block i.

    ``s`` are the eigenvalues of L_i^H SigmaBar_i L_i (clamped from below at
    1e-12 * max(max(s), 1) so the update polynomials stay well defined) and
    ``q = lambda_hat * U_i^H L_i^H E_i^T SigmaBar Phi^H y``.
    """
    if sb.excluded != i:
        raise ValueError(f"sigma_bar was computed for block {sb.excluded}, not {i}")
    if phi_h_y is None:
        phi_h_y = inst.dictionary.conj().T @ inst.y
    cols = inst.blocks.columns(sb.block_ids)
    w = sb.matrix @ phi_h_y[cols]
    rows = sb.slices[i]
    sigma_i = sb.matrix[rows, rows]
    L = inst.chol(i)
    core = L.conj().T @ sigma_i @ L
    try:
        s, U = np.linalg.eigh(0.5 * (core + core.conj().T))
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed for block {i}") from exc
    eps_psd = _EIG_CLAMP_RTOL * max(float(s[-1]) if len(s) else 0.0, 1.0)
    s = np.maximum(s, eps_psd)
    q = lambda_hat * (U.conj().T @ (L.conj().T @ w[rows]))
    return BlockLocalData(s=s, q=q, d=inst.blocks.sizes[i], rho=inst.rho)


# ---------------------------------------------------------------------------
# Update polynomials (coefficients in ascending order of the power of gamma)
# ---------------------------------------------------------------------------


def poly_A(data: BlockLocalData) -> np.ndarray:
    """Coefficients of A(gamma) = prod_l (1 + gamma*s_l)^2, degree 2d."""
    p = np.array([1.0])
    for sl in data.s:
        p = np.convolve(p, [1.0, float(sl)])
    return np.convolve(p, p)


def poly_B(data: BlockLocalData) -> np.ndarray:
    """Coefficients of B(gamma), degree 2d - 1.

    B(gamma) = sum_l (gamma*s_l^2 + |q_l|^2 + s_l) * prod_{j != l} (1 + gamma*s_j)^2.
    The product excludes the eigenvalue index l of the outer sum; the
    leave-one-out products are assembled from prefix/suffix partial products.
    """
    d = data.d
    q2 = data.q_abs2
    prefix = [np.array([1.0])]
    for sl in data.s:
        prefix.append(np.convolve(prefix[-1], [1.0, float(sl)]))
    suffix = [np.array([1.0])]
    for sl in data.s[::-1]:
        suffix.append(np.convolve(suffix[-1], [1.0, float(sl)]))
    out = np.zeros(2 * d)
    for l in range(d):
        p = np.convolve(prefix[l], suffix[d - 1 - l])
        p = np.convolve(p, p)
        term = np.convolve([q2[l] + data.s[l], data.s[l] ** 2], p)
        out[: len(term)] += term
    return out


def _jeffreys_G(d: int, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    # d*A - gamma*B; the degree-2d coefficient cancels algebraically
    # (d * prod s^2 - sum_l s_l^2 prod_{j!=l} s_j^2 == 0), so it is omitted
    # rather than left as float cancellation noise that would fabricate a
    # spurious huge root.
    g = d * A[: 2 * d].copy()
    g[1:] -= B[: 2 * d - 1]
    return g


def poly_G(
    prior: HyperpriorSpec,
    data: BlockLocalData,
    A: np.ndarray | None = None,
    B: np.ndarray | None = None,
) -> np.ndarray:
    """Fixed-point polynomial G(gamma) for one of the special-case priors.

    Raises :class:`UnsupportedPrior` for the general GIG hyperprior, whose
    fixed-point equation involves Bessel functions and has no polynomial
    form.  Trailing exactly-zero coefficients are trimmed.
    """
    if A is None:
        A = poly_A(data)
    if B is None:
        B = poly_B(data)
    d, rho = data.d, data.rho
    kind = prior.kind
    if kind == "jeffreys":
        g = _jeffreys_G(d, A, B)
    elif kind == "scaled-jeffreys":
        # (c + rho*d)*A - rho*gamma*B  ==  c*A + rho*(d*A - gamma*B); building
        # it this way keeps the leading coefficient exactly c * prod s^2.
        g = prior.c * A.copy()
        gj = rho * _jeffreys_G(d, A, B)
        g[: len(gj)] += gj
    elif kind == "gamma":
        g = np.zeros(2 * d + 2)
        g[: 2 * d + 1] = (prior.c + rho * d) * A
        g[1 : 1 + len(B)] -= rho * B
        g[1 : 2 + 2 * d] -= (prior.a / 2.0) * A
    elif kind == "inverse-gamma":
        g = np.zeros(2 * d + 2)
        g[: 2 * d + 1] = prior.b * A
        g[2 : 2 + len(B)] -= 2.0 * rho * B
    else:
        raise UnsupportedPrior(
            "the general GIG hyperprior has no polynomial fixed-point equation; "
            "use the slow solver"
        )
    nz = np.flatnonzero(g)
    return g[: nz[-1] + 1] if len(nz) else g[:1]


def build_poly_set(prior: HyperpriorSpec, data: BlockLocalData) -> PolySet:
    A = poly_A(data)
    B = poly_B(data)
    return PolySet(A=A, B=B, G=poly_G(prior, data, A, B))


# ---------------------------------------------------------------------------
# Rational expectation h, recurrence f, and their derivatives
# ---------------------------------------------------------------------------


def h_eval(data: BlockLocalData, gamma: float) -> float:
    """Gaussian expectation <x_i^H B_i x_i> as a function of gamma.

    Evaluated in the sum form, which is numerically stabler than the
    coefficient ratio B(gamma)/A(gamma) it equals.
    """
    s = data.s
    return float(np.sum((gamma * s**2 + data.q_abs2 + s) / (1.0 + gamma * s) ** 2))


def h_derivative(data: BlockLocalData, gamma: float) -> float:
    """Analytic derivative of :func:`h_eval`; strictly negative."""
    s = data.s
    num = gamma * s**3 + 2.0 * s * data.q_abs2 + s**2
    return float(-np.sum(num / (1.0 + gamma * s) ** 3))


def gamma_update(prior: HyperpriorSpec, expectation: float, d: int, rho: float) -> float:
    """One hyperparameter update given the expectation <x_i^H B_i x_i>."""
    kind = prior.kind
    if kind == "inverse-gamma":
        return float(np.sqrt(prior.b / (2.0 * rho * expectation)))
    if kind == "gamma":
        return (prior.c + rho * d) / (rho * expectation + prior.a / 2.0)
    if kind == "scaled-jeffreys":
        return (prior.c + rho * d) / (rho * expectation)
    if kind == "jeffreys":
        return d / expectation
    raise UnsupportedPrior("use gig_mean for the general GIG hyperprior")


def f_eval(prior: HyperpriorSpec, data: BlockLocalData, gamma: float) -> float:
    """The block recurrence f(gamma): next estimate after one update cycle."""
    return gamma_update(prior, h_eval(data, gamma), data.d, data.rho)


def f_derivative(prior: HyperpriorSpec, data: BlockLocalData, gamma_star: float) -> float:
    """|f'(gamma*)|, the local stability value of a fixed point."""
    h = h_eval(data, gamma_star)
    hp = h_derivative(data, gamma_star)
    d, rho = data.d, data.rho
    kind = prior.kind
    if kind == "jeffreys":
        fp = -d * hp / h**2
    elif kind == "scaled-jeffreys":
        fp = -(prior.c + rho * d) * hp / (rho * h**2)
    elif kind == "gamma":
        fp = -(prior.c + rho * d) * rho * hp / (rho * h + prior.a / 2.0) ** 2
    elif kind == "inverse-gamma":
        fp = -np.sqrt(prior.b / (2.0 * rho)) * hp / (2.0 * h**1.5)
    else:
        raise UnsupportedPrior("no recurrence derivative for the general GIG prior")
    return abs(float(fp))


def positive_real_roots(G: np.ndarray, tol_im: float = DEFAULT_IMAG_TOL) -> np.ndarray:
    """Positive real roots of a polynomial given ascending coefficients.

    Roots are found as companion-matrix eigenvalues, kept when
    ``|Im(r)| <= tol_im * (1 + |Re(r)|)`` and ``Re(r) > 0``, deduplicated
    within relative 1e-8, and returned ascending.
    """
    g = np.asarray(G, dtype=float)
    if len(g) == 0 or np.max(np.abs(g)) < _DEGENERATE_FLOOR:
        raise DegeneratePolynomial("all coefficients are numerically zero")
    g = g / np.max(np.abs(g))
    nz = np.flatnonzero(g)
    g = g[: nz[-1] + 1]
    if len(g) < 2:
        return np.empty(0)
    roots = np.roots(g[::-1])
    keep = (np.abs(roots.imag) <= tol_im * (1.0 + np.abs(roots.real))) & (roots.real > 0)
    real = np.sort(roots.real[keep])
    out: list[float] = []
    for r in real:
        if out and r - out[-1] <= _ROOT_DEDUP_RTOL * max(r, 1.0):
            continue
        out.append(float(r))
    return np.asarray(out)


def theorem1_limit(
    prior: HyperpriorSpec,
    data: BlockLocalData,
    gamma0: float,
    chi: float = 1.0,
    tol_im: float = DEFAULT_IMAG_TOL,
) -> FixedPointResult:
    """Limit of the infinite update sequence started at ``gamma0``.

    The candidate fixed points are the positive real roots of G, filtered
    by local stability ``|f'(root)| < chi``.  At ``chi = 1`` this drops only
    repelling fixed points, which no sequence started elsewhere can reach,
    so the finite-start case analysis is exact; ``chi < 1`` additionally
    discards weakly stable points (a sparsity heuristic under which the
    exact-limit guarantee is lost).  The case split on the retained set:

    * ``f(gamma0) > gamma0`` and no retained root above gamma0 -> +inf
    * ``f(gamma0) > gamma0`` otherwise -> smallest retained root above gamma0
    * ``f(gamma0) <= gamma0``          -> largest retained root <= gamma0

    ``gamma0 = +inf`` (a pruned block) is evaluated as the limit from just
    beyond the largest root, which the sign of G's leading coefficient
    decides: negative means f < gamma out there and the sequence descends
    to the largest retained root (pruning is reversible), nonnegative means
    the sequence keeps growing and the block stays pruned.  Scaled-Jeffreys
    with c > 0 always has a positive leading coefficient, matching the
    trivial pruned maximum of its objective.
    """
    G = poly_G(prior, data)
    roots = positive_real_roots(G, tol_im)
    stability = np.array([f_derivative(prior, data, r) for r in roots])
    retained = roots[stability < chi] if len(roots) else roots

    if np.isinf(gamma0):
        # pruned-block re-estimate: sequence direction beyond the largest
        # root is the sign of G's leading coefficient
        if len(retained) and G[-1] < 0:
            return FixedPointResult(roots, stability, float(retained[-1]), "max_below")
        return FixedPointResult(roots, stability, np.inf, "diverged")

    if len(retained):
        # a retained fixed point (numerically) at gamma0 absorbs the sequence
        dist = np.abs(retained - gamma0)
        k = int(np.argmin(dist))
        if dist[k] <= _NEAR_ROOT_RTOL * (1.0 + abs(gamma0)):
            return FixedPointResult(roots, stability, float(retained[k]), "stationary")
    f0 = f_eval(prior, data, gamma0)
    if f0 > gamma0:
        above = retained[retained > gamma0]
        if len(above):
            return FixedPointResult(roots, stability, float(above[0]), "min_above")
        return FixedPointResult(roots, stability, np.inf, "diverged")
    below = retained[retained <= gamma0]
    if len(below):
        return FixedPointResult(roots, stability, float(below[-1]), "max_below")
    # Decreasing sequence with every fixed point below gamma0 filtered out by
    # chi: treat the block as pruned, per the thresholding heuristic.
    return FixedPointResult(roots, stability, np.inf, "diverged")


def gig_mean(a_hat: float, b: float, c_hat: float) -> float:
    """Mean of a generalized inverse Gaussian distribution.

    Evaluates ``sqrt(b/a_hat) * K_{c_hat+1}(z) / K_{c_hat}(z)`` with
    ``z = sqrt(a_hat * b)`` through exponentially scaled Bessel functions,
    which stay finite far beyond the overflow point of the plain ones.  If
    the scaled evaluation still degenerates the large-argument asymptotic
    ratio ``1 + (c_hat + 1/2)/z`` is used instead.
    """
    if not (a_hat > 0 and b > 0):
        raise ValueError("gig_mean requires a_hat > 0 and b > 0")
    z = float(np.sqrt(a_hat * b))
    num = kve(c_hat + 1.0, z)
    den = kve(c_hat, z)
    if np.isfinite(num) and np.isfinite(den) and den > 0:
        ratio = num / den
        if np.isfinite(ratio) and ratio > 0:
            return float(np.sqrt(b / a_hat) * ratio)
    ratio = 1.0 + (c_hat + 0.5) / z
    if not (np.isfinite(ratio) and ratio > 0):
        raise BesselOverflow(
            f"Bessel ratio unavailable for c_hat = {c_hat}, z = {z}"
        )
    return float(np.sqrt(b / a_hat) * ratio)
