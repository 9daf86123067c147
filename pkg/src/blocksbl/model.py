"""Domain types and construction of blocked problem instances.

A problem instance holds the linear model ``y = Phi @ x + v`` where the
weight vector ``x`` is partitioned into ``K`` contiguous blocks, each with
a known Hermitian positive-definite intra-block precision matrix ``B_i``.
Both the real (``rho = 1/2``) and circular complex (``rho = 1``) scalar
fields are supported through the stored field indicator; no code path
branches on dtype at solve time.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NonPositiveDefiniteBlockPrecision

REAL = "real"
COMPLEX = "complex"

_HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class BlockStructure:
    """Partition of an M-length weight vector into K contiguous blocks."""

    sizes: tuple[int, ...]
    offsets: tuple[int, ...]
    K: int
    M: int

    def __post_init__(self):
        if self.K != len(self.sizes) or self.K != len(self.offsets):
            raise DimensionMismatch("K inconsistent with sizes/offsets")
        if self.K == 0:
            raise DimensionMismatch("at least one block is required")
        if any(d < 1 for d in self.sizes):
            raise DimensionMismatch("every block size must be >= 1")
        if self.offsets[0] != 0:
            raise DimensionMismatch("first block offset must be 0")
        for i in range(self.K - 1):
            if self.offsets[i + 1] != self.offsets[i] + self.sizes[i]:
                raise DimensionMismatch("offsets must be cumulative block sizes")
        if self.offsets[-1] + self.sizes[-1] != self.M:
            raise DimensionMismatch(
                f"sum of block sizes {sum(self.sizes)} != M = {self.M}"
            )

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "BlockStructure":
        sizes = tuple(int(d) for d in sizes)
        offsets = []
        off = 0
        for d in sizes:
            offsets.append(off)
            off += d
        return cls(sizes=sizes, offsets=tuple(offsets), K=len(sizes), M=off)

    def block_slice(self, i: int) -> slice:
        """Column/row range of block ``i`` in the full weight space."""
        return slice(self.offsets[i], self.offsets[i] + self.sizes[i])

    def columns(self, ids: Sequence[int]) -> np.ndarray:
        """Concatenated weight indices of the given blocks, in order."""
        if len(ids) == 0:
            return np.empty(0, dtype=int)
        return np.concatenate(
            [np.arange(self.offsets[i], self.offsets[i] + self.sizes[i]) for i in ids]
        )


@dataclass(frozen=True)
class HyperpriorSpec:
    """One parameterization of the generalized inverse Gaussian family.

    ``kind`` selects the row of the supported family:

    ==================  =======================  =====================
    kind                parameters               constraint
    ==================  =======================  =====================
    ``gig``             a, b, c                  a > 0, b > 0
    ``inverse-gamma``   b                        b > 0
    ``gamma``           a, c                     a > 0, c > 0
    ``scaled-jeffreys`` c                        c > -rho * d_i
    ``jeffreys``        (none)
    ==================  =======================  =====================

    Unused parameters are fixed at the limit value 0.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    _KINDS = ("gig", "inverse-gamma", "gamma", "scaled-jeffreys", "jeffreys")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown hyperprior kind {self.kind!r}")
        if self.kind == "gig" and not (self.a > 0 and self.b > 0):
            raise ValueError("gig requires a > 0 and b > 0")
        if self.kind == "inverse-gamma" and not self.b > 0:
            raise ValueError("inverse-gamma requires b > 0")
        if self.kind == "gamma" and not (self.a > 0 and self.c > 0):
            raise ValueError("gamma requires a > 0 and c > 0")

    @classmethod
    def gig(cls, a: float, b: float, c: float) -> "HyperpriorSpec":
        return cls("gig", a=float(a), b=float(b), c=float(c))

    @classmethod
    def inverse_gamma(cls, b: float) -> "HyperpriorSpec":
        return cls("inverse-gamma", b=float(b))

    @classmethod
    def gamma(cls, a: float, c: float) -> "HyperpriorSpec":
        return cls("gamma", a=float(a), c=float(c))

    @classmethod
    def scaled_jeffreys(cls, c: float) -> "HyperpriorSpec":
        return cls("scaled-jeffreys", c=float(c))

    @classmethod
    def jeffreys(cls) -> "HyperpriorSpec":
        return cls("jeffreys")

    def validate_for_block(self, d: int, rho: float) -> None:
        """Check block-size-dependent parameter ranges."""
        if self.kind == "scaled-jeffreys" and not self.c > -rho * d:
            raise ValueError(
                f"scaled-jeffreys requires c > -rho*d = {-rho * d}; got c = {self.c}"
            )


@dataclass(frozen=True)
class NoisePriorSpec:
    """Gamma prior on the noise precision; (0, 0) is Jeffrey's prior."""

    shape: float = 0.0
    rate: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.shape) and np.isfinite(self.rate)):
            raise ValueError("noise prior parameters must be finite")
        if self.shape < 0 or self.rate < 0:
            raise ValueError("noise prior parameters must be nonnegative")


@dataclass(frozen=True)
class ProblemInstance:
    """Validated blocked linear-Gaussian problem.

    Instances are immutable after :func:`validate_instance` (arrays are
    locked read-only) and safe to share across threads.
    """

    y: np.ndarray
    dictionary: np.ndarray
    blocks: BlockStructure
    intra_block_precisions: tuple[np.ndarray, ...]
    field: str
    rho: float
    chol_factors: tuple[np.ndarray, ...] | None = None

    @property
    def n(self) -> int:
        return self.dictionary.shape[0]

    @property
    def m(self) -> int:
        return self.dictionary.shape[1]

    @property
    def dtype(self):
        return np.complex128 if self.field == COMPLEX else np.float64

    def chol(self, i: int) -> np.ndarray:
        """Lower Cholesky factor L_i with L_i @ L_i^H = B_i."""
        if self.chol_factors is None:
            raise RuntimeError("instance not validated; call validate_instance first")
        return self.chol_factors[i]


def _as_field_array(arr, field: str, name: str) -> np.ndarray:
    out = np.asarray(arr)
    if field == COMPLEX:
        out = out.astype(np.complex128, copy=False)
    else:
        if np.iscomplexobj(out):
            if np.max(np.abs(out.imag)) > 0:
                raise DimensionMismatch(
                    f"{name} has complex entries but the field is real"
                )
            out = out.real
        out = out.astype(np.float64, copy=False)
    return out


def build_instance(
    y,
    dictionary,
    block_sizes: Sequence[int] | BlockStructure,
    intra_block_precisions: Sequence[np.ndarray] | None = None,
    field: str | None = None,
) -> ProblemInstance:
    """Assemble and validate a :class:`ProblemInstance`.

    Parameters
    ----------
    y : array_like, shape (N,)
        Observation vector.
    dictionary : array_like, shape (N, M)
        Dense dictionary matrix.
    block_sizes : sequence of int or BlockStructure
        Partition of the M weights into blocks.
    intra_block_precisions : sequence of arrays, optional
        One Hermitian PD ``d_i x d_i`` matrix per block; identity if omitted.
    field : {"real", "complex"}, optional
        Scalar field; inferred from the dtypes of ``y``/``dictionary`` if
        omitted.
    """
    if isinstance(block_sizes, BlockStructure):
        blocks = block_sizes
    else:
        blocks = BlockStructure.from_sizes(block_sizes)
    if field is None:
        field = (
            COMPLEX
            if (np.iscomplexobj(np.asarray(y)) or np.iscomplexobj(np.asarray(dictionary)))
            else REAL
        )
    if field not in (REAL, COMPLEX):
        raise ValueError(f"field must be 'real' or 'complex', got {field!r}")
    if intra_block_precisions is None:
        intra_block_precisions = [np.eye(d) for d in blocks.sizes]
    rho = 1.0 if field == COMPLEX else 0.5
    inst = ProblemInstance(
        y=_as_field_array(y, field, "y"),
        dictionary=_as_field_array(dictionary, field, "dictionary"),
        blocks=blocks,
        intra_block_precisions=tuple(
            _as_field_array(b, field, f"B_{i}") for i, b in enumerate(intra_block_precisions)
        ),
        field=field,
        rho=rho,
    )
    return validate_instance(inst)


def validate_instance(inst: ProblemInstance) -> ProblemInstance:
    """Check all instance invariants and cache the Cholesky factors.

    Returns a new instance with ``chol_factors`` populated and all arrays
    locked read-only.  Raises :class:`DimensionMismatch` or
    :class:`NonPositiveDefiniteBlockPrecision` on violation.
    """
    y = np.asarray(inst.y)
    phi = np.asarray(inst.dictionary)
    blocks = inst.blocks
    if y.ndim != 1:
        raise DimensionMismatch(f"y must be one-dimensional, got shape {y.shape}")
    if phi.ndim != 2:
        raise DimensionMismatch(f"dictionary must be a matrix, got shape {phi.shape}")
    n, m = phi.shape
    if n < 1 or m < 1:
        raise DimensionMismatch("dictionary must have at least one row and column")
    if y.shape[0] != n:
        raise DimensionMismatch(f"y has length {y.shape[0]} but dictionary has {n} rows")
    if m != blocks.M:
        raise DimensionMismatch(
            f"dictionary has {m} columns but blocks describe M = {blocks.M}"
        )
    if len(inst.intra_block_precisions) != blocks.K:
        raise DimensionMismatch(
            f"got {len(inst.intra_block_precisions)} precision matrices "
            f"for K = {blocks.K} blocks"
        )
    expected_rho = 1.0 if inst.field == COMPLEX else 0.5
    if inst.rho != expected_rho:
        raise DimensionMismatch(
            f"rho = {inst.rho} inconsistent with field {inst.field!r}"
        )

    chols = []
    for i, b in enumerate(inst.intra_block_precisions):
        d = blocks.sizes[i]
        if b.shape != (d, d):
            raise DimensionMismatch(
                f"B_{i} has shape {b.shape}, expected ({d}, {d})"
            )
        scale = max(float(np.max(np.abs(b))), 1.0)
        if np.max(np.abs(b - b.conj().T)) > _HERMITIAN_RTOL * scale:
            raise NonPositiveDefiniteBlockPrecision(f"B_{i} is not Hermitian")
        try:
            chols.append(np.linalg.cholesky(b))
        except np.linalg.LinAlgError:
            raise NonPositiveDefiniteBlockPrecision(
                f"B_{i} is not positive definite"
            ) from None

    for arr in (y, phi, *inst.intra_block_precisions, *chols):
        arr.setflags(write=False)
    return replace(inst, chol_factors=tuple(chols))


def mmv_to_block(Y, Psi, B_row=None) -> ProblemInstance:
    """Rearrange a multiple-measurement-vector model into block form.

    The row-sparse model ``Y = Psi @ X + V`` with ``J`` measurement vectors
    becomes ``y = (Psi kron I_J) @ x + v`` with ``y = vec(Y^T)``: one size-J
    block per dictionary column, so row-sparsity of ``X`` is exactly
    block-sparsity of ``x``.

    Parameters
    ----------
    Y : array_like, shape (N_s, J)
        Stacked measurement vectors.
    Psi : array_like, shape (N_s, K_g)
        Single-snapshot dictionary.
    B_row : array_like, shape (J, J), optional
        Shared intra-block precision applied to every block (identity if
        omitted); encodes amplitude correlation across the J snapshots.
    """
    Y = np.asarray(Y)
    Psi = np.asarray(Psi)
    if Y.ndim != 2 or Psi.ndim != 2:
        raise DimensionMismatch("Y and Psi must be matrices")
    if Y.shape[0] != Psi.shape[0]:
        raise DimensionMismatch(
            f"Y has {Y.shape[0]} rows but Psi has {Psi.shape[0]}"
        )
    j = Y.shape[1]
    if j < 1:
        raise DimensionMismatch("at least one measurement vector is required")
    k_g = Psi.shape[1]
    if B_row is None:
        B_row = np.eye(j)
    B_row = np.asarray(B_row)
    if B_row.shape != (j, j):
        raise DimensionMismatch(f"B_row has shape {B_row.shape}, expected ({j}, {j})")

    y = Y.reshape(-1)  # vec(Y^T): row-major flatten
    phi = np.kron(Psi, np.eye(j))
    return build_instance(
        y,
        phi,
        [j] * k_g,
        intra_block_precisions=[B_row] * k_g,
    )
