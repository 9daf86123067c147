"""Grid-based direction-of-arrival estimation frontend.

Builds steering-vector dictionaries for linear arrays, simulates
multi-snapshot sources with AR(1)-correlated amplitudes, and extracts DOA
estimates from a solved block-sparse model.  Angles are degrees at the API
surface and radians internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import mmv_to_block  # noqa: F401  (re-exported for scenario scripts)


@dataclass(frozen=True)
class ArrayGeometry:
    """Linear sensor array described by distances from sensor 1."""

    positions: np.ndarray
    wavelength: float = 1.0

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        if pos.ndim != 1 or len(pos) < 1:
            raise ValueError("positions must be a nonempty vector")
        if pos[0] != 0.0:
            raise ValueError("the first sensor defines the origin: positions[0] must be 0")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")

    @property
    def n(self) -> int:
        return len(self.positions)

    @classmethod
    def uniform(cls, n: int, spacing: float = 0.5, wavelength: float = 1.0) -> "ArrayGeometry":
        """Uniform linear array; default spacing is half a wavelength."""
        return cls(positions=spacing * np.arange(n, dtype=float), wavelength=wavelength)


@dataclass(frozen=True)
class DoaGrid:
    """Search grid of candidate DOAs in degrees, strictly increasing."""

    angles_deg: np.ndarray

    def __post_init__(self):
        ang = np.asarray(self.angles_deg, dtype=float)
        object.__setattr__(self, "angles_deg", ang)
        if ang.ndim != 1 or len(ang) < 1:
            raise ValueError("grid must contain at least one angle")
        if np.any(np.diff(ang) <= 0):
            raise ValueError("grid angles must be strictly increasing")
        if ang[0] < -90.0 or ang[-1] >= 90.0:
            raise ValueError("grid angles must lie in [-90, 90)")

    @property
    def size(self) -> int:
        return len(self.angles_deg)

    @classmethod
    def sin_spaced(cls, size: int) -> "DoaGrid":
        """Grid whose sines are equally spaced over [-1, 1)."""
        return cls(np.degrees(np.arcsin(np.linspace(-1.0, 1.0, size, endpoint=False))))

    def snap(self, thetas_deg) -> np.ndarray:
        """Indices of the grid points closest to the given angles."""
        thetas = np.atleast_1d(np.asarray(thetas_deg, dtype=float))
        return np.array(
            [int(np.argmin(np.abs(self.angles_deg - t))) for t in thetas]
        )


@dataclass(frozen=True)
class SourceModel:
    """Stationary far-field sources with AR(1)-correlated amplitudes.

    The amplitude of each source evolves as ``s[t] = xi + beta * s[t-1]``
    with unit-variance innovations; samples are normalized so the marginal
    variance is one, making the snapshot covariance the unit-diagonal
    Hermitian Toeplitz matrix with entries beta^|i-j|.
    """

    doas_deg: np.ndarray
    ar_coeff: complex = 0.0
    snapshots: int = 1

    def __post_init__(self):
        doas = np.atleast_1d(np.asarray(self.doas_deg, dtype=float))
        object.__setattr__(self, "doas_deg", doas)
        if abs(self.ar_coeff) >= 1:
            raise ValueError("|ar_coeff| must be < 1 for a stationary process")
        if self.snapshots < 1:
            raise ValueError("at least one snapshot is required")

    def amplitude_covariance(self) -> np.ndarray:
        """Hermitian Toeplitz snapshot covariance with unit diagonal."""
        col = np.asarray(self.ar_coeff, dtype=complex) ** np.arange(self.snapshots)
        cov = scipy.linalg.toeplitz(col, col.conj())
        if np.max(np.abs(cov.imag)) == 0:
            cov = cov.real
        return cov


def steering_vector(geom: ArrayGeometry, theta_deg: float) -> np.ndarray:
    """Unit-norm steering vector of a linear array for a DOA in degrees."""
    phase = -2j * np.pi * (geom.positions / geom.wavelength) * np.sin(np.radians(theta_deg))
    return np.exp(phase) / np.sqrt(geom.n)


def build_grid_dictionary(geom: ArrayGeometry, grid: DoaGrid) -> np.ndarray:
    """N x K_g dictionary whose columns are steering vectors on the grid."""
    return np.column_stack([steering_vector(geom, t) for t in grid.angles_deg])


@dataclass(frozen=True)
class DoaGroundTruth:
    """What the simulator knows: support, snapped DOAs, amplitudes, noise."""

    support: np.ndarray
    doas_deg: np.ndarray
    amplitudes: np.ndarray
    noise_precision: float


def _ar1_series(beta: complex, d: int, rng: np.random.Generator) -> np.ndarray:
    xi = (rng.standard_normal(d) + 1j * rng.standard_normal(d)) / np.sqrt(2.0)
    s = np.empty(d, dtype=complex)
    scale = np.sqrt(1.0 - abs(beta) ** 2)
    # stationary start, then the recursion; normalize to unit marginal variance
    s[0] = xi[0] / scale
    for t in range(1, d):
        s[t] = xi[t] + beta * s[t - 1]
    return s * scale


def simulate_sources(
    model: SourceModel,
    geom: ArrayGeometry,
    grid: DoaGrid,
    array_snr_db: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, DoaGroundTruth]:
    """Simulate multi-snapshot array data at a requested array SNR.

    True DOAs are snapped to the nearest grid points, amplitudes follow the
    AR(1) source model with unit marginal variance, and complex Gaussian
    noise is scaled so that ``lambda * ||Psi x_t||^2`` (averaged over
    snapshots) matches ``array_snr_db``.
    """
    psi = build_grid_dictionary(geom, grid)
    d = model.snapshots
    support = np.unique(grid.snap(model.doas_deg))
    X = np.zeros((grid.size, d), dtype=complex)
    for k in support:
        X[k] = _ar1_series(model.ar_coeff, d, rng)
    signal = psi @ X
    snr_lin = 10.0 ** (array_snr_db / 10.0)
    mean_power = float(np.real(np.vdot(signal, signal))) / d
    lam = snr_lin / mean_power
    noise = (
        rng.standard_normal((geom.n, d)) + 1j * rng.standard_normal((geom.n, d))
    ) / np.sqrt(2.0 * lam)
    truth = DoaGroundTruth(
        support=support,
        doas_deg=grid.angles_deg[support],
        amplitudes=X,
        noise_precision=lam,
    )
    return signal + noise, truth


def extract_doas(state, grid: DoaGrid) -> np.ndarray:
    """Grid angles of the active blocks, ascending."""
    return grid.angles_deg[np.flatnonzero(state.active)]
