"""Fast variational block-sparse Bayesian learning.

Solves ``y = Phi @ x + v`` for a block-sparse weight vector by inferring
per-block precision hyperparameters; each hyperparameter is driven to the
limit of its infinite update sequence in a single step via the positive
real roots of a small polynomial.
"""

__version__ = "0.1.0"

from .model import (
    BlockStructure,
    HyperpriorSpec,
    NoisePriorSpec,
    ProblemInstance,
    build_instance,
    mmv_to_block,
    validate_instance,
)
from .fastupdate import (
    BlockLocalData,
    FixedPointResult,
    PolySet,
    SigmaBar,
    block_local_data,
    f_derivative,
    f_eval,
    gig_mean,
    h_eval,
    poly_A,
    poly_B,
    poly_G,
    positive_real_roots,
    sigma_bar,
    theorem1_limit,
)
from .inference import (
    PosteriorState,
    SolverConfig,
    fast_solve,
    objective,
    slow_solve,
    update_noise,
    update_weights,
)
from .baselines import hard_threshold_reference, oracle_mmse
from .metrics import TrialResult, array_snr_db, nmse, ospa, snr_db, support_accuracy
from .doa import (
    ArrayGeometry,
    DoaGrid,
    SourceModel,
    build_grid_dictionary,
    extract_doas,
    simulate_sources,
    steering_vector,
)

__all__ = [
    "__version__",
    "ArrayGeometry",
    "BlockLocalData",
    "BlockStructure",
    "DoaGrid",
    "FixedPointResult",
    "HyperpriorSpec",
    "NoisePriorSpec",
    "PolySet",
    "PosteriorState",
    "ProblemInstance",
    "SigmaBar",
    "SolverConfig",
    "SourceModel",
    "TrialResult",
    "array_snr_db",
    "block_local_data",
    "build_grid_dictionary",
    "build_instance",
    "extract_doas",
    "f_derivative",
    "f_eval",
    "fast_solve",
    "gig_mean",
    "h_eval",
    "hard_threshold_reference",
    "mmv_to_block",
    "nmse",
    "objective",
    "oracle_mmse",
    "ospa",
    "poly_A",
    "poly_B",
    "poly_G",
    "positive_real_roots",
    "sigma_bar",
    "simulate_sources",
    "slow_solve",
    "snr_db",
    "steering_vector",
    "support_accuracy",
    "theorem1_limit",
    "update_noise",
    "update_weights",
    "validate_instance",
]
