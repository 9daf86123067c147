"""Exception types raised by the blocksbl package."""


class BlockSblError(Exception):
    """Base class for all blocksbl errors."""


class DimensionMismatch(BlockSblError, ValueError):
    """Array shapes or block sizes are inconsistent with each other."""


class NonPositiveDefiniteBlockPrecision(BlockSblError, ValueError):
    """An intra-block precision matrix is not Hermitian positive definite."""


class SingularMatrix(BlockSblError, RuntimeError):
    """A posterior precision matrix could not be factorized.

    Typically signals a (near-)zero noise precision combined with a
    rank-deficient active dictionary.
    """


class EigenFailure(BlockSblError, RuntimeError):
    """The symmetric eigensolver did not converge."""


class DegeneratePolynomial(BlockSblError, ValueError):
    """All polynomial coefficients are numerically zero."""


class UnsupportedPrior(BlockSblError, ValueError):
    """The requested hyperprior has no closed-form fast update."""


class BesselOverflow(BlockSblError, RuntimeError):
    """Modified Bessel function ratio could not be evaluated.

    Only raised when both the scaled-Bessel evaluation and the
    large-argument asymptotic fallback fail to produce a finite value.
    """


class RankDeficient(BlockSblError, ValueError):
    """Selected dictionary columns do not have full column rank."""


class ZeroReference(BlockSblError, ValueError):
    """A reference vector required to be nonzero is zero."""


class ParseError(BlockSblError, ValueError):
    """A matrix/vector/config file could not be parsed."""
