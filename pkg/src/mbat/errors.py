"""Exception types shared across the package."""


class MbatError(Exception):
    """Base class for package-specific errors."""


class DimensionMismatchError(MbatError):
    """Operands, files, or configs disagree on the vector dimension."""


class FileFormatError(MbatError):
    """A binary codebook, index, or vector file is malformed."""


class DegenerateColumnError(MbatError):
    """Orthogonalization kept producing numerically zero columns.

    Hitting this signals an RNG or dimension pathology; for healthy inputs
    the retry that guards against it is essentially never taken.
    """
