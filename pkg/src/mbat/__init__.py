"""Fixed-length vector representations with orthogonal matrix binding.

The package bundles symbol vectors by addition, binds roles onto them by
multiplying with seed-derived orthogonal matrices, and builds on those two
operations: a deterministic codebook, sequence and JSON encoders, membership
and nearest-neighbor queries, and Monte Carlo harnesses for capacity and
norm-drift measurements.
"""

from .codebook import SEQ_ROLE, Codebook
from .core import (
    Matrix,
    SpaceConfig,
    Vector,
    bind,
    bundle,
    dot,
    gen_orthogonal,
    normalize,
    orthogonality_defect,
    similarity,
    unbind,
)
from .errors import (
    DegenerateColumnError,
    DimensionMismatchError,
    FileFormatError,
    MbatError,
)
from .jsonenc import (
    ARRAY,
    EncodingConfig,
    NumericMode,
    TokenizerRules,
    encode_array,
    encode_number,
    encode_object,
    encode_string,
    encode_value,
    parse_json,
)
from .query import (
    VectorIndex,
    is_member,
    membership_score,
    probe_role,
    probe_with_matrix,
)
from .sequence import encode_sequence
from .sims import (
    CapacityParams,
    CapacityReport,
    DriftParams,
    DriftReport,
    capacity_run,
    drift_run,
)

__version__ = "0.1.0"

__all__ = [
    "ARRAY",
    "CapacityParams",
    "CapacityReport",
    "Codebook",
    "DegenerateColumnError",
    "DimensionMismatchError",
    "DriftParams",
    "DriftReport",
    "EncodingConfig",
    "FileFormatError",
    "Matrix",
    "MbatError",
    "NumericMode",
    "SEQ_ROLE",
    "SpaceConfig",
    "TokenizerRules",
    "Vector",
    "VectorIndex",
    "bind",
    "bundle",
    "capacity_run",
    "dot",
    "drift_run",
    "encode_array",
    "encode_number",
    "encode_object",
    "encode_sequence",
    "encode_string",
    "encode_value",
    "gen_orthogonal",
    "is_member",
    "membership_score",
    "normalize",
    "orthogonality_defect",
    "parse_json",
    "probe_role",
    "probe_with_matrix",
    "similarity",
    "unbind",
]
