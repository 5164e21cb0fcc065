"""Hypervector algebra with random orthogonal binding matrices.

Vectors live in one fixed n-dimensional real space. A role is bound onto a
content vector by multiplying with a role-specific orthogonal matrix, which
preserves Euclidean length at any nesting depth and is undone exactly by the
transpose. Superposition ("bundling") is component-wise addition; a dot
product against the sum reveals how strongly a candidate participates in it.

All operations are pure functions of their inputs and use 64-bit floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np
from numpy.typing import NDArray

from .errors import DegenerateColumnError, DimensionMismatchError
from .seeds import mix_seed, rng_from_seed

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]
EntryKind = Literal["gaussian_unit", "signed_binary"]

ENTRY_KINDS = ("gaussian_unit", "signed_binary")

# Redraw budget for the essentially-impossible zero-after-projection event.
GS_MAX_RETRIES = 8


@dataclass(frozen=True)
class SpaceConfig:
    """Shared parameters of one hypervector space.

    ``entry_kind`` selects the distribution of raw random vectors:
    i.i.d. standard normal entries ("gaussian_unit") or i.i.d. signs
    ("signed_binary").
    """

    dimension: int = 1000
    master_seed: int = 0
    orthogonality_tolerance: float = 1e-8
    entry_kind: EntryKind = "gaussian_unit"

    def __post_init__(self) -> None:
        if not isinstance(self.dimension, int) or self.dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.dimension!r}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be an unsigned 64-bit integer")
        if not (self.orthogonality_tolerance > 0 and np.isfinite(self.orthogonality_tolerance)):
            raise ValueError("orthogonality_tolerance must be positive and finite")
        if self.entry_kind not in ENTRY_KINDS:
            raise ValueError(f"entry_kind must be one of {ENTRY_KINDS}, got {self.entry_kind!r}")


def _check_vector(v: np.ndarray, dimension: int | None = None) -> None:
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got array of shape {v.shape}")
    if dimension is not None and v.shape[0] != dimension:
        raise DimensionMismatchError(f"vector has dimension {v.shape[0]}, expected {dimension}")


def _check_matrix(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got array of shape {m.shape}")
    return m.shape[0]


def as_vector(data, dimension: int | None = None) -> Vector:
    """Validate boundary input as a finite float64 vector."""
    v = np.asarray(data, dtype=np.float64)
    _check_vector(v, dimension)
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def raw_vector(rng: np.random.Generator, dimension: int, entry_kind: EntryKind = "gaussian_unit") -> Vector:
    """Unnormalized random vector with i.i.d. entries of the given kind."""
    if entry_kind == "gaussian_unit":
        return rng.standard_normal(dimension)
    if entry_kind == "signed_binary":
        return rng.integers(0, 2, size=dimension).astype(np.float64) * 2.0 - 1.0
    raise ValueError(f"unknown entry_kind {entry_kind!r}")


def random_unit_vector(rng: np.random.Generator, dimension: int, entry_kind: EntryKind = "gaussian_unit") -> Vector:
    """Random vector of the given kind, normalized to unit length."""
    return normalize(raw_vector(rng, dimension, entry_kind))


def gen_orthogonal(seed: int, config: SpaceConfig) -> Matrix:
    """Random orthogonal binding matrix.

    The result is a pure deterministic function of (seed, config.dimension,
    config.master_seed): the two seeds are mixed into one stream seed and the
    candidate columns are drawn per ``config.entry_kind``, then
    orthogonalized.

    Raises DegenerateColumnError if a candidate column is numerically zero
    after projection more than GS_MAX_RETRIES times in a row.
    """
    rng = rng_from_seed(mix_seed(config.master_seed, seed))
    return orthogonal_from_rng(rng, config.dimension, config.entry_kind)


def orthogonal_from_rng(
    rng: np.random.Generator,
    dimension: int,
    entry_kind: EntryKind = "gaussian_unit",
) -> Matrix:
    """Orthogonalize random candidate columns with modified Gram-Schmidt.

    Projections are subtracted from the running columns immediately after
    each column is finalized (the right-looking form), which keeps the loss
    of orthogonality near machine precision even at large dimensions. A
    column whose residual norm falls below n * eps * (its original norm) is
    redrawn.
    """
    n = dimension
    if entry_kind == "gaussian_unit":
        q = rng.standard_normal((n, n))
    else:
        q = raw_vector(rng, n * n, entry_kind).reshape(n, n)
    original_norms = np.linalg.norm(q, axis=0)
    eps = np.finfo(np.float64).eps

    for k in range(n):
        norm = float(np.linalg.norm(q[:, k]))
        floor = n * eps * max(float(original_norms[k]), 1.0)
        retries = 0
        while norm <= floor:
            if retries >= GS_MAX_RETRIES:
                raise DegenerateColumnError(
                    f"column {k} stayed numerically zero after {GS_MAX_RETRIES} redraws "
                    f"(dimension {n}, entry_kind {entry_kind})"
                )
            v = raw_vector(rng, n, entry_kind)
            floor = n * eps * max(float(np.linalg.norm(v)), 1.0)
            for j in range(k):
                v -= (q[:, j] @ v) * q[:, j]
            q[:, k] = v
            norm = float(np.linalg.norm(v))
            retries += 1
        col = q[:, k] / norm
        q[:, k] = col
        if k + 1 < n:
            coeffs = col @ q[:, k + 1 :]
            q[:, k + 1 :] -= np.outer(col, coeffs)
    return q


def orthogonality_defect(matrix: Matrix) -> float:
    """max |M^T M - I|, the worst deviation from exact orthonormal columns."""
    n = _check_matrix(matrix)
    return float(np.abs(matrix.T @ matrix - np.eye(n)).max())


def bind(matrix: Matrix, vector: Vector) -> Vector:
    """Apply a binding matrix to a vector (matrix-vector product)."""
    n = _check_matrix(matrix)
    _check_vector(np.asarray(vector), n)
    return matrix @ vector


def unbind(matrix: Matrix, vector: Vector) -> Vector:
    """Invert a binding by multiplying with the transpose."""
    n = _check_matrix(matrix)
    _check_vector(np.asarray(vector), n)
    return matrix.T @ vector


def bundle(vectors: Iterable[Vector], *, dimension: int | None = None) -> Vector:
    """Component-wise sum of vectors; the empty bundle is the zero vector.

    An empty input needs an explicit ``dimension`` because there is nothing
    to infer it from.
    """
    acc: Vector | None = None
    for v in vectors:
        arr = np.asarray(v, dtype=np.float64)
        if acc is None:
            _check_vector(arr, dimension)
            acc = arr.copy()
        else:
            _check_vector(arr, acc.shape[0])
            acc += arr
    if acc is None:
        if dimension is None:
            raise ValueError("bundling an empty list needs an explicit dimension")
        return np.zeros(dimension)
    return acc


def normalize(vector: Vector) -> Vector:
    """Scale to unit length; the zero vector is returned unchanged."""
    v = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return v.copy()
    return v / norm


def dot(a: Vector, b: Vector) -> float:
    """Raw dot product (the membership signal against a bundle)."""
    av, bv = np.asarray(a), np.asarray(b)
    _check_vector(av)
    _check_vector(bv, av.shape[0])
    return float(av @ bv)


def similarity(a: Vector, b: Vector) -> float:
    """Cosine similarity in [-1, 1]; zero if either input is the zero vector."""
    av, bv = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    _check_vector(av)
    _check_vector(bv, av.shape[0])
    na = float(np.linalg.norm(av))
    nb = float(np.linalg.norm(bv))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return min(1.0, max(-1.0, float(av @ bv) / (na * nb)))
