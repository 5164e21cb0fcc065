"""Ordered collections encoded by repeated application of a SEQ binder.

Item i of a sequence is rotated i times by the sequence matrix before the
terms are summed, so position is part of the representation. With an
orthogonal binder every term keeps the length of its item no matter how deep
its position is.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .core import Matrix, Vector, _check_matrix, _check_vector, normalize


def encode_sequence(items: Sequence[Vector], seq_matrix: Matrix, normalize_result: bool = False) -> Vector:
    """Sum of items with item i bound i times by ``seq_matrix`` (1-indexed).

    Evaluated as the nested form M(x1 + M(x2 + M(x3 + ...))), which costs one
    matrix-vector product per item and satisfies the recursion
    encode([x1, ...rest]) == M @ (x1 + encode(rest)).
    """
    n = _check_matrix(seq_matrix)
    acc = np.zeros(n)
    for item in reversed(items):
        arr = np.asarray(item, dtype=np.float64)
        _check_vector(arr, n)
        acc = seq_matrix @ (arr + acc)
    if normalize_result:
        acc = normalize(acc)
    return acc
