"""Membership probes, role probing by unbinding, and exact cosine search.

A membership score is the raw dot product of a probe against a bundle: close
to the probe's squared length when the probe participates in the bundle,
close to zero otherwise, with noise on the scale sqrt(S/n) for S bundled
unit vectors at dimension n. Role probing unbinds the document once with the
role's transpose and ranks candidates by dot product, which equals probing
with each candidate bound individually.

The index is a read-mostly structure: lookups are safe concurrently, writes
need external coordination.

Index file format, integers little-endian:

    magic "MBATIX" | version u8 = 1 | dimension u32 | record count u64 |
    records: id length u32 | id UTF-8 | n f64 vector entries.
"""

from __future__ import annotations

import heapq
import io
import struct
from typing import BinaryIO, Iterable, NamedTuple

import numpy as np

from .codebook import Codebook
from .core import Matrix, Vector, _check_matrix, _check_vector, as_vector, unbind
from .errors import DimensionMismatchError, FileFormatError

_MAGIC = b"MBATIX"
_VERSION = 1


def membership_score(sum_vector: Vector, probe: Vector) -> float:
    """Raw dot product of a probe against a bundled sum."""
    sv, pv = np.asarray(sum_vector, dtype=np.float64), np.asarray(probe, dtype=np.float64)
    _check_vector(sv)
    _check_vector(pv, sv.shape[0])
    return float(sv @ pv)


def is_member(sum_vector: Vector, probe: Vector, threshold: float) -> bool:
    """Thresholded membership; the caller supplies the cutoff.

    A reasonable cutoff sits a few noise standard deviations above zero,
    e.g. 3 * sqrt(S / n) * ||probe||^2 for S bundled unit vectors.
    """
    return membership_score(sum_vector, probe) >= threshold


def probe_with_matrix(
    doc: Vector, matrix: Matrix, candidates: Iterable[tuple[str, Vector]]
) -> list[tuple[str, float]]:
    """Rank candidates for one binder by unbinding the document once.

    Returns (id, score) pairs sorted by score descending, ties broken by id
    ascending. Scores equal dot(doc, matrix @ candidate) up to rounding.
    """
    unbound = unbind(matrix, np.asarray(doc, dtype=np.float64))
    scored = []
    for cid, vec in candidates:
        arr = np.asarray(vec, dtype=np.float64)
        _check_vector(arr, unbound.shape[0])
        scored.append((cid, float(unbound @ arr)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored


def probe_role(
    doc: Vector, role: str, candidates: Iterable[tuple[str, Vector]], book: Codebook
) -> list[tuple[str, float]]:
    """Rank candidates for a named role of the codebook."""
    return probe_with_matrix(doc, book.role_matrix(role), candidates)


class _Record(NamedTuple):
    id: str
    vector: Vector
    norm: float


class VectorIndex:
    """Ordered id -> vector store with exact cosine k-nearest-neighbor."""

    def __init__(self, dimension: int):
        if not isinstance(dimension, int) or dimension < 1:
            raise ValueError(f"dimension must be a positive integer, got {dimension!r}")
        self.dimension = dimension
        self._records: list[_Record] = []
        self._ids: set[str] = set()

    def __len__(self) -> int:
        return len(self._records)

    def ids(self) -> list[str]:
        return [r.id for r in self._records]

    def items(self) -> list[tuple[str, Vector]]:
        return [(r.id, r.vector) for r in self._records]

    def add(self, record_id: str, vector) -> None:
        if record_id in self._ids:
            raise ValueError(f"duplicate record id {record_id!r}")
        vec = as_vector(vector, self.dimension).copy()
        vec.flags.writeable = False
        self._records.append(_Record(record_id, vec, float(np.linalg.norm(vec))))
        self._ids.add(record_id)

    def knn(self, query, k: int) -> list[tuple[str, float]]:
        """The min(k, len) records with the highest cosine to the query.

        Exact single-pass scan keeping only k candidates; ties broken by id
        ascending. A zero query scores every record 0, so ordering falls
        back to ids.
        """
        if not isinstance(k, int) or k < 1:
            raise ValueError(f"k must be a positive integer, got {k!r}")
        q = np.asarray(query, dtype=np.float64)
        _check_vector(q, self.dimension)
        qnorm = float(np.linalg.norm(q))

        def keyed():
            for rec in self._records:
                if qnorm == 0.0 or rec.norm == 0.0:
                    cosine = 0.0
                else:
                    cosine = min(1.0, max(-1.0, float(rec.vector @ q) / (rec.norm * qnorm)))
                yield (-cosine, rec.id)

        best = heapq.nsmallest(k, keyed())
        return [(rid, -neg) for neg, rid in best]

    # -- persistence ----------------------------------------------------------

    def save(self, stream: BinaryIO) -> None:
        stream.write(_MAGIC)
        stream.write(struct.pack("<BIQ", _VERSION, self.dimension, len(self._records)))
        for rec in self._records:
            encoded = rec.id.encode("utf-8")
            stream.write(struct.pack("<I", len(encoded)))
            stream.write(encoded)
            stream.write(rec.vector.astype("<f8", copy=False).tobytes())

    def save_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.save(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, source: BinaryIO | bytes) -> "VectorIndex":
        stream = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
        magic = _read_exact(stream, len(_MAGIC))
        if magic != _MAGIC:
            raise FileFormatError("bad magic: not an index file")
        version, dimension, count = struct.unpack("<BIQ", _read_exact(stream, 13))
        if version != _VERSION:
            raise FileFormatError(f"unsupported index version {version}")
        if dimension < 1:
            raise FileFormatError(f"bad index dimension {dimension}")
        index = cls(dimension)
        for _ in range(count):
            (id_len,) = struct.unpack("<I", _read_exact(stream, 4))
            try:
                record_id = _read_exact(stream, id_len).decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FileFormatError(f"record id is not valid UTF-8: {exc}") from None
            payload = _read_exact(stream, 8 * dimension)
            vec = np.frombuffer(payload, dtype="<f8").astype(np.float64)
            if not np.all(np.isfinite(vec)):
                raise FileFormatError(f"record {record_id!r} contains non-finite values")
            if record_id in index._ids:
                raise FileFormatError(f"duplicate record id {record_id!r} in index file")
            index.add(record_id, vec)
        if stream.read(1):
            raise FileFormatError("trailing data after index records")
        return index


def _read_exact(stream: BinaryIO, size: int) -> bytes:
    data = stream.read(size)
    if len(data) != size:
        raise FileFormatError(f"truncated stream: wanted {size} bytes, got {len(data)}")
    return data
