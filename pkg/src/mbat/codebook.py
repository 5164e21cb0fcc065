"""Deterministic provisioning and persistence of symbols and role binders.

Every lookup is a pure function of (name, master seed, dimension): the name
is canonicalized, hashed into a 64-bit stream seed (see ``seeds``), and the
seeded generator draws the vector or matrix. Lookups are cached behind a
lock, so concurrent first lookups of the same name observe one canonical
value, and cached arrays are marked read-only.

Vectors imported from an external table shadow derived vectors for the same
(canonicalized) names and are the only entries ``save`` persists; everything
else is rederived on demand. A 64-bit hash collision between two names would
alias their vectors; at realistic vocabulary sizes that probability is
negligible and is not defended against.

File format, all integers little-endian:

    magic "MBATCB" | version u8 = 1 | dimension u32 | master_seed u64 |
    entry_kind u8 (0 gaussian_unit, 1 signed_binary) | entry count u64 |
    entries...

    entry: kind u8 (0 symbol, 1 role matrix, 2 literal) |
           name length u32 | name UTF-8 |
           payload f64: n values for vectors, n*n column-major for matrices.
"""

from __future__ import annotations

import io
import struct
import threading
import unicodedata
from typing import BinaryIO, Iterable

import numpy as np

from .core import (
    Matrix,
    SpaceConfig,
    Vector,
    as_vector,
    gen_orthogonal,
    normalize,
    orthogonality_defect,
    random_unit_vector,
)
from .errors import DimensionMismatchError, FileFormatError
from .seeds import derive_seed, name_salt, rng_from_seed

SEQ_ROLE = "SEQ"

_MAGIC = b"MBATCB"
_VERSION = 1
_ENTRY_KIND_CODES = {"gaussian_unit": 0, "signed_binary": 1}
_ENTRY_KIND_NAMES = {v: k for k, v in _ENTRY_KIND_CODES.items()}
_KIND_SYMBOL, _KIND_ROLE, _KIND_LITERAL = 0, 1, 2

_LITERAL_NAMES = {True: "true", False: "false", None: "null"}


def canonical_symbol(name: str) -> str:
    """NFC-normalize and lowercase, so "Elephant" and "elephant" agree."""
    return unicodedata.normalize("NFC", name).lower()


def canonical_role(role: str) -> str:
    """NFC-normalize only; role names stay case-sensitive like JSON keys."""
    return unicodedata.normalize("NFC", role)


def literal_name(literal) -> str:
    """Map True/False/None (or their lowercase names) to "true"/"false"/"null"."""
    if isinstance(literal, bool) or literal is None:
        return _LITERAL_NAMES[literal]
    if literal in ("true", "false", "null"):
        return literal
    raise ValueError(f"not a JSON literal: {literal!r}")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class Codebook:
    """Seed-derived store of symbol vectors and role binding matrices."""

    def __init__(self, space: SpaceConfig):
        self.space = space
        self._lock = threading.Lock()
        self._vectors: dict[tuple[str, str], Vector] = {}
        self._matrices: dict[str, Matrix] = {}
        self._imported: dict[tuple[int, str], np.ndarray] = {}

    @property
    def dimension(self) -> int:
        return self.space.dimension

    def zero(self) -> Vector:
        return np.zeros(self.space.dimension)

    def unit_vector(self, namespace: str, name: str) -> Vector:
        """Deterministic unit vector for a namespaced name.

        Namespaces in use: "sym" (words), "lit" (true/false/null), "num"
        (number identities), "thr" (threshold indicators). Distinct
        namespaces never share vectors.
        """
        key = (namespace, name)
        cached = self._vectors.get(key)
        if cached is not None:
            return cached
        rng = rng_from_seed(derive_seed(self.space.master_seed, namespace, name))
        vec = _freeze(random_unit_vector(rng, self.space.dimension, self.space.entry_kind))
        with self._lock:
            return self._vectors.setdefault(key, vec)

    def symbol_vector(self, name: str) -> Vector:
        """Unit vector for a word; imported vectors shadow derived ones."""
        canon = canonical_symbol(name)
        if not canon:
            raise ValueError("symbol name is empty after canonicalization")
        imported = self._imported.get((_KIND_SYMBOL, canon))
        if imported is not None:
            return imported
        return self.unit_vector("sym", canon)

    def literal_vector(self, literal) -> Vector:
        """Fixed unit vector for true, false, or null."""
        name = literal_name(literal)
        imported = self._imported.get((_KIND_LITERAL, name))
        if imported is not None:
            return imported
        return self.unit_vector("lit", name)

    def role_matrix(self, role: str) -> Matrix:
        """Orthogonal binding matrix for a role name (deterministic, cached)."""
        canon = canonical_role(role)
        if not canon:
            raise ValueError("role name is empty")
        imported = self._imported.get((_KIND_ROLE, canon))
        if imported is not None:
            return imported
        cached = self._matrices.get(canon)
        if cached is not None:
            return cached
        matrix = _freeze(gen_orthogonal(name_salt("role", canon), self.space))
        with self._lock:
            return self._matrices.setdefault(canon, matrix)

    def seq_matrix(self) -> Matrix:
        """The designated sequence role; an ordinary role named "SEQ"."""
        return self.role_matrix(SEQ_ROLE)

    # -- external vectors ---------------------------------------------------

    def import_symbol(self, name: str, vector, *, verbatim: bool = False) -> None:
        """Register an externally supplied word vector.

        The vector is normalized unless ``verbatim`` is set. It shadows the
        derived vector for the canonicalized name and is persisted by save().
        """
        canon = canonical_symbol(name)
        if not canon:
            raise ValueError("symbol name is empty after canonicalization")
        vec = as_vector(vector, self.space.dimension)
        if not verbatim:
            if not vec.any():
                raise ValueError(f"cannot normalize the zero vector imported for {name!r}")
            vec = normalize(vec)
        self._imported[(_KIND_SYMBOL, canon)] = _freeze(vec.copy())

    def import_text_table(self, lines: Iterable[str], *, verbatim: bool = False) -> int:
        """Import "word v1 ... vn" lines (whitespace-separated); returns count.

        Blank lines are skipped. Each word may appear once per table.
        """
        seen: set[str] = set()
        count = 0
        for lineno, line in enumerate(lines, start=1):
            parts = line.split()
            if not parts:
                continue
            word, values = parts[0], parts[1:]
            if len(values) != self.space.dimension:
                raise DimensionMismatchError(
                    f"line {lineno}: expected {self.space.dimension} values for {word!r}, got {len(values)}"
                )
            canon = canonical_symbol(word)
            if canon in seen:
                raise ValueError(f"line {lineno}: duplicate word {word!r} in import table")
            seen.add(canon)
            try:
                vec = np.array([float(x) for x in values], dtype=np.float64)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad float in import table: {exc}") from None
            self.import_symbol(word, vec, verbatim=verbatim)
            count += 1
        return count

    def imported_counts(self) -> dict[str, int]:
        """How many imported entries exist, per entry kind."""
        counts = {"symbols": 0, "roles": 0, "literals": 0}
        names = {_KIND_SYMBOL: "symbols", _KIND_ROLE: "roles", _KIND_LITERAL: "literals"}
        for kind, _ in self._imported:
            counts[names[kind]] += 1
        return counts

    # -- persistence ----------------------------------------------------------

    def save(self, stream: BinaryIO) -> None:
        """Write the space config plus all imported entries."""
        n = self.space.dimension
        stream.write(_MAGIC)
        stream.write(struct.pack("<BIQB", _VERSION, n, self.space.master_seed,
                                 _ENTRY_KIND_CODES[self.space.entry_kind]))
        entries = sorted(self._imported.items(), key=lambda kv: kv[0])
        stream.write(struct.pack("<Q", len(entries)))
        for (kind, name), arr in entries:
            encoded = name.encode("utf-8")
            stream.write(struct.pack("<BI", kind, len(encoded)))
            stream.write(encoded)
            order = "F" if arr.ndim == 2 else "C"
            stream.write(arr.astype("<f8", copy=False).tobytes(order=order))

    def save_bytes(self) -> bytes:
        buf = io.BytesIO()
        self.save(buf)
        return buf.getvalue()

    @classmethod
    def load(cls, source: BinaryIO | bytes, expected: SpaceConfig | None = None) -> "Codebook":
        """Read a codebook file; verifies magic, version, and dimension.

        ``expected`` (when given) must agree with the stored dimension; its
        orthogonality tolerance is carried over onto the loaded space.
        """
        stream = io.BytesIO(source) if isinstance(source, (bytes, bytearray)) else source
        magic = _read_exact(stream, len(_MAGIC))
        if magic != _MAGIC:
            raise FileFormatError("bad magic: not a codebook file")
        version, dimension, master_seed, kind_code = struct.unpack("<BIQB", _read_exact(stream, 14))
        if version != _VERSION:
            raise FileFormatError(f"unsupported codebook version {version}")
        if kind_code not in _ENTRY_KIND_NAMES:
            raise FileFormatError(f"unknown entry kind code {kind_code}")
        if expected is not None and expected.dimension != dimension:
            raise DimensionMismatchError(
                f"codebook dimension {dimension} does not match expected {expected.dimension}"
            )
        tolerance = expected.orthogonality_tolerance if expected is not None else 1e-8
        space = SpaceConfig(
            dimension=dimension,
            master_seed=master_seed,
            orthogonality_tolerance=tolerance,
            entry_kind=_ENTRY_KIND_NAMES[kind_code],
        )
        book = cls(space)
        (count,) = struct.unpack("<Q", _read_exact(stream, 8))
        for _ in range(count):
            kind, name_len = struct.unpack("<BI", _read_exact(stream, 5))
            if kind not in (_KIND_SYMBOL, _KIND_ROLE, _KIND_LITERAL):
                raise FileFormatError(f"unknown entry kind {kind}")
            try:
                name = _read_exact(stream, name_len).decode("utf-8")
            except UnicodeDecodeError as exc:
                raise FileFormatError(f"entry name is not valid UTF-8: {exc}") from None
            if kind == _KIND_ROLE:
                payload = _read_exact(stream, 8 * dimension * dimension)
                arr = np.frombuffer(payload, dtype="<f8").reshape((dimension, dimension), order="F")
            else:
                payload = _read_exact(stream, 8 * dimension)
                arr = np.frombuffer(payload, dtype="<f8")
            arr = arr.astype(np.float64)
            if not np.all(np.isfinite(arr)):
                raise FileFormatError(f"entry {name!r} contains non-finite values")
            if kind == _KIND_ROLE and orthogonality_defect(arr) > space.orthogonality_tolerance:
                raise FileFormatError(f"imported role matrix {name!r} is not orthogonal")
            book._imported[(kind, name)] = _freeze(arr)
        if stream.read(1):
            raise FileFormatError("trailing data after codebook entries")
        return book


def _read_exact(stream: BinaryIO, size: int) -> bytes:
    data = stream.read(size)
    if len(data) != size:
        raise FileFormatError(f"truncated stream: wanted {size} bytes, got {len(data)}")
    return data
