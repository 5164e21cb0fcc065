"""Monte Carlo harnesses for bundle capacity and binding-chain norm drift.

Reproducibility contract: every trial draws from its own Philox stream keyed
by (seed, trial index), and distractors are consumed through draw primitives
whose output does not depend on chunk sizes. Reports are therefore
bit-identical for identical parameters regardless of scheduling or internal
batching.

Signed-binary drawing policy (shared with the independent oracle in the test
suite): each vector consumes ceil(n / 64) consecutive full-range uint64
draws from the trial stream; the words are viewed as little-endian bytes,
bits are taken least-significant first, and the first n bits map to entries
via bit -> 2 * bit - 1. Members are drawn before distractors. Gaussian
vectors are plain standard-normal draws in the same order.

Capacity dots for signed-binary trials are computed through a per-byte
lookup table; every partial sum is an integer below 2**24 when
n * members < 2**24, so float32 accumulation is exact and the fast path is
bit-equivalent to naive dot products (float64 is used past that bound).
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass
from typing import Callable, TextIO

import numpy as np

from .core import ENTRY_KINDS, EntryKind, orthogonal_from_rng
from .seeds import trial_rng

_CHUNK_BYTES = 1 << 26
_WORD_HIGH = 2**64 - 1

MATRIX_KINDS = ("random_orthogonal", "random_gaussian")


@dataclass(frozen=True)
class CapacityParams:
    """Configuration of one bundle-capacity experiment."""

    dimension: int
    members: int
    distractors: int
    trials: int
    entry_kind: EntryKind = "signed_binary"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.members < 1:
            raise ValueError("members must be >= 1")
        if self.distractors < 0:
            raise ValueError("distractors must be >= 0")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.entry_kind not in ENTRY_KINDS:
            raise ValueError(f"entry_kind must be one of {ENTRY_KINDS}")


@dataclass(frozen=True)
class CapacityReport:
    """Aggregates over capacity trials.

    success_fraction: share of trials where every distractor scored below
    every member. confidence_halfwidth: 95% normal-approximation binomial
    halfwidth. mean_max_distractor_dot is None when there are no
    distractors.
    """

    params: CapacityParams
    success_fraction: float
    mean_min_member_dot: float
    mean_max_distractor_dot: float | None
    confidence_halfwidth: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"] = asdict(self.params)
        return out


@dataclass(frozen=True)
class DriftParams:
    """Configuration of one norm-drift experiment over matrix chains."""

    dimension: int
    depth: int
    matrix_kind: str = "random_orthogonal"
    trials: int = 1
    seed: int = 0
    scale_gaussian: bool = True

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.matrix_kind not in MATRIX_KINDS:
            raise ValueError(f"matrix_kind must be one of {MATRIX_KINDS}")


@dataclass(frozen=True)
class DriftReport:
    """Per-depth norm ratios ||M_1 ... M_j V|| / ||V|| over all trials."""

    params: DriftParams
    depths: tuple[int, ...]
    geomean_ratios: tuple[float, ...]
    min_ratios: tuple[float, ...]
    max_ratios: tuple[float, ...]

    def to_dict(self) -> dict:
        out = asdict(self)
        out["params"] = asdict(self.params)
        out["depths"] = list(self.depths)
        out["geomean_ratios"] = list(self.geomean_ratios)
        out["min_ratios"] = list(self.min_ratios)
        out["max_ratios"] = list(self.max_ratios)
        return out


def _words_per_vector(dimension: int) -> int:
    return (dimension + 63) // 64


def _signed_rows_from_words(words: np.ndarray, count: int, dimension: int) -> np.ndarray:
    """(count, n) float64 matrix of +-1 entries from packed uint64 words."""
    w = _words_per_vector(dimension)
    le = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
    bits = np.unpackbits(le.reshape(count, 8 * w), axis=1, bitorder="little")[:, :dimension]
    return bits.astype(np.float64) * 2.0 - 1.0


def _draw_signed_words(rng: np.random.Generator, count: int) -> np.ndarray:
    return rng.integers(0, _WORD_HIGH, size=count, dtype=np.uint64, endpoint=True)


def capacity_run(params: CapacityParams) -> CapacityReport:
    """Run the capacity experiment.

    Per trial: draw S member and D distractor vectors, form V as the member
    sum, and record whether the largest distractor dot with V stays strictly
    below the smallest member dot.
    """
    p = params
    successes = 0
    min_member_total = 0.0
    max_distractor_total = 0.0
    for trial in range(p.trials):
        rng = trial_rng(p.seed, trial)
        if p.entry_kind == "signed_binary":
            min_member, max_distractor = _signed_trial(rng, p)
        else:
            min_member, max_distractor = _gaussian_trial(rng, p)
        min_member_total += min_member
        if p.distractors == 0:
            successes += 1
        else:
            max_distractor_total += max_distractor
            if max_distractor < min_member:
                successes += 1
    fraction = successes / p.trials
    halfwidth = 1.96 * math.sqrt(fraction * (1.0 - fraction) / p.trials)
    return CapacityReport(
        params=p,
        success_fraction=fraction,
        mean_min_member_dot=min_member_total / p.trials,
        mean_max_distractor_dot=None if p.distractors == 0 else max_distractor_total / p.trials,
        confidence_halfwidth=halfwidth,
    )


def _signed_trial(rng: np.random.Generator, p: CapacityParams) -> tuple[float, float]:
    n, w = p.dimension, _words_per_vector(p.dimension)
    members = _signed_rows_from_words(_draw_signed_words(rng, p.members * w), p.members, n)
    bundle_vec = members.sum(axis=0)
    min_member = float((members @ bundle_vec).min())
    if p.distractors == 0:
        return min_member, -math.inf

    # Dot products and every partial sum on the way are integers bounded by
    # n * members, so float32 is exact below 2**24 and float64 beyond.
    dtype = np.float32 if n * p.members < 2**24 else np.float64
    bytes_per_vector = 8 * w
    padded = np.zeros(64 * w)
    padded[:n] = bundle_vec
    byte_bits = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1, bitorder="little")
    table = (padded.reshape(bytes_per_vector, 8) @ byte_bits.T.astype(np.float64)).astype(dtype)
    total = dtype(padded.sum())
    column_index = np.arange(bytes_per_vector)[None, :]

    rows_per_chunk = max(1, _CHUNK_BYTES // bytes_per_vector)
    max_distractor = -math.inf
    remaining = p.distractors
    while remaining > 0:
        rows = min(rows_per_chunk, remaining)
        words = _draw_signed_words(rng, rows * w)
        raw = np.ascontiguousarray(words.astype("<u8", copy=False)).view(np.uint8)
        gathered = table[column_index, raw.reshape(rows, bytes_per_vector)]
        dots = 2.0 * gathered.sum(axis=1, dtype=dtype) - total
        max_distractor = max(max_distractor, float(dots.max()))
        remaining -= rows
    return min_member, max_distractor


def _gaussian_trial(rng: np.random.Generator, p: CapacityParams) -> tuple[float, float]:
    n = p.dimension
    members = rng.standard_normal((p.members, n))
    bundle_vec = members.sum(axis=0)
    min_member = float((members @ bundle_vec).min())
    if p.distractors == 0:
        return min_member, -math.inf
    rows_per_chunk = max(1, _CHUNK_BYTES // (8 * n))
    max_distractor = -math.inf
    remaining = p.distractors
    while remaining > 0:
        rows = min(rows_per_chunk, remaining)
        dots = rng.standard_normal((rows, n)) @ bundle_vec
        max_distractor = max(max_distractor, float(dots.max()))
        remaining -= rows
    return min_member, max_distractor


MatrixFactory = Callable[[np.random.Generator, int], np.ndarray]


def _default_factory(params: DriftParams) -> MatrixFactory:
    if params.matrix_kind == "random_orthogonal":
        return lambda rng, n: orthogonal_from_rng(rng, n)
    scale = params.dimension ** -0.5 if params.scale_gaussian else 1.0
    return lambda rng, n: rng.standard_normal((n, n)) * scale


def drift_run(params: DriftParams, matrix_factory: MatrixFactory | None = None) -> DriftReport:
    """Measure norm ratios along chains of freshly drawn binding matrices.

    ``matrix_factory`` overrides the per-step matrix draw (used by tests to
    substitute e.g. the identity); the default follows params.matrix_kind,
    with Gaussian entries scaled by 1/sqrt(n) unless scale_gaussian is off.
    """
    p = params
    factory = matrix_factory or _default_factory(p)
    ratios = np.empty((p.trials, p.depth))
    for trial in range(p.trials):
        rng = trial_rng(p.seed, trial)
        vec = rng.standard_normal(p.dimension)
        base = float(np.linalg.norm(vec))
        for j in range(p.depth):
            vec = factory(rng, p.dimension) @ vec
            ratios[trial, j] = float(np.linalg.norm(vec)) / base
    with np.errstate(divide="ignore"):
        geomean = np.exp(np.mean(np.log(ratios), axis=0))
    return DriftReport(
        params=p,
        depths=tuple(range(1, p.depth + 1)),
        geomean_ratios=tuple(float(x) for x in geomean),
        min_ratios=tuple(float(x) for x in ratios.min(axis=0)),
        max_ratios=tuple(float(x) for x in ratios.max(axis=0)),
    )


# -- report serialization -----------------------------------------------------


def report_json(report: CapacityReport | DriftReport) -> str:
    """Stable JSON rendering (sorted keys, trailing newline)."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


CAPACITY_CSV_COLUMNS = [
    "dimension", "members", "distractors", "trials", "entry_kind", "seed",
    "success_fraction", "mean_min_member_dot", "mean_max_distractor_dot",
    "confidence_halfwidth",
]

DRIFT_CSV_COLUMNS = ["depth", "geomean_ratio", "min_ratio", "max_ratio"]


def write_capacity_csv(report: CapacityReport, stream: TextIO) -> None:
    """One header row plus one data row; see CAPACITY_CSV_COLUMNS."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CAPACITY_CSV_COLUMNS)
    p = report.params
    writer.writerow([
        p.dimension, p.members, p.distractors, p.trials, p.entry_kind, p.seed,
        repr(report.success_fraction), repr(report.mean_min_member_dot),
        "" if report.mean_max_distractor_dot is None else repr(report.mean_max_distractor_dot),
        repr(report.confidence_halfwidth),
    ])


def write_drift_csv(report: DriftReport, stream: TextIO) -> None:
    """One row per chain depth; see DRIFT_CSV_COLUMNS."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(DRIFT_CSV_COLUMNS)
    for depth, geo, lo, hi in zip(
        report.depths, report.geomean_ratios, report.min_ratios, report.max_ratios
    ):
        writer.writerow([depth, repr(geo), repr(lo), repr(hi)])
