"""Recursive JSON-to-hypervector encoding driven by per-field rules.

The mapping follows one rule per JSON shape:

- object: sum over pairs of role_matrix(key) @ encode(value); key order
  never matters (pairs are summed in sorted-key order so results are
  bit-identical across orderings).
- array: items are encoded recursively, then combined as a sequence with
  the "SEQ" binder.
- string: bag of word vectors (or a sequence of them when order counts).
- number: one identity vector per distinct canonical value, optionally plus
  one indicator vector per threshold the value meets (thermometer mode).
- true/false/null: fixed literal vectors.

Empty strings, arrays, and objects all encode to the zero vector, which
contributes nothing to enclosing sums.

Field rules are addressed by absolute dotted path patterns where ``[]``
matches any array position and ``*`` matches any object key, e.g.
``members[].age``; the most specific matching pattern wins (literal keys
beat ``*``, compared left to right). A literal key named ``*`` or
containing ``.`` or ``[]`` cannot be addressed by a pattern.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .codebook import Codebook
from .core import Vector, bind, bundle, normalize
from .sequence import encode_sequence


class _ArraySlot:
    """Singleton path component standing for "any array position"."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "[]"


ARRAY = _ArraySlot()

BAG = "bag"
SEQUENCE = "sequence"
_ORDER_MODES = (BAG, SEQUENCE)

_SEGMENT_RE = re.compile(r"^([^.\[\]]*)((?:\[\])*)$")


def parse_pattern(pattern: str) -> tuple:
    """Compile a dotted path pattern into matchable components."""
    if not pattern:
        raise ValueError("empty path pattern")
    components: list = []
    for segment in pattern.split("."):
        m = _SEGMENT_RE.match(segment)
        if m is None:
            raise ValueError(f"bad segment {segment!r} in path pattern {pattern!r}")
        key, brackets = m.group(1), m.group(2)
        if not key and not brackets:
            raise ValueError(f"empty segment in path pattern {pattern!r}")
        if key:
            components.append(key)
        components.extend([ARRAY] * (len(brackets) // 2))
    return tuple(components)


def format_path(path: Sequence) -> str:
    """Render a concrete path the way patterns are written."""
    out: list[str] = []
    for comp in path:
        if comp is ARRAY:
            out.append("[]")
        else:
            if out:
                out.append(".")
            out.append(str(comp))
    return "".join(out)


def _pattern_matches(components: tuple, path: tuple) -> bool:
    if len(components) != len(path):
        return False
    for pat, concrete in zip(components, path):
        if pat is ARRAY or concrete is ARRAY:
            if pat is not ARRAY or concrete is not ARRAY:
                return False
        elif pat != "*" and pat != concrete:
            return False
    return True


def _specificity(components: tuple) -> tuple:
    return tuple(0 if c == "*" else 1 for c in components)


def _resolve(compiled_rules, path: tuple, default):
    best = default
    best_score = None
    for components, value in compiled_rules:
        if _pattern_matches(components, path):
            score = _specificity(components)
            if best_score is None or score > best_score:
                best, best_score = value, score
    return best


@dataclass(frozen=True)
class TokenizerRules:
    """Whitespace tokenizer with punctuation trimming."""

    lowercase: bool = True

    def tokenize(self, text: str) -> list[str]:
        tokens = []
        for raw in text.split():
            tok = _strip_punctuation(raw)
            if self.lowercase:
                tok = tok.lower()
            if tok:
                tokens.append(tok)
        return tokens


def _strip_punctuation(token: str) -> str:
    import unicodedata

    start, end = 0, len(token)
    while start < end and unicodedata.category(token[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(token[end - 1]).startswith("P"):
        end -= 1
    return token[start:end]


@dataclass(frozen=True)
class NumericMode:
    """How one numeric field turns into a vector.

    categorical: nearby values share nothing (IDs, codes).
    thermometer: one indicator per threshold the value meets, so nearby
    values overlap; thresholds must be strictly increasing.
    """

    kind: str = "categorical"
    thresholds: tuple[float, ...] = ()
    label_prefix: str = "ge_"

    def __post_init__(self) -> None:
        if self.kind not in ("categorical", "thermometer"):
            raise ValueError(f"numeric mode kind must be categorical or thermometer, got {self.kind!r}")
        ts = tuple(float(t) for t in self.thresholds)
        object.__setattr__(self, "thresholds", ts)
        if self.kind == "thermometer":
            if not ts:
                raise ValueError("thermometer mode needs at least one threshold")
            if not all(math.isfinite(t) for t in ts):
                raise ValueError("thresholds must be finite")
            if any(a >= b for a, b in zip(ts, ts[1:])):
                raise ValueError("thresholds must be strictly increasing")
        elif ts:
            raise ValueError("categorical mode takes no thresholds")


CATEGORICAL = NumericMode()


@dataclass
class EncodingConfig:
    """Per-field encoding rules plus normalization and tokenizer flags."""

    numeric_rules: dict[str, NumericMode] = field(default_factory=dict)
    default_numeric: NumericMode = CATEGORICAL
    string_order_rules: dict[str, str] = field(default_factory=dict)
    default_string_order: str = BAG
    normalize_strings: bool = True
    normalize_arrays: bool = True
    normalize_top: bool = True
    tokenizer: TokenizerRules = field(default_factory=TokenizerRules)
    roles_use_full_path: bool = False

    def __post_init__(self) -> None:
        if self.default_string_order not in _ORDER_MODES:
            raise ValueError(f"string order must be one of {_ORDER_MODES}")
        for pattern, order in self.string_order_rules.items():
            parse_pattern(pattern)
            if order not in _ORDER_MODES:
                raise ValueError(f"string order for {pattern!r} must be one of {_ORDER_MODES}")
        for pattern in self.numeric_rules:
            parse_pattern(pattern)

    @classmethod
    def from_dict(cls, data: Mapping) -> "EncodingConfig":
        """Build from the documented JSON config schema (strict keys)."""
        allowed = {
            "numeric_rules", "default_numeric", "string_order_rules",
            "default_string_order", "normalize", "tokenizer", "roles_use_full_path",
        }
        unknown = set(data) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        numeric_rules = {
            pattern: _numeric_mode_from_dict(spec)
            for pattern, spec in data.get("numeric_rules", {}).items()
        }
        default_numeric = _numeric_mode_from_dict(data.get("default_numeric", {"kind": "categorical"}))
        norm = dict(data.get("normalize", {}))
        unknown = set(norm) - {"strings", "arrays", "top"}
        if unknown:
            raise ValueError(f"unknown normalize keys: {sorted(unknown)}")
        tok = dict(data.get("tokenizer", {}))
        unknown = set(tok) - {"lowercase"}
        if unknown:
            raise ValueError(f"unknown tokenizer keys: {sorted(unknown)}")
        return cls(
            numeric_rules=numeric_rules,
            default_numeric=default_numeric,
            string_order_rules=dict(data.get("string_order_rules", {})),
            default_string_order=data.get("default_string_order", BAG),
            normalize_strings=bool(norm.get("strings", True)),
            normalize_arrays=bool(norm.get("arrays", True)),
            normalize_top=bool(norm.get("top", True)),
            tokenizer=TokenizerRules(lowercase=bool(tok.get("lowercase", True))),
            roles_use_full_path=bool(data.get("roles_use_full_path", False)),
        )

    @classmethod
    def from_json(cls, text: str) -> "EncodingConfig":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        return {
            "numeric_rules": {p: _numeric_mode_to_dict(m) for p, m in self.numeric_rules.items()},
            "default_numeric": _numeric_mode_to_dict(self.default_numeric),
            "string_order_rules": dict(self.string_order_rules),
            "default_string_order": self.default_string_order,
            "normalize": {
                "strings": self.normalize_strings,
                "arrays": self.normalize_arrays,
                "top": self.normalize_top,
            },
            "tokenizer": {"lowercase": self.tokenizer.lowercase},
            "roles_use_full_path": self.roles_use_full_path,
        }


def _numeric_mode_from_dict(spec: Mapping) -> NumericMode:
    unknown = set(spec) - {"kind", "thresholds", "label_prefix"}
    if unknown:
        raise ValueError(f"unknown numeric rule keys: {sorted(unknown)}")
    return NumericMode(
        kind=spec.get("kind", "categorical"),
        thresholds=tuple(spec.get("thresholds", ())),
        label_prefix=spec.get("label_prefix", "ge_"),
    )


def _numeric_mode_to_dict(mode: NumericMode) -> dict:
    out: dict = {"kind": mode.kind}
    if mode.kind == "thermometer":
        out["thresholds"] = list(mode.thresholds)
        out["label_prefix"] = mode.label_prefix
    return out


def canonical_number_text(x) -> str:
    """Shortest round-trip decimal text of float(x); 2 and 2.0 alias."""
    try:
        xf = float(x)
    except OverflowError:
        raise ValueError(f"number {x!r} is out of float range") from None
    if not math.isfinite(xf):
        raise ValueError(f"cannot encode non-finite number {x!r}")
    if xf == 0.0:
        xf = 0.0
    return repr(xf)


# -- strict JSON parsing ------------------------------------------------------


def _reject_duplicates(pairs):
    obj: dict = {}
    for key, value in pairs:
        if key in obj:
            raise ValueError(f"duplicate object key {key!r}")
        obj[key] = value
    return obj


def _reject_constant(name):
    raise ValueError(f"non-finite JSON number {name} is not allowed")


def parse_json(text: str):
    """Strict JSON parse: rejects duplicate keys and NaN/Infinity literals."""
    return json.loads(text, object_pairs_hook=_reject_duplicates, parse_constant=_reject_constant)


# -- encoding ---------------------------------------------------------------


class _Context:
    """Compiled rules plus the codebook, built once per encoding call."""

    def __init__(self, cfg: EncodingConfig, book: Codebook):
        self.cfg = cfg
        self.book = book
        self.numeric = [(parse_pattern(p), m) for p, m in cfg.numeric_rules.items()]
        self.string_order = [(parse_pattern(p), o) for p, o in cfg.string_order_rules.items()]


def encode_string(s: str, order: str, cfg: EncodingConfig, book: Codebook) -> Vector:
    """Bag or sequence of word vectors; the empty token list gives zero."""
    if order not in _ORDER_MODES:
        raise ValueError(f"string order must be one of {_ORDER_MODES}")
    tokens = cfg.tokenizer.tokenize(s)
    if not tokens:
        return book.zero()
    vectors = [book.symbol_vector(t) for t in tokens]
    if order == SEQUENCE:
        result = encode_sequence(vectors, book.seq_matrix())
    else:
        result = bundle(vectors)
    return normalize(result) if cfg.normalize_strings else result


def encode_number(x, mode: NumericMode, cfg: EncodingConfig, book: Codebook) -> Vector:
    """Identity vector for the value, plus met-threshold indicators if any.

    The thermometer sum is always normalized; a value meets a threshold t
    when x >= t.
    """
    if isinstance(x, bool):
        raise ValueError("true/false are literals, not numbers")
    text = canonical_number_text(x)
    identity = book.unit_vector("num", text)
    if mode.kind == "categorical":
        return identity
    xf = float(x)
    parts = [identity]
    for t in mode.thresholds:
        if xf >= t:
            parts.append(book.unit_vector("thr", mode.label_prefix + canonical_number_text(t)))
    return normalize(bundle(parts))


def encode_array(items: Sequence, path, cfg: EncodingConfig, book: Codebook) -> Vector:
    """Encode items recursively, then combine as a sequence."""
    return _encode_array(list(items), tuple(path), _Context(cfg, book))


def encode_object(pairs: Mapping, path, cfg: EncodingConfig, book: Codebook) -> Vector:
    """Sum of role-bound value vectors; pair order never matters."""
    return _encode_object(dict(pairs), tuple(path), _Context(cfg, book))


def encode_value(value, cfg: EncodingConfig, book: Codebook, *, path=()) -> Vector:
    """Encode any JSON value; the root result honors cfg.normalize_top."""
    ctx = _Context(cfg, book)
    result = _encode(value, tuple(path), ctx)
    if cfg.normalize_top and not path:
        result = normalize(result)
    return result


def _encode(value, path: tuple, ctx: _Context) -> Vector:
    if isinstance(value, bool) or value is None:
        return ctx.book.literal_vector(value)
    if isinstance(value, str):
        order = _resolve(ctx.string_order, path, ctx.cfg.default_string_order)
        return encode_string(value, order, ctx.cfg, ctx.book)
    if isinstance(value, (int, float)):
        mode = _resolve(ctx.numeric, path, ctx.cfg.default_numeric)
        return encode_number(value, mode, ctx.cfg, ctx.book)
    if isinstance(value, Mapping):
        return _encode_object(value, path, ctx)
    if isinstance(value, (list, tuple)):
        return _encode_array(value, path, ctx)
    raise ValueError(f"cannot encode value of type {type(value).__name__} at {format_path(path) or '$'}")


def _encode_array(items, path: tuple, ctx: _Context) -> Vector:
    if not items:
        return ctx.book.zero()
    child_path = path + (ARRAY,)
    vectors = [_encode(item, child_path, ctx) for item in items]
    result = encode_sequence(vectors, ctx.book.seq_matrix())
    return normalize(result) if ctx.cfg.normalize_arrays else result


def _encode_object(pairs: Mapping, path: tuple, ctx: _Context) -> Vector:
    if not pairs:
        return ctx.book.zero()
    acc = ctx.book.zero()
    for key in sorted(pairs):
        if not isinstance(key, str):
            raise ValueError(f"object keys must be strings, got {key!r}")
        child_path = path + (key,)
        child = _encode(pairs[key], child_path, ctx)
        role = format_path(child_path) if ctx.cfg.roles_use_full_path else key
        acc += bind(ctx.book.role_matrix(role), child)
    return acc
