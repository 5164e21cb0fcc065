"""Deterministic seed derivation and per-trial RNG streams.

Derived seeds are pure functions of integers and names, built from two
published mixers so that independent implementations can agree bit for bit:

- ``fnv1a64``: FNV-1a over UTF-8 bytes, offset basis ``0xcbf29ce484222325``,
  prime ``0x100000001b3``, all arithmetic mod 2**64.
- ``splitmix64``: one SplitMix64 step, i.e. add the golden gamma
  ``0x9E3779B97F4A7C15`` and apply the finalizer.

A (namespace, name) pair under a master seed maps to the stream seed

    splitmix64(master_seed XOR splitmix64(fnv1a64(namespace + "\\x1f" + name)))

which then seeds numpy's PCG64. Simulation trials instead use the Philox
counter-based generator keyed by (run seed, trial index), so per-trial
streams are independent of execution order and chunking.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a64(data: bytes) -> int:
    """64-bit FNV-1a hash of a byte string."""
    h = 0xCBF29CE484222325
    for b in data:
        h ^= b
        h = (h * 0x100000001B3) & _MASK64
    return h


def splitmix64(x: int) -> int:
    """One SplitMix64 step: golden-gamma increment plus finalizer."""
    z = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def mix_seed(master_seed: int, salt: int) -> int:
    """Combine a master seed with a salt into one 64-bit stream seed."""
    return splitmix64((master_seed & _MASK64) ^ splitmix64(salt & _MASK64))


def name_salt(namespace: str, name: str) -> int:
    """Stable 64-bit hash of a namespaced name (unit separator 0x1f)."""
    return fnv1a64(f"{namespace}\x1f{name}".encode("utf-8"))


def derive_seed(master_seed: int, namespace: str, name: str) -> int:
    """Stream seed for a named entity under a master seed."""
    return mix_seed(master_seed, name_salt(namespace, name))


def rng_from_seed(seed: int) -> np.random.Generator:
    """PCG64 generator for a derived 64-bit seed."""
    return np.random.default_rng(seed & _MASK64)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based generator for one simulation trial.

    Philox is keyed by the pair (seed, trial), so streams for different
    trials never overlap and do not depend on how many values earlier
    trials consumed.
    """
    key = np.array([seed & _MASK64, trial & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
