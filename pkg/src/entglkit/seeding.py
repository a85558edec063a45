"""Deterministic 64-bit seed derivation.

Every random stream in the package is addressed by a 64-bit integer.
Child streams are derived with :func:`mix`, which returns output
``idx + 1`` of the SplitMix64 sequence started at ``seed``::

    z  = seed + (idx + 1) * 0x9E3779B97F4A7C15        (mod 2**64)
    z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)

The constants are the published SplitMix64 ones, so the derivation can
be reproduced in any language.  The derived integer then seeds a numpy
``PCG64`` generator.
"""

from __future__ import annotations

import secrets

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def _finalize(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def mix(seed: int, idx: int) -> int:
    """Child seed number ``idx`` of ``seed``."""
    z = (int(seed) + (int(idx) + 1) * GOLDEN) & MASK64
    return _finalize(z)


def rng(seed: int) -> np.random.Generator:
    """A fresh generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def fresh_seed() -> int:
    """Random 63-bit seed for runs where the caller supplied none."""
    return secrets.randbits(63)


def as_generator(stream) -> np.random.Generator:
    """Accept a Generator, an integer seed or None."""
    if isinstance(stream, np.random.Generator):
        return stream
    if stream is None:
        return rng(fresh_seed())
    return rng(int(stream))
