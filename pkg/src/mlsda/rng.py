"""Seeded random streams.

Channel noise uses numpy generators keyed by ``(master seed, indices...)`` so
each Monte-Carlo trial owns an independent stream regardless of execution
order. Decoder tie-breaking uses splitmix64, which is small enough to run
identically in the pure-Python decoder and the compiled kernel.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state; returns ``(new_state, output)``."""
    state = (state + GOLDEN) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return state, z ^ (z >> 31)


class SplitMix64:
    """64-bit tiebreak source for the decoder."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next(self) -> int:
        self.state, out = splitmix64_next(self.state)
        return out


def derive_seed(*words: int) -> int:
    """Hash a tuple of nonnegative integers into a 64-bit seed."""
    ss = np.random.SeedSequence([int(w) for w in words])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def trial_stream(*words: int) -> np.random.Generator:
    return np.random.default_rng([int(w) for w in words])
