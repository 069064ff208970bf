"""Binary rate-1/n convolutional codes and their terminated block view.

State convention: the state holds the last ``m`` input bits with the most
recent one in the low-order position, so ``next = ((state << 1) | u) mod 2^m``.
Tap 0 of every generator multiplies the current input bit and tap ``m``
multiplies the oldest register bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

_OCTAL = set("01234567")


def parse_generators(octal_strings: Sequence[str], m: int) -> list[tuple[int, ...]]:
    """Expand octal generator strings into tap vectors of length ``m + 1``.

    Each octal digit becomes three bits, most significant first, and the
    leading ``m + 1`` bits are the taps. Any bit past position ``m`` must be
    zero, which is how ``554`` denotes the 7-tap polynomial ``1011011``.

    >>> parse_generators(["554", "774"], 6)
    [(1, 0, 1, 1, 0, 1, 1), (1, 1, 1, 1, 1, 1, 1)]
    """
    if m < 1:
        raise ValueError(f"memory order must be positive, got {m}")
    taps = []
    for text in octal_strings:
        text = text.strip()
        if not text or not set(text) <= _OCTAL:
            raise ValueError(f"not an octal generator: {text!r}")
        bits = [int(b) for digit in text for b in format(int(digit), "03b")]
        if len(bits) < m + 1:
            raise ValueError(
                f"generator {text!r} expands to {len(bits)} bits, need at least {m + 1}"
            )
        if any(bits[m + 1 :]):
            raise ValueError(
                f"generator {text!r} has a nonzero bit beyond tap {m}; "
                "constraint length is ambiguous"
            )
        taps.append(tuple(bits[: m + 1]))
    return taps


@dataclass(frozen=True)
class CodeSpec:
    """An (n, 1, m) convolutional code terminated after ``L`` message bits."""

    generators: tuple[tuple[int, ...], ...]
    L: int
    name: str = field(default="", compare=False)

    def __post_init__(self):
        gens = tuple(tuple(int(b) for b in g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise ValueError("need at least one generator")
        width = len(gens[0])
        if width < 2:
            raise ValueError("memory order must be at least 1")
        for g in gens:
            if len(g) != width:
                raise ValueError("all generators must have m+1 taps")
            if any(b not in (0, 1) for b in g):
                raise ValueError("taps must be binary")
        if not any(g[0] for g in gens):
            raise ValueError("no generator uses the current input bit (tap 0)")
        if not any(g[-1] for g in gens):
            raise ValueError("no generator uses the oldest register bit (tap m)")
        if self.L < 1:
            raise ValueError(f"message length must be positive, got {self.L}")

    @classmethod
    def from_octal(cls, octal: str | Sequence[str], m: int, L: int) -> "CodeSpec":
        if isinstance(octal, str):
            octal = [s for s in octal.split(",") if s.strip()]
        gens = parse_generators(octal, m)
        return cls(tuple(gens), L, name=",".join(s.strip() for s in octal))

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def m(self) -> int:
        return len(self.generators[0]) - 1

    @property
    def K(self) -> int:
        return self.L

    @property
    def N(self) -> int:
        return self.n * (self.L + self.m)

    @property
    def rate(self) -> float:
        return self.K / self.N

    @property
    def n_states(self) -> int:
        return 1 << self.m

    @property
    def depth(self) -> int:
        """Number of trellis levels traversed, ``L + m``."""
        return self.L + self.m

    def with_length(self, L: int) -> "CodeSpec":
        return CodeSpec(self.generators, L, name=self.name)

    @cached_property
    def _masks(self) -> tuple[int, ...]:
        # bit k of the register word (u | state << 1) is the input delayed by k
        return tuple(sum(t << k for k, t in enumerate(g)) for g in self.generators)

    @cached_property
    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(next_state, outputs)`` lookup arrays of shape (S, 2) and (S, 2, n)."""
        S = self.n_states
        nxt = np.empty((S, 2), dtype=np.int64)
        out = np.empty((S, 2, self.n), dtype=np.int8)
        for s in range(S):
            for u in (0, 1):
                ns, o = trellis_step(self, s, u)
                nxt[s, u] = ns
                out[s, u] = o
        nxt.flags.writeable = False
        out.flags.writeable = False
        return nxt, out


def trellis_step(code: CodeSpec, state: int, input_bit: int) -> tuple[int, tuple[int, ...]]:
    """One encoder transition from ``state`` on ``input_bit``."""
    if not 0 <= state < code.n_states:
        raise ValueError(f"state {state} out of range for m={code.m}")
    reg = (input_bit & 1) | (state << 1)
    outputs = tuple(bin(reg & mask).count("1") & 1 for mask in code._masks)
    return ((state << 1) | (input_bit & 1)) & (code.n_states - 1), outputs


def encode(code: CodeSpec, msg) -> np.ndarray:
    """Encode ``L`` message bits followed by ``m`` flushing zeros.

    Output bit ``l*n + i`` is generator ``i`` applied to the register at input
    step ``l``. The returned array has length ``N = n(L+m)``.
    """
    msg = np.asarray(msg, dtype=np.int8).ravel()
    if msg.size != code.L:
        raise ValueError(f"message has {msg.size} bits, code expects L={code.L}")
    if msg.size and (msg.min() < 0 or msg.max() > 1):
        raise ValueError("message bits must be 0 or 1")
    u = np.concatenate([msg, np.zeros(code.m, dtype=np.int8)]).astype(np.int64)
    out = np.empty((code.depth, code.n), dtype=np.int8)
    for i, g in enumerate(code.generators):
        out[:, i] = np.convolve(u, np.asarray(g, dtype=np.int64))[: code.depth] & 1
    return out.ravel()


def encode_path(code: CodeSpec, inputs) -> tuple[np.ndarray, int]:
    """Walk the trellis from state 0 on ``inputs``; return outputs and final state."""
    state = 0
    out = []
    for u in inputs:
        state, o = trellis_step(code, state, int(u))
        out.extend(o)
    return np.asarray(out, dtype=np.int8), state
