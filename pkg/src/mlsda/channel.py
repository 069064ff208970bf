"""Binary-input channels and the hard-decision / reliability split.

Decoders never see log-likelihood ratios directly. They get the sign as a hard
decision ``y`` and the magnitude as a weight ``w``. Every decoder comparison is
a positive linear functional of the weights, so any positive rescaling is
harmless: BSC weights are all 1 and AWGN weights are ``|r|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc


@dataclass(frozen=True)
class Bsc:
    epsilon: float

    def __post_init__(self):
        if not 0.0 < self.epsilon < 0.5:
            raise ValueError(f"crossover probability must be in (0, 0.5), got {self.epsilon}")


@dataclass(frozen=True)
class AwgnBpsk:
    """BPSK (0 -> +1, 1 -> -1) over AWGN at a given Eb/N0 for a code of ``rate_bits``."""

    ebn0_db: float
    rate_bits: float

    def __post_init__(self):
        if not math.isfinite(self.ebn0_db):
            raise ValueError("Eb/N0 must be finite")
        if not 0.0 < self.rate_bits <= 1.0:
            raise ValueError(f"rate must be in (0, 1], got {self.rate_bits}")

    @property
    def sigma(self) -> float:
        return math.sqrt(1.0 / (2.0 * self.rate_bits * 10.0 ** (self.ebn0_db / 10.0)))


ChannelModel = Bsc | AwgnBpsk


@dataclass(frozen=True)
class SoftObservation:
    y: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        y = np.ascontiguousarray(self.y, dtype=np.int8)
        w = np.ascontiguousarray(self.w, dtype=np.float64)
        if y.shape != w.shape or y.ndim != 1:
            raise ValueError("hard decisions and weights must be 1-D of equal length")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise ValueError("reliability weights must be finite and nonnegative")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)

    def __len__(self):
        return self.y.size

    def scaled(self, factor: float) -> "SoftObservation":
        if factor <= 0:
            raise ValueError("scale factor must be positive")
        return SoftObservation(self.y, self.w * factor)

    @classmethod
    def hard(cls, y) -> "SoftObservation":
        y = np.asarray(y, dtype=np.int8)
        return cls(y, np.ones(y.size))

    @classmethod
    def from_llr(cls, llr) -> "SoftObservation":
        """Split log-likelihood ratios ``log P(r|0)/P(r|1)`` into sign and magnitude."""
        llr = np.asarray(llr, dtype=np.float64)
        return cls((llr < 0).astype(np.int8), np.abs(llr))


def ebn0_to_epsilon(ebn0_db: float) -> float:
    """Crossover probability ``erfc(sqrt(Eb/N0)) / 2`` used to quote BSC results in dB.

    No code-rate factor appears under the square root; this is a labelling
    convention, not the hard-decision BPSK crossover of a rate-R code.
    """
    if ebn0_db == -math.inf:
        return 0.5
    return 0.5 * float(erfc(math.sqrt(10.0 ** (ebn0_db / 10.0))))


def transmit(cw, ch: ChannelModel, rng: np.random.Generator, *, noiseless: bool = False) -> np.ndarray:
    """Send codeword bits through ``ch``.

    BSC output is a bit array; AWGN output is the real-valued BPSK samples.
    ``noiseless`` switches the noise draw off (used by tests).
    """
    cw = np.asarray(cw, dtype=np.int8)
    if isinstance(ch, Bsc):
        if noiseless:
            return cw.copy()
        flips = rng.random(cw.size) < ch.epsilon
        return cw ^ flips.astype(np.int8)
    if isinstance(ch, AwgnBpsk):
        x = 1.0 - 2.0 * cw
        if noiseless:
            return x
        return x + ch.sigma * rng.standard_normal(cw.size)
    raise TypeError(f"unknown channel {ch!r}")


def soften(rx, ch: ChannelModel) -> SoftObservation:
    rx = np.asarray(rx)
    if isinstance(ch, Bsc):
        if not np.all((rx == 0) | (rx == 1)):
            raise ValueError("BSC output must be binary")
        return SoftObservation(rx.astype(np.int8), np.ones(rx.size))
    if isinstance(ch, AwgnBpsk):
        r = rx.astype(np.float64)
        return SoftObservation((r < 0).astype(np.int8), np.abs(r))
    raise TypeError(f"unknown channel {ch!r}")
