"""Trellis-based maximum-likelihood sequential decoding with early elimination.

The search always expands the cheapest open path, where a path's cost is the
total reliability weight of the positions at which its labels disagree with
the hard decisions. The cost never decreases along a path, so the first path
to reach the end of the trellis is a maximum-likelihood codeword. Three
optional limits trade that guarantee for speed and memory:

* ``delta``: drop a popped path that is ``delta`` or more levels behind the
  deepest node expanded so far, without expanding it.
* ``tau``: once the search frontier is ``tau`` levels past the decided
  prefix, commit the older bits of the current top path and discard any
  path that disagrees with them.
* ``openmax``: cap the open stack; the worst path is evicted on overflow.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .channel import SoftObservation
from .conv_code import CodeSpec, encode
from .open_stack import OpenStack, PriorityKey, StackEntry
from .rng import SplitMix64


def _limit(value, name):
    if value is None or value == math.inf:
        return None
    if value != int(value) or value < 1:
        raise ValueError(f"{name} must be a positive integer or unbounded, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class DecoderConfig:
    """Decoder limits; ``None`` (or ``math.inf``) means unbounded."""

    delta: int | None = None
    tau: int | None = None
    openmax: int | None = None
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "delta", _limit(self.delta, "delta"))
        object.__setattr__(self, "tau", _limit(self.tau, "tau"))
        object.__setattr__(self, "openmax", _limit(self.openmax, "openmax"))
        object.__setattr__(self, "seed", int(self.seed) & ((1 << 64) - 1))


@dataclass
class DecoderStats:
    branch_computations: int = 0
    peak_stack: int = 0
    early_eliminations: int = 0
    merges: int = 0
    pops: int = 0
    ell_max_final: int = 0
    evictions: int = 0
    backsearch_drops: int = 0


@dataclass
class DecodeResult:
    message: np.ndarray | None
    codeword: np.ndarray | None
    metric: float
    stats: DecoderStats = field(default_factory=DecoderStats)

    @property
    def failed(self) -> bool:
        """True when every open path was eliminated before reaching the end."""
        return self.message is None


class SearchPath:
    __slots__ = ("state", "level", "metric", "parent", "bit")

    def __init__(self, state, level, metric, parent, bit):
        self.state = state
        self.level = level
        self.metric = metric
        self.parent = parent
        self.bit = bit

    def inputs(self) -> list[int]:
        bits = []
        node = self
        while node.parent is not None:
            bits.append(node.bit)
            node = node.parent
        bits.reverse()
        return bits


def branch_metric(obs: SoftObservation, level: int, outputs) -> float:
    n = len(outputs)
    if (level + 1) * n > len(obs):
        raise IndexError(f"level {level} is past the end of the observation")
    total = 0.0
    for i, x in enumerate(outputs):
        j = level * n + i
        if obs.y[j] != x:
            total += float(obs.w[j])
    return total


def path_metric(obs: SoftObservation, codeword, n: int = 1) -> float:
    """Weighted disagreement between ``codeword`` and the hard decisions.

    Summed ``n`` symbols per branch in trellis order, which is how the
    decoders accumulate, so with the code's ``n`` the result compares equal
    to a decoder metric.
    """
    cw = np.asarray(codeword, dtype=np.int8)
    if cw.size != len(obs) or cw.size % n:
        raise ValueError("codeword and observation lengths differ")
    terms = np.where(cw != obs.y, obs.w, 0.0).reshape(-1, n)
    acc = np.zeros(terms.shape[0])
    for i in range(n):
        acc = acc + terms[:, i]
    total = 0.0
    for b in acc.tolist():
        total += b
    return total


def branch_cost_table(code: CodeSpec, obs: SoftObservation) -> np.ndarray:
    """Cost of every n-bit output pattern at every level, shape (L+m, 2^n).

    Pattern ``p`` has output ``i`` equal to bit ``n-1-i`` of ``p``. Terms are
    accumulated in output order so that every decoder sees identical floats.
    """
    n = code.n
    if len(obs) != code.N:
        raise ValueError(f"observation has {len(obs)} symbols, code needs N={code.N}")
    y = obs.y.reshape(code.depth, n)
    w = obs.w.reshape(code.depth, n)
    table = np.zeros((code.depth, 1 << n))
    for p in range(1 << n):
        acc = np.zeros(code.depth)
        for i in range(n):
            bit = (p >> (n - 1 - i)) & 1
            acc = acc + np.where(y[:, i] != bit, w[:, i], 0.0)
        table[:, p] = acc
    return table


def output_patterns(code: CodeSpec) -> np.ndarray:
    _, out = code.tables
    n = code.n
    weights = 1 << np.arange(n - 1, -1, -1)
    return (out.astype(np.int64) * weights).sum(axis=2)


def check_openmax(code: CodeSpec, cfg: DecoderConfig) -> None:
    if cfg.openmax is not None and cfg.openmax < code.n_states:
        warnings.warn(
            f"openmax={cfg.openmax} is below the state count {code.n_states}; "
            "expect frequent evictions", stacklevel=3,
        )


def decode(
    code: CodeSpec,
    obs: SoftObservation,
    cfg: DecoderConfig = DecoderConfig(),
    on_decided: Callable[[int, list[int]], None] | None = None,
) -> DecodeResult:
    """Priority-first trellis search; see the module docstring for the limits.

    ``on_decided(start, bits)`` is called whenever the backsearch rule commits
    message bits ``start .. start+len(bits)-1``.
    """
    check_openmax(code, cfg)
    cost = branch_cost_table(code, obs).tolist()
    nxt = code.tables[0].tolist()
    pat = output_patterns(code).tolist()
    L, depth, S = code.L, code.depth, code.n_states
    delta, tau = cfg.delta, cfg.tau

    rnd = SplitMix64(cfg.seed)
    stats = DecoderStats()
    stack = OpenStack(cfg.openmax)
    closed = bytearray((depth + 1) * S)
    open_at: dict[int, StackEntry] = {}

    origin = SearchPath(0, 0, 0.0, None, 0)
    stack.push(StackEntry(PriorityKey(0.0, 0, rnd.next()), origin))
    open_at[0] = stack.peek_best()
    ell_max = 0
    decided = 0
    anchors = [origin]

    while stack:
        p = stack.pop_best().path
        del open_at[p.level * S + p.state]
        stats.pops += 1
        level = p.level

        if tau is not None:
            node = p
            while node.level > decided:
                node = node.parent
            if node is not anchors[node.level]:
                stats.backsearch_drops += 1
                continue

        if delta is not None and level <= ell_max - delta:
            stats.early_eliminations += 1
            continue
        if level > ell_max:
            ell_max = level

        if level == depth:
            stats.peak_stack = stack.peak_size()
            stats.ell_max_final = ell_max
            msg = np.asarray(p.inputs()[:L], dtype=np.int8)
            return DecodeResult(msg, encode(code, msg), p.metric, stats)

        if tau is not None and level - tau > decided:
            target = level - tau
            chain = []
            node = p
            while node.level > decided:
                if node.level <= target:
                    chain.append(node)
                node = node.parent
            chain.reverse()
            start = decided
            anchors.extend(chain)
            decided = target
            if on_decided is not None and start < L:
                on_decided(start, [nd.bit for nd in chain][: L - start])

        idx = level * S + p.state
        assert not closed[idx], "trellis node expanded twice"
        closed[idx] = 1

        s = p.state
        row = cost[level]
        for u in (0, 1) if level < L else (0,):
            ns = nxt[s][u]
            metric = p.metric + row[pat[s][u]]
            stats.branch_computations += 1
            assert metric >= p.metric
            cidx = (level + 1) * S + ns
            if closed[cidx]:
                continue
            other = open_at.get(cidx)
            if other is not None:
                stats.merges += 1
                om = other.key.metric
                if metric > om or (metric == om and rnd.next() >> 63 == 0):
                    continue
                stack.remove(other)
                del open_at[cidx]
            entry = StackEntry(
                PriorityKey(metric, level + 1, rnd.next()),
                SearchPath(ns, level + 1, metric, p, u),
            )
            evicted = stack.push(entry)
            if evicted is not entry:
                open_at[cidx] = entry
            if evicted is not None:
                stats.evictions += 1
                if evicted is not entry:
                    ev = evicted.path
                    del open_at[ev.level * S + ev.state]

    stats.peak_stack = stack.peak_size()
    stats.ell_max_final = ell_max
    return DecodeResult(None, None, math.inf, stats)


def decode_stream(
    code: CodeSpec,
    obs: SoftObservation,
    cfg: DecoderConfig,
    emit: Callable[[int, list[int]], None] | None = None,
) -> DecodeResult:
    """Decode with a finite backsearch limit, emitting committed bits as they fix."""
    if cfg.tau is None:
        raise ValueError("decode_stream needs a finite backsearch limit tau")
    return decode(code, obs, cfg, on_decided=emit)
