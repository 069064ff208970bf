"""Ground-truth decoders over the same terminated trellis.

Both accumulate path metrics one trellis level at a time, in level order, so
their floating-point metrics are bit-identical to the sequential decoder's
for the same path. Ties are broken deterministically, which means decoded
messages can differ from the randomized sequential decoder when metrics tie;
compare metrics, not messages.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SoftObservation
from .conv_code import CodeSpec, encode
from .decoder import DecodeResult, DecoderStats, branch_cost_table, output_patterns

MAX_EXHAUSTIVE_L = 20


@dataclass
class ViterbiState:
    """Survivor metric and predecessor per (level, state); inf marks unreachable."""

    metric: np.ndarray
    prev_state: np.ndarray


def viterbi_forward(code: CodeSpec, obs: SoftObservation) -> ViterbiState:
    cost = branch_cost_table(code, obs)
    pat = output_patterns(code)
    S, m, L, depth = code.n_states, code.m, code.L, code.depth
    metric = np.full((depth + 1, S), np.inf)
    prev = np.full((depth + 1, S), -1, dtype=np.int64)
    metric[0, 0] = 0.0

    ns = np.arange(S)
    # both predecessors of ns share input bit ns & 1; they differ in the bit
    # that leaves the register. Index 0 (leaving bit 0) wins ties.
    p0 = ns >> 1
    p1 = p0 | (1 << (m - 1))
    u = ns & 1
    for lvl in range(depth):
        c0 = metric[lvl, p0] + cost[lvl, pat[p0, u]]
        c1 = metric[lvl, p1] + cost[lvl, pat[p1, u]]
        if lvl >= L:
            # termination tail: only zero inputs are allowed
            c0 = np.where(u == 0, c0, np.inf)
            c1 = np.where(u == 0, c1, np.inf)
        take1 = c1 < c0
        metric[lvl + 1] = np.where(take1, c1, c0)
        prev[lvl + 1] = np.where(take1, p1, p0)
    return ViterbiState(metric, prev)


def viterbi_decode(code: CodeSpec, obs: SoftObservation) -> DecodeResult:
    st = viterbi_forward(code, obs)
    depth = code.depth
    bits = np.empty(depth, dtype=np.int8)
    s = 0
    for lvl in range(depth, 0, -1):
        bits[lvl - 1] = s & 1
        s = st.prev_state[lvl, s]
    msg = bits[: code.L].copy()
    total = 2 * ((1 << code.m) * code.L - (code.m - 2) * (1 << code.m) - 2)
    stats = DecoderStats(branch_computations=total)
    return DecodeResult(msg, encode(code, msg), float(st.metric[depth, 0]), stats)


def generator_matrix(code: CodeSpec) -> np.ndarray:
    """Rows are the codewords of unit-impulse messages, shape (L, N)."""
    G = np.zeros((code.L, code.N), dtype=np.int8)
    for k in range(code.L):
        e = np.zeros(code.L, dtype=np.int8)
        e[k] = 1
        G[k] = encode(code, e)
    return G


def exhaustive_ml(code: CodeSpec, obs: SoftObservation, chunk: int = 1 << 14) -> DecodeResult:
    """Minimum-metric codeword by enumerating all 2^L messages.

    Messages are enumerated in lexicographic order (bit 0 most significant),
    and the first minimum wins.
    """
    L = code.L
    if L > MAX_EXHAUSTIVE_L:
        raise ValueError(f"exhaustive search limited to L <= {MAX_EXHAUSTIVE_L}, got {L}")
    cost = branch_cost_table(code, obs)
    G = generator_matrix(code).astype(np.int64)
    n, depth = code.n, code.depth
    weights = 1 << np.arange(n - 1, -1, -1)
    shifts = np.arange(L - 1, -1, -1)

    best_metric = np.inf
    best_index = -1
    total = 1 << L
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        msgs = (idx[:, None] >> shifts) & 1
        cws = (msgs @ G) & 1
        pats = (cws.reshape(-1, depth, n) * weights).sum(axis=2)
        acc = np.zeros(idx.size)
        for lvl in range(depth):
            acc = acc + cost[lvl, pats[:, lvl]]
        k = int(np.argmin(acc))
        if acc[k] < best_metric:
            best_metric = float(acc[k])
            best_index = int(idx[k])
    msg = ((best_index >> shifts) & 1).astype(np.int8)
    return DecodeResult(msg, encode(code, msg), best_metric, DecoderStats())
