"""Compiled twin of :func:`mlsda.decoder.decode` for Monte-Carlo runs.

Same search, same DEAP ordering, same splitmix64 draw order, so results and
statistics match the reference decoder exactly. Paths live in flat arrays
indexed by creation order; a node id doubles as the insertion serial.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .decoder import (
    DecodeResult, DecoderConfig, DecoderStats, branch_cost_table, check_openmax, output_patterns,
)
from .conv_code import CodeSpec, encode
from .channel import SoftObservation

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# stats slots
BRANCH, PEAK, EARLY, MERGES, POPS, ELLMAX, EVICT, BSDROP = range(8)


@njit(cache=True, inline="always")
def _next(rs):
    rs[0] += _GOLDEN
    z = rs[0]
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _less(hm, hl, ht, hi, a, b):
    # compares heap slots a and b: metric asc, level desc, tiebreak asc, serial asc
    if hm[a] != hm[b]:
        return hm[a] < hm[b]
    if hl[a] != hl[b]:
        return hl[a] > hl[b]
    if ht[a] != ht[b]:
        return ht[a] < ht[b]
    return hi[a] < hi[b]


@njit(cache=True, inline="always")
def _lvl(i):
    lv = 0
    while i > 1:
        i >>= 1
        lv += 1
    return lv


@njit(cache=True, inline="always")
def _swap(hm, hl, ht, hi, pos, i, j):
    hm[i], hm[j] = hm[j], hm[i]
    hl[i], hl[j] = hl[j], hl[i]
    ht[i], ht[j] = ht[j], ht[i]
    a = hi[i]
    b = hi[j]
    hi[i] = b
    hi[j] = a
    pos[b] = i
    pos[a] = j


@njit(cache=True, inline="always")
def _sift_up(hm, hl, ht, hi, pos, i, top, want_less):
    while i > top:
        p = i >> 1
        if _less(hm, hl, ht, hi, i, p) == want_less:
            _swap(hm, hl, ht, hi, pos, i, p)
            i = p
        else:
            break


@njit(cache=True, inline="always")
def _sift_down(hm, hl, ht, hi, pos, n, i, want_less):
    while True:
        c = 2 * i
        if c > n:
            return i
        if c + 1 <= n and _less(hm, hl, ht, hi, c + 1, c) == want_less:
            c += 1
        if _less(hm, hl, ht, hi, c, i) == want_less:
            _swap(hm, hl, ht, hi, pos, i, c)
            i = c
        else:
            return i


@njit(cache=True, inline="always")
def _fix(hm, hl, ht, hi, pos, n, i):
    lv = _lvl(i)
    half = 1 << (lv - 1)
    if i - (1 << lv) < half:
        if i > 2 and _less(hm, hl, ht, hi, i, i >> 1):
            _sift_up(hm, hl, ht, hi, pos, i, 2, True)
            return
        q = _sift_down(hm, hl, ht, hi, pos, n, i, True)
        j = q + (1 << (_lvl(q) - 1))
        if j > n:
            j >>= 1
        if j > 1 and _less(hm, hl, ht, hi, j, q):
            _swap(hm, hl, ht, hi, pos, q, j)
            _sift_up(hm, hl, ht, hi, pos, j, 3, False)
    else:
        if i > 3 and _less(hm, hl, ht, hi, i >> 1, i):
            _sift_up(hm, hl, ht, hi, pos, i, 3, False)
            return
        q = _sift_down(hm, hl, ht, hi, pos, n, i, False)
        z = q - (1 << (_lvl(q) - 1))
        best = z
        c = 2 * z
        if c <= n and 2 * q > n and _less(hm, hl, ht, hi, best, c):
            best = c
        c = 2 * z + 1
        if c <= n and 2 * q + 1 > n and _less(hm, hl, ht, hi, best, c):
            best = c
        if _less(hm, hl, ht, hi, q, best):
            _swap(hm, hl, ht, hi, pos, q, best)
            _sift_up(hm, hl, ht, hi, pos, best, 2, True)


@njit(cache=True, inline="always")
def _remove(hm, hl, ht, hi, pos, n, node):
    """Remove ``node``; returns the new last index."""
    p = pos[node]
    if p != n:
        hm[p] = hm[n]
        hl[p] = hl[n]
        ht[p] = ht[n]
        hi[p] = hi[n]
        pos[hi[p]] = p
        n -= 1
        _fix(hm, hl, ht, hi, pos, n, p)
    else:
        n -= 1
    pos[node] = -1
    return n


@njit(cache=True, inline="always")
def _push(hm, hl, ht, hi, pos, n, node, metric, level, tb):
    n += 1
    hm[n] = metric
    hl[n] = level
    ht[n] = tb
    hi[n] = node
    pos[node] = n
    _fix(hm, hl, ht, hi, pos, n, n)
    return n


@njit(cache=True)
def _decode(cost, nxt, pat, L, depth, S, delta, tau, openmax, seed, work, keys, msg):
    """Search on a cost table; writes the message into ``msg``.

    ``work`` is an (8, cap) int64 scratch block and ``keys`` a (2, cap) float64
    one, with cap at least ``2 * depth * S + 3``: every trellis node is expanded
    at most once, so no search creates more paths than that.
    Returns ``(found, metric, stats)``.
    """
    rs = np.empty(1, dtype=np.uint64)
    rs[0] = seed
    stats = np.zeros(8, dtype=np.int64)

    # per-node rows, indexed by creation order
    km = keys[0]
    kl = work[0]
    ks = work[1]
    kp = work[2]
    kb = work[3]
    pos = work[4]
    # DEAP slots carry their keys inline; slot 1 stays empty
    hm = keys[1]
    hl = work[5]
    ht = work[6].view(np.uint64)
    hi = work[7]

    closed = np.zeros((depth + 1) * S, dtype=np.uint8)
    open_at = np.full((depth + 1) * S, -1, dtype=np.int64)
    anchors = np.full(depth + 1, -1, dtype=np.int64)

    km[0] = 0.0
    kl[0] = 0
    ks[0] = 0
    kp[0] = -1
    kb[0] = 0
    n = _push(hm, hl, ht, hi, pos, 1, 0, 0.0, 0, _next(rs))
    nodes = 1
    peak = 1
    open_at[0] = 0
    anchors[0] = 0
    ell_max = 0
    decided = 0

    while n >= 2:
        p = hi[2]
        n = _remove(hm, hl, ht, hi, pos, n, p)
        level = kl[p]
        st = ks[p]
        open_at[level * S + st] = -1
        stats[POPS] += 1

        if tau > 0:
            node = p
            while kl[node] > decided:
                node = kp[node]
            if node != anchors[kl[node]]:
                stats[BSDROP] += 1
                continue

        if delta > 0 and level <= ell_max - delta:
            stats[EARLY] += 1
            continue
        if level > ell_max:
            ell_max = level

        if level == depth:
            stats[PEAK] = peak
            stats[ELLMAX] = ell_max
            node = p
            while kp[node] >= 0:
                if kl[node] <= L:
                    msg[kl[node] - 1] = kb[node]
                node = kp[node]
            return True, km[p], stats

        if tau > 0 and level - tau > decided:
            target = level - tau
            node = p
            while kl[node] > decided:
                if kl[node] <= target:
                    anchors[kl[node]] = node
                node = kp[node]
            decided = target

        idx = level * S + st
        if closed[idx]:
            raise AssertionError("trellis node expanded twice")
        closed[idx] = 1

        pm = km[p]
        nin = 2 if level < L else 1
        for u in range(nin):
            ns = nxt[st, u]
            metric = pm + cost[level, pat[st, u]]
            stats[BRANCH] += 1
            if metric < pm:
                raise AssertionError("path metric decreased")
            cidx = (level + 1) * S + ns
            if closed[cidx]:
                continue
            other = open_at[cidx]
            if other >= 0:
                stats[MERGES] += 1
                om = km[other]
                if metric > om:
                    continue
                if metric == om and (_next(rs) >> np.uint64(63)) == np.uint64(0):
                    continue
                n = _remove(hm, hl, ht, hi, pos, n, other)
                open_at[cidx] = -1

            c = nodes
            nodes += 1
            km[c] = metric
            kl[c] = level + 1
            ks[c] = ns
            kp[c] = p
            kb[c] = u
            n = _push(hm, hl, ht, hi, pos, n, c, metric, level + 1, _next(rs))
            open_at[cidx] = c
            if openmax > 0 and n - 1 > openmax:
                worst = hi[3] if n >= 3 else hi[2]
                n = _remove(hm, hl, ht, hi, pos, n, worst)
                open_at[kl[worst] * S + ks[worst]] = -1
                stats[EVICT] += 1
            elif n - 1 > peak:
                peak = n - 1

    stats[PEAK] = peak
    stats[ELLMAX] = ell_max
    return False, np.inf, stats


def _unbounded(v):
    return -1 if v is None else int(v)


class FastDecoder:
    """Compiled decoder bound to one code; precomputes the trellis tables."""

    def __init__(self, code: CodeSpec):
        self.code = code
        nxt, _ = code.tables
        self._nxt = np.ascontiguousarray(nxt, dtype=np.int64)
        self._pat = np.ascontiguousarray(output_patterns(code), dtype=np.int64)
        cap = 2 * code.depth * code.n_states + 3
        self._work = np.empty((8, cap), dtype=np.int64)
        self._keys = np.empty((2, cap), dtype=np.float64)

    def decode_table(self, cost: np.ndarray, cfg: DecoderConfig):
        """Run on a precomputed branch-cost table; returns ``(message|None, metric, stats)``."""
        code = self.code
        msg = np.zeros(code.L, dtype=np.int8)
        found, metric, stats = _decode(
            cost, self._nxt, self._pat, code.L, code.depth, code.n_states,
            _unbounded(cfg.delta), _unbounded(cfg.tau), _unbounded(cfg.openmax),
            np.uint64(cfg.seed), self._work, self._keys, msg,
        )
        return (msg if found else None), float(metric), stats

    def decode(self, obs: SoftObservation, cfg: DecoderConfig = DecoderConfig()) -> DecodeResult:
        check_openmax(self.code, cfg)
        msg, metric, s = self.decode_table(branch_cost_table(self.code, obs), cfg)
        stats = DecoderStats(
            branch_computations=int(s[BRANCH]), peak_stack=int(s[PEAK]),
            early_eliminations=int(s[EARLY]), merges=int(s[MERGES]), pops=int(s[POPS]),
            ell_max_final=int(s[ELLMAX]), evictions=int(s[EVICT]),
            backsearch_drops=int(s[BSDROP]),
        )
        if msg is None:
            return DecodeResult(None, None, metric, stats)
        return DecodeResult(msg, encode(self.code, msg), metric, stats)
