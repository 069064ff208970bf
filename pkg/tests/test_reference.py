import numpy as np
import pytest

from mlsda.channel import SoftObservation
from mlsda.conv_code import encode
from mlsda.decoder import path_metric
from mlsda.reference import exhaustive_ml, generator_matrix, viterbi_decode, viterbi_forward

from conftest import channel_of, code_of, noisy_trial


def reachable_branches(code):
    """Count trellis edges by walking reachable states level by level."""
    nxt, _ = code.tables
    states = {0}
    total = 0
    for level in range(code.depth):
        inputs = (0, 1) if level < code.L else (0,)
        total += len(states) * len(inputs)
        states = {int(nxt[s, u]) for s in states for u in inputs}
    assert states == {0}
    return total


def test_noiseless_viterbi(rng):
    code = code_of("k7", 50)
    msg = rng.integers(0, 2, 50)
    res = viterbi_decode(code, SoftObservation.hard(encode(code, msg)))
    assert np.array_equal(res.message, msg) and res.metric == 0.0


@pytest.mark.parametrize("name, L", [("k3", 10), ("k4", 9), ("k7", 8), ("r3k9", 6)])
def test_viterbi_equals_exhaustive(rng, name, L):
    code = code_of(name, L)
    for kind, level in (("bsc", 0.12), ("awgn", 0.5)):
        for _ in range(15):
            _, obs = noisy_trial(code, channel_of(kind, code, level), rng)
            assert viterbi_decode(code, obs).metric == exhaustive_ml(code, obs).metric


def test_exhaustive_small_cases():
    code = code_of("k3", 1)
    obs = SoftObservation.hard([1, 1, 1, 0, 1, 0])
    res = exhaustive_ml(code, obs)
    assert res.message.tolist() == [1] and res.metric == 1.0
    code = code_of("k7", 6)
    zero_w = SoftObservation(np.ones(code.N, dtype=np.int8), np.zeros(code.N))
    res = exhaustive_ml(code, zero_w)
    assert res.metric == 0.0 and not res.message.any()
    with pytest.raises(ValueError):
        exhaustive_ml(code_of("k3", 21), SoftObservation.hard(np.zeros(2 * 23)))


def test_wagner_rule_equivalence(rng):
    code = code_of("k7", 30)
    for _ in range(20):
        _, obs = noisy_trial(code, channel_of("awgn", code, 1.0), rng)
        res = viterbi_decode(code, obs)
        e = obs.y ^ res.codeword
        assert np.array_equal(obs.y ^ e, res.codeword)
        assert res.metric == pytest.approx(float(np.sum(e * obs.w)), rel=1e-12)
        assert res.metric == path_metric(obs, res.codeword, code.n)


def test_survivor_metrics_are_minimal(rng):
    code = code_of("k3", 6)
    _, obs = noisy_trial(code, channel_of("awgn", code, 0.0), rng)
    st = viterbi_forward(code, obs)
    # brute force every input prefix for the first L levels
    nxt, out = code.tables
    best = {}
    for word in range(1 << code.L):
        s, acc = 0, 0.0
        for level in range(code.L):
            u = (word >> (code.L - 1 - level)) & 1
            o = out[s, u]
            acc += float(np.sum(obs.w[level * 2: level * 2 + 2] * (obs.y[level * 2: level * 2 + 2] != o)))
            s = int(nxt[s, u])
        best[s] = min(best.get(s, np.inf), acc)
    for s, v in best.items():
        assert st.metric[code.L, s] == pytest.approx(v, abs=1e-12)


@pytest.mark.parametrize("name, L", [("k3", 7), ("k7", 200), ("r3k9", 30)])
def test_branch_count_formula(name, L):
    code = code_of(name, L)
    res = viterbi_decode(code, SoftObservation.hard(np.zeros(code.N)))
    assert res.stats.branch_computations == reachable_branches(code)


def test_trellis_branch_bound_per_bit():
    code = code_of("k7", 200)
    assert reachable_branches(code) / code.L == pytest.approx(125.42)


def test_generator_rows_are_impulses():
    code = code_of("k3", 4)
    G = generator_matrix(code)
    assert G.shape == (4, code.N)
    assert G[0, :6].tolist() == [1, 1, 1, 0, 1, 1]
