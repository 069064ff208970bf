import numpy as np
import pytest

from mlsda.channel import AwgnBpsk, Bsc, soften, transmit
from mlsda.conv_code import CodeSpec, encode


def noisy_trial(code: CodeSpec, ch, rng):
    msg = rng.integers(0, 2, code.L).astype(np.int8)
    return msg, soften(transmit(encode(code, msg), ch, rng), ch)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def fast():
    from mlsda._kernel import FastDecoder

    cache = {}

    def get(code):
        key = (code.generators, code.L)
        if key not in cache:
            cache[key] = FastDecoder(code)
        return cache[key]

    return get


CODES = {
    "k3": ("7,5", 2),
    "k4": ("64,74", 3),
    "k7": ("554,774", 6),
    "r3k9": ("557,663,711", 8),
}


def code_of(name, L):
    octal, m = CODES[name]
    return CodeSpec.from_octal(octal, m, L)


def channel_of(kind, code, level):
    return Bsc(level) if kind == "bsc" else AwgnBpsk(level, 1 / code.n)


VERDICTS: dict[int, str] = {}


def record_verdict(number: int, ok: bool, detail: str) -> bool:
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    VERDICTS[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[k])
