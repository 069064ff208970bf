"""Monte-Carlo BER / complexity / stack-size experiments.

Every trial draws its message and channel noise from a stream keyed by
``(seed, point index, trial index)``, so all windows at one operating point
see the same noise and their BER differences are paired. The decoder's
tiebreak stream is keyed by ``(seed, point index, window index, trial index)``.
"""

from __future__ import annotations

import csv
import logging
import math
import time
import warnings
from dataclasses import dataclass, field, fields, replace
from typing import Sequence

import numpy as np

from .channel import AwgnBpsk, Bsc, ebn0_to_epsilon, soften, transmit
from .conv_code import CodeSpec, encode
from .decoder import DecoderConfig, branch_cost_table, check_openmax
from .rng import derive_seed, trial_stream

log = logging.getLogger(__name__)

EPS_CONVENTIONS = ("uncoded", "coded")


def epsilon_for(ebn0_db: float, convention: str = "uncoded", rate: float = 1.0) -> float:
    """Map Eb/N0 to a BSC crossover.

    ``uncoded`` is ``erfc(sqrt(Eb/N0))/2``. ``coded`` puts the code rate
    under the root, giving the crossover of hard-decision BPSK.
    """
    if convention == "uncoded":
        return ebn0_to_epsilon(ebn0_db)
    if convention == "coded":
        return ebn0_to_epsilon(ebn0_db + 10.0 * math.log10(rate))
    raise ValueError(f"unknown Eb/N0 convention {convention!r}")


@dataclass
class SimConfig:
    code: str = "554,774"
    m: int = 6
    L: int = 200
    channel: str = "bsc"
    ebn0: list[float] | None = None
    epsilon: list[float] | None = None
    eps_convention: str = "uncoded"
    delta: list[int | None] = field(default_factory=lambda: [None])
    tau: int | None = None
    openmax: int | None = None
    trials: int = 1000
    target_errors: int | None = None
    seed: int = 0
    out: str | None = None
    n: int | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.channel not in ("bsc", "awgn"):
            raise ValueError(f"unknown channel {self.channel!r}")
        if self.eps_convention not in EPS_CONVENTIONS:
            raise ValueError(f"eps_convention must be one of {EPS_CONVENTIONS}")
        if self.channel == "awgn" and not self.ebn0:
            raise ValueError("awgn channel needs an Eb/N0 sweep")
        if not self.ebn0 and not self.epsilon:
            raise ValueError("sweep is empty: give Eb/N0 values or crossover probabilities")
        if self.ebn0 and self.epsilon:
            raise ValueError("give either Eb/N0 values or crossover probabilities, not both")
        if not self.delta:
            raise ValueError("need at least one window")
        if self.target_errors is not None and self.target_errors < 1:
            raise ValueError("target_errors must be positive")
        code = self.code_spec()
        if self.n is not None and self.n != code.n:
            raise ValueError(f"code {self.code} has n={code.n}, config says n={self.n}")
        for d in self.delta:
            DecoderConfig(delta=d)
        check_openmax(code, DecoderConfig(tau=self.tau, openmax=self.openmax))

    def code_spec(self) -> CodeSpec:
        return CodeSpec.from_octal(self.code, self.m, self.L)

    def points(self) -> list[tuple[float | None, float | None, object]]:
        """``(ebn0_db, epsilon, channel)`` per operating point.

        Energy per information bit is scaled with the nominal rate ``1/n``,
        not the terminated block rate ``L/(n(L+m))``.
        """
        rate = 1.0 / self.code_spec().n
        pts = []
        if self.ebn0:
            for db in self.ebn0:
                if self.channel == "awgn":
                    pts.append((db, None, AwgnBpsk(db, rate)))
                else:
                    eps = epsilon_for(db, self.eps_convention, rate)
                    pts.append((db, eps, Bsc(eps)))
        else:
            for eps in self.epsilon:
                pts.append((None, eps, Bsc(eps)))
        return pts


@dataclass
class SimRecord:
    code_id: str
    ebn0_db: float | None
    epsilon: float | None
    delta: int | None
    tau: int | None
    openmax: int | None
    trials: int
    info_bits: int
    bit_errors: int
    ber: float
    decode_failures: int
    avg_branch_computations_per_bit: float
    p999_stack_size: int
    mean_peak_stack: float
    wall_seconds: float
    seed: int


FIELDNAMES = [f.name for f in fields(SimRecord)]


@dataclass
class PointResult:
    """Per-trial outcomes at one operating point; arrays are (windows, trials)."""

    ebn0_db: float | None
    epsilon: float | None
    deltas: list[int | None]
    errors: np.ndarray
    failures: np.ndarray
    branches: np.ndarray
    peaks: np.ndarray
    wall: np.ndarray

    @property
    def trials(self) -> int:
        return self.errors.shape[1]

    def ber(self, k: int, L: int) -> float:
        return float(self.errors[k].sum()) / (self.trials * L)

    def paired_se(self, a: int, b: int, L: int) -> float:
        """Standard error of ``ber(a) - ber(b)`` with trials as paired units."""
        d = (self.errors[a] - self.errors[b]).astype(np.float64)
        T = d.size
        if T < 2:
            return math.inf
        return float(d.std(ddof=1)) / (math.sqrt(T) * L)


def quantile_stack(peaks: Sequence[int], q: float = 0.999) -> int:
    """Nearest-rank quantile: the ``ceil(q*T)``-th smallest peak."""
    arr = np.sort(np.asarray(peaks, dtype=np.int64))
    if arr.size == 0:
        raise ValueError("no trials to take a quantile of")
    if not 0.0 < q <= 1.0:
        raise ValueError("quantile must be in (0, 1]")
    if q < 1.0 and arr.size < math.ceil(1.0 / (1.0 - q) - 1e-9):
        warnings.warn(f"only {arr.size} trials for a {q} quantile", stacklevel=2)
    rank = max(1, math.ceil(q * arr.size - 1e-9))
    return int(arr[rank - 1])


def run_point(cfg: SimConfig, point_index: int, *, decoder=None) -> PointResult:
    """Run all windows at one operating point until the stopping rule fires."""
    from ._kernel import FastDecoder

    code = cfg.code_spec()
    fd = decoder or FastDecoder(code)
    ebn0_db, eps, ch = cfg.points()[point_index]
    W = len(cfg.delta)
    dcfgs = [DecoderConfig(delta=d, tau=cfg.tau, openmax=cfg.openmax) for d in cfg.delta]
    T = cfg.trials
    errors = np.zeros((W, T), dtype=np.int64)
    failures = np.zeros((W, T), dtype=np.int64)
    branches = np.zeros((W, T), dtype=np.int64)
    peaks = np.zeros((W, T), dtype=np.int64)
    wall = np.zeros((W, T))
    L = code.L

    done = 0
    for i in range(T):
        rng = trial_stream(cfg.seed, point_index, i)
        msg = rng.integers(0, 2, L, dtype=np.int8)
        obs = soften(transmit(encode(code, msg), ch, rng), ch)
        cost = branch_cost_table(code, obs)
        for k, dc in enumerate(dcfgs):
            seed = derive_seed(cfg.seed, point_index, k, i)
            t0 = time.perf_counter()
            dec, _, s = fd.decode_table(cost, replace(dc, seed=seed))
            wall[k, i] = time.perf_counter() - t0
            if dec is None:
                errors[k, i] = L
                failures[k, i] = 1
            else:
                errors[k, i] = np.count_nonzero(dec != msg)
            branches[k, i] = s[0]
            peaks[k, i] = s[1]
        done = i + 1
        if cfg.target_errors is not None and errors[:, :done].sum(axis=1).min() >= cfg.target_errors:
            break

    arrays = dict(errors=errors, failures=failures, branches=branches, peaks=peaks, wall=wall)
    arrays = {k: v[:, :done] for k, v in arrays.items()}
    log.info("point %d: %d trials, errors %s", point_index, done, arrays["errors"].sum(axis=1).tolist())
    return PointResult(ebn0_db, eps, list(cfg.delta), **arrays)


def records_from_point(cfg: SimConfig, pr: PointResult) -> list[SimRecord]:
    L = cfg.L
    out = []
    for k, d in enumerate(pr.deltas):
        T = pr.trials
        info = T * L
        errs = int(pr.errors[k].sum())
        out.append(
            SimRecord(
                code_id=cfg.code,
                ebn0_db=pr.ebn0_db,
                epsilon=pr.epsilon,
                delta=d,
                tau=cfg.tau,
                openmax=cfg.openmax,
                trials=T,
                info_bits=info,
                bit_errors=errs,
                ber=errs / info,
                decode_failures=int(pr.failures[k].sum()),
                avg_branch_computations_per_bit=float(pr.branches[k].sum()) / info,
                p999_stack_size=quantile_stack(pr.peaks[k]),
                mean_peak_stack=float(pr.peaks[k].mean()),
                wall_seconds=float(pr.wall[k].sum()),
                seed=cfg.seed,
            )
        )
    return out


def run_sweep(cfg: SimConfig) -> list[SimRecord]:
    records = []
    with warnings.catch_warnings():
        if cfg.trials < 1000:
            warnings.simplefilter("ignore")
        for p in range(len(cfg.points())):
            records.extend(records_from_point(cfg, run_point(cfg, p)))
    if cfg.out:
        write_csv(records, cfg.out)
    return records


def _fmt(name: str, v) -> str:
    if v is None:
        return "inf" if name in _INT_OR_INF else ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(records: Sequence[SimRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FIELDNAMES)
        for r in records:
            w.writerow([_fmt(f, getattr(r, f)) for f in FIELDNAMES])


_INT_OR_INF = {"delta", "tau", "openmax"}
_FLOAT_OR_NONE = {"ebn0_db", "epsilon"}
_INTS = {"trials", "info_bits", "bit_errors", "decode_failures", "p999_stack_size", "seed"}
_FLOATS = {"ber", "avg_branch_computations_per_bit", "mean_peak_stack", "wall_seconds"}


def read_csv(path) -> list[SimRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FIELDNAMES:
            raise ValueError(f"unexpected CSV header {reader.fieldnames}")
        for row in reader:
            vals = {}
            for k, v in row.items():
                if k in _INT_OR_INF:
                    vals[k] = None if v == "inf" else int(v)
                elif k in _FLOAT_OR_NONE:
                    vals[k] = None if v == "" else float(v)
                elif k in _INTS:
                    vals[k] = int(v)
                elif k in _FLOATS:
                    vals[k] = float(v)
                else:
                    vals[k] = v
            out.append(SimRecord(**vals))
    return out
