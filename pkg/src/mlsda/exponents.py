"""Gallager-type exponents and the window sizes they imply.

All quantities are in nats unless a name says otherwise. Input distributions
are fixed (uniform by default), which is optimal for the symmetric channels
used here.

Two exponents set the window sizes. ``e_c`` is the exponent of the
maximum-likelihood error of a convolutional code. ``e_el`` is the exponent of
the extra error from early elimination. An elimination window ``delta``
makes that extra error negligible once ``delta * e_el > (m + 1) * e_c``.
Forney's truncation-window rule is ``tau * e_r > (m + 1) * e_c``, with the
random-coding exponent ``e_r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LOG2 = math.log(2.0)
INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

RHO_TOL = 1e-10
MAX_TOL = 1e-9


@dataclass(frozen=True)
class DmcSpec:
    """Discrete memoryless channel: ``P[j, i] = Pr(output j | input i)``."""

    P: np.ndarray
    p: np.ndarray
    bsc_eps: float | None = None

    def __post_init__(self):
        P = np.asarray(self.P, dtype=np.float64)
        J, I = P.shape
        p = np.full(I, 1.0 / I) if self.p is None else np.asarray(self.p, dtype=np.float64)
        if p.shape != (I,):
            raise ValueError("input distribution does not match the channel")
        if np.any(P < 0) or not np.allclose(P.sum(axis=0), 1.0, atol=1e-12):
            raise ValueError("columns of P must be probability vectors")
        if np.any(p < 0) or not math.isclose(p.sum(), 1.0, abs_tol=1e-12):
            raise ValueError("input distribution must sum to 1")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "p", p)

    @property
    def I(self) -> int:
        return self.P.shape[1]

    @property
    def J(self) -> int:
        return self.P.shape[0]

    @classmethod
    def bsc(cls, eps: float) -> "DmcSpec":
        if not 0.0 < eps < 1.0:
            raise ValueError(f"crossover must be in (0, 1), got {eps}")
        P = np.array([[1 - eps, eps], [eps, 1 - eps]])
        return cls(P, np.array([0.5, 0.5]), bsc_eps=eps)

    @classmethod
    def from_matrix(cls, P, p=None) -> "DmcSpec":
        return cls(np.asarray(P, dtype=np.float64), p)


def _as_dmc(ch) -> DmcSpec:
    return ch if isinstance(ch, DmcSpec) else DmcSpec.bsc(float(ch))


def e0(rho: float, dmc: DmcSpec) -> float:
    """Gallager's function for the fixed input distribution of ``dmc``."""
    dmc = _as_dmc(dmc)
    inner = (dmc.P ** (1.0 / (1.0 + rho))) @ dmc.p
    return -math.log(float(np.sum(inner ** (1.0 + rho))))


def e1(rho: float, dmc: DmcSpec) -> float:
    """Companion exponent with the output marginal in place of one tilted factor.

    Never smaller than :func:`e0`; the two agree at ``rho = 0``.
    """
    dmc = _as_dmc(dmc)
    q = dmc.P @ dmc.p
    inner = (dmc.P ** (1.0 / (1.0 + rho))) @ dmc.p
    return -math.log(float(np.sum(q * inner**rho)))


def _bsc_check(rho, eps):
    if not 0.0 < eps < 1.0:
        raise ValueError(f"crossover must be in (0, 1), got {eps}")
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must be in [0, 1], got {rho}")


def bsc_e0(rho: float, eps: float) -> float:
    _bsc_check(rho, eps)
    s = 1.0 / (1.0 + rho)
    return rho * LOG2 - (1.0 + rho) * math.log(eps**s + (1.0 - eps) ** s)


def bsc_e1(rho: float, eps: float) -> float:
    _bsc_check(rho, eps)
    s = 1.0 / (1.0 + rho)
    return rho * LOG2 - rho * math.log(eps**s + (1.0 - eps) ** s)


def binary_entropy(eps: float) -> float:
    if eps in (0.0, 1.0):
        return 0.0
    return -eps * math.log(eps) - (1 - eps) * math.log(1 - eps)


def cutoff_rate(dmc) -> float:
    return e0(1.0, _as_dmc(dmc))


def capacity(dmc) -> float:
    """Slope of ``e0`` at zero: closed form for a BSC, else Richardson-extrapolated differences."""
    dmc = _as_dmc(dmc)
    if dmc.bsc_eps is not None:
        return LOG2 - binary_entropy(dmc.bsc_eps)
    h = 1e-6

    def d(step):
        return (e0(step, dmc) - e0(-step, dmc)) / (2 * step)

    return max(0.0, (4 * d(h / 2) - d(h)) / 3)


def golden_max(f, lo: float, hi: float, tol: float = MAX_TOL) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[lo, hi]``; returns ``(argmax, max)``.

    The endpoints are evaluated too, so boundary maxima are exact.
    """
    if hi - lo <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    a, b = lo, hi
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INVPHI * (b - a)
            fd = f(d)
    candidates = [(lo, f(lo)), (hi, f(hi)), ((a + b) / 2, f((a + b) / 2))]
    return max(candidates, key=lambda t: t[1])


def _bracketed_max(f, lo, hi, grid=64, tol=MAX_TOL):
    # coarse scan first so a non-concave objective still lands on the global peak
    xs = np.linspace(lo, hi, grid + 1)
    k = int(np.argmax([f(x) for x in xs]))
    return golden_max(f, xs[max(k - 1, 0)], xs[min(k + 1, grid)], tol)


def rho_star(rate: float, dmc, tol: float = RHO_TOL) -> float:
    """Largest ``rho`` in ``[0, 1]`` with ``e0(rho) >= rho * rate``.

    ``e0`` is concave with ``e0(0) = 0``, so this is 1 below the cutoff rate,
    the nonzero root of ``e0(rho) = rho * rate`` between cutoff and capacity,
    and 0 at or above capacity.
    """
    dmc = _as_dmc(dmc)
    if e0(1.0, dmc) >= rate:
        return 1.0
    if rate >= capacity(dmc):
        return 0.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if e0(mid, dmc) - mid * rate > 0:
            lo = mid
        else:
            hi = mid
    return lo


def e_r(rate: float, dmc) -> float:
    """Random-coding exponent ``max_rho e0(rho) - rho * rate`` over ``[0, 1]``."""
    dmc = _as_dmc(dmc)
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    _, val = golden_max(lambda r: e0(r, dmc) - r * rate, 0.0, 1.0)
    return max(val, 0.0)


def e_c(rate: float, dmc) -> float:
    """Convolutional exponent: cutoff rate below it, ``e0(rho*)`` up to capacity, then 0."""
    dmc = _as_dmc(dmc)
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    r0 = e0(1.0, dmc)
    if rate < r0:
        return r0
    if rate >= capacity(dmc):
        return 0.0
    return e0(rho_star(rate, dmc), dmc)


def e_el(rate: float, dmc) -> float:
    """Early-elimination exponent: ``max e1(rho) - rho * rate`` over ``e0(rho) >= rho * rate``.

    The feasible set is taken closed, so at the cutoff rate ``rho = 1`` is
    admissible.
    """
    dmc = _as_dmc(dmc)
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    hi = rho_star(rate, dmc)
    if hi <= 0.0:
        return 0.0
    _, val = _bracketed_max(lambda r: e1(r, dmc) - r * rate, 0.0, hi)
    return max(val, 0.0)


def _smallest_above(x: float) -> int:
    return math.floor(x) + 1


def elimination_window(dmc, rate: float, m: int) -> tuple[float, int]:
    """``(e_c/e_el, smallest integer delta with delta > ratio * (m+1))``."""
    dmc = _as_dmc(dmc)
    el = e_el(rate, dmc)
    if el <= 0.0:
        raise ValueError("early-elimination exponent is zero; no finite window suffices")
    ratio = e_c(rate, dmc) / el
    return ratio, _smallest_above(ratio * (m + 1))


def truncation_window(dmc, rate: float, m: int) -> tuple[float, int]:
    """``(e_c/e_r, smallest integer tau with tau > ratio * (m+1))``."""
    dmc = _as_dmc(dmc)
    er = e_r(rate, dmc)
    if er <= 0.0:
        raise ValueError("random-coding exponent is zero; no finite truncation window suffices")
    ratio = e_c(rate, dmc) / er
    return ratio, _smallest_above(ratio * (m + 1))


def viterbi_error_bound(q: int, n: int, m: int, rate: float, rho: float, dmc) -> float:
    """Error bound for time-varying convolutional codes at a given ``rho``.

    ``rate`` is in nats per channel symbol and must satisfy
    ``e0(rho) > rho * rate``.
    """
    dmc = _as_dmc(dmc)
    E = e0(rho, dmc)
    lam = E - rho * rate
    if lam <= 0:
        raise ValueError(f"bound is vacuous: e0(rho) - rho*R = {lam:.3g} <= 0")
    return (q - 1) / (1.0 - q ** (-lam / rate)) * math.exp(-n * (m + 1) * E)


def truncation_error_bound(n: int, tau: int, rate: float, dmc) -> float:
    return math.exp(-n * tau * e_r(rate, _as_dmc(dmc)))


@dataclass
class ExponentReport:
    rate_nats: float
    rho_star: float
    lam: float
    r0_nats: float
    capacity_nats: float
    e_c: float
    e_el: float
    e_r: float
    window_ratio: float
    trunc_ratio: float
    delta_min: int | None
    tau_min: int | None

    def bits(self, name: str) -> float:
        return getattr(self, name) / LOG2


def exponent_report(dmc, rate: float, m: int) -> ExponentReport:
    """Every exponent at one rate, plus the window sizes for memory ``m``.

    ``lam`` is ``e0(rho) - rho * rate`` at ``rho_star``; it is 0 between the
    cutoff rate and capacity.
    """
    dmc = _as_dmc(dmc)
    rs = rho_star(rate, dmc)
    ec, el, er = e_c(rate, dmc), e_el(rate, dmc), e_r(rate, dmc)
    wr = ec / el if el > 0 else math.inf
    tr = ec / er if er > 0 else math.inf
    return ExponentReport(
        rate_nats=rate,
        rho_star=rs,
        lam=e0(rs, dmc) - rs * rate,
        r0_nats=cutoff_rate(dmc),
        capacity_nats=capacity(dmc),
        e_c=ec,
        e_el=el,
        e_r=er,
        window_ratio=wr,
        trunc_ratio=tr,
        delta_min=_smallest_above(wr * (m + 1)) if math.isfinite(wr) else None,
        tau_min=_smallest_above(tr * (m + 1)) if math.isfinite(tr) else None,
    )
