"""Command-line entry point: exponents, window sizes, simulations, encode/decode."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from . import exponents as ex
from .channel import SoftObservation
from .conv_code import CodeSpec, encode
from .decoder import DecoderConfig, decode
from .sim import EPS_CONVENTIONS, SimConfig, epsilon_for, run_sweep


class CliError(Exception):
    pass


def parse_limit(text) -> int | None:
    """``inf`` (any case) means unbounded; anything else must be a positive integer."""
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "none", ""):
        return None
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'inf', got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer or 'inf', got {text!r}")
    return v


def parse_limit_list(text) -> list[int | None]:
    return [parse_limit(t) for t in str(text).split(",") if t.strip()]


def parse_float_list(text) -> list[float]:
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def parse_sweep(text) -> list[float]:
    """``start:stop:step`` (stop included) or a comma list."""
    s = str(text)
    if ":" not in s:
        return parse_float_list(s)
    try:
        start, stop, step = (float(t) for t in s.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty or backwards sweep {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, 12) for k in range(count)]


def _config_value(v) -> str:
    # JSON values become the same strings a user would type on the command line
    if v is None:
        return "inf"
    if isinstance(v, list):
        return ",".join(_config_value(x) for x in v)
    if isinstance(v, bool):
        return str(v).lower()
    return str(v)


def _add_code(p, L_default=200):
    p.add_argument("--code", default="554,774", help="octal generators, comma separated")
    p.add_argument("--n", type=int, default=None, help="outputs per input bit (checked against --code)")
    p.add_argument("--m", type=int, default=6, help="memory order")
    p.add_argument("--L", type=int, default=L_default, help="message length")


def _add_channel(p, multi: bool):
    p.add_argument("--channel", choices=["bsc", "awgn"], default="bsc")
    p.add_argument("--epsilon", type=parse_float_list if multi else float, default=None)
    p.add_argument("--ebn0", type=parse_sweep if multi else float, default=None,
                   help="Eb/N0 in dB" + (": start:stop:step or a comma list" if multi else ""))
    p.add_argument("--eps-convention", choices=EPS_CONVENTIONS, default="uncoded",
                   help="how Eb/N0 maps to a BSC crossover")


def _add_limits(p, delta_list: bool):
    if delta_list:
        p.add_argument("--delta", type=parse_limit_list, default="inf",
                       help="early-elimination windows, e.g. 10,12,15,inf")
    else:
        p.add_argument("--delta", type=parse_limit, default="inf")
    p.add_argument("--tau", type=parse_limit, default="inf", help="backsearch limit")
    p.add_argument("--openmax", type=parse_limit, default="inf", help="open-stack capacity")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mlsda", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_ in (("exponents", "exponent table for a BSC at one rate"),
                        ("window", "elimination-window ratio and smallest window")):
        p = sub.add_parser(name, help=help_)
        _add_channel(p, multi=False)
        p.add_argument("--rate-bits", default="r0",
                       help="code rate in bits per channel symbol, or 'r0' for the cutoff rate")
        p.add_argument("--m", type=int, default=6)
        p.add_argument("--n", type=int, default=None, help="code rate 1/n for --ebn0 with the coded convention")

    p = sub.add_parser("simulate", help="Monte-Carlo BER sweep, CSV output")
    _add_code(p)
    _add_channel(p, multi=True)
    _add_limits(p, delta_list=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--target-errors", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path")

    p = sub.add_parser("encode", help="encode a message given as 0/1 characters")
    _add_code(p, L_default=None)
    p.add_argument("message", help="bit string such as 1011, or @FILE")

    p = sub.add_parser("decode", help="decode an observation file")
    _add_code(p, L_default=None)
    _add_limits(p, delta_list=False)
    p.add_argument("--hard", action="store_true", help="input holds hard bits 0/1 (BSC) instead of LLRs")
    p.add_argument("input", help="whitespace-separated LLRs (positive favours 0), or '-' for stdin")
    for sp in sub.choices.values():
        sp.add_argument("--config", help="JSON file whose keys mirror the flags; flags win")
        sp.add_argument("-v", "--verbose", action="store_true")
    return parser


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise CliError(f"cannot read config {path}: {e}")
    if not isinstance(doc, dict):
        raise CliError("config must be a JSON object")
    return {k.replace("-", "_"): _config_value(v) for k, v in doc.items()}


def _apply_config(parser, argv, cfg: dict):
    # find the chosen subparser and install the file values as its defaults
    pre, _ = parser.parse_known_args(argv)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sp = subparsers.choices[pre.command]
    known = {a.dest for a in sp._actions}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise CliError(f"unknown config keys for '{pre.command}': {', '.join(unknown)}")
    sp.set_defaults(**cfg)


def _read_text(path) -> str:
    if path == "-":
        return sys.stdin.read()
    if path.startswith("@"):
        path = path[1:]
    with open(path) as fh:
        return fh.read()


def _rate_nats(arg: str, dmc) -> float:
    if str(arg).lower() == "r0":
        return ex.cutoff_rate(dmc)
    try:
        r = float(arg)
    except ValueError:
        raise CliError(f"--rate-bits must be a number or 'r0', got {arg!r}")
    if r <= 0:
        raise CliError("--rate-bits must be positive")
    return r * ex.LOG2


def _bsc_from_args(a) -> float:
    if a.channel != "bsc":
        raise CliError("exponents are computed for the BSC only")
    if (a.epsilon is None) == (a.ebn0 is None):
        raise CliError("give exactly one of --epsilon or --ebn0")
    if a.epsilon is not None:
        return a.epsilon
    rate = 1.0 / a.n if a.n else 1.0
    if a.eps_convention == "coded" and not a.n:
        raise CliError("--eps-convention coded needs --n")
    return epsilon_for(a.ebn0, a.eps_convention, rate)


def cmd_exponents(a, out) -> int:
    eps = _bsc_from_args(a)
    dmc = ex.DmcSpec.bsc(eps)
    rate = _rate_nats(a.rate_bits, dmc)
    rep = ex.exponent_report(dmc, rate, a.m)
    print(f"BSC epsilon={eps:.6g}  rate={rate / ex.LOG2:.6g} bits  m={a.m}", file=out)
    print(f"{'quantity':<14}{'nats':>14}{'bits':>14}", file=out)
    for label, name in (("R", "rate_nats"), ("R0", "r0_nats"), ("C", "capacity_nats"),
                        ("E_c", "e_c"), ("E_el", "e_el"), ("E_r", "e_r")):
        v = getattr(rep, name)
        print(f"{label:<14}{v:>14.6f}{v / ex.LOG2:>14.6f}", file=out)
    print(f"{'rho*':<14}{rep.rho_star:>14.6f}", file=out)
    print(f"{'E_c/E_el':<14}{rep.window_ratio:>14.6f}", file=out)
    print(f"{'E_c/E_r':<14}{rep.trunc_ratio:>14.6f}", file=out)
    print(f"{'delta_min':<14}{_opt(rep.delta_min):>14}", file=out)
    print(f"{'tau_min':<14}{_opt(rep.tau_min):>14}", file=out)
    return 0


def _opt(v):
    return "inf" if v is None else str(v)


def cmd_window(a, out) -> int:
    eps = _bsc_from_args(a)
    dmc = ex.DmcSpec.bsc(eps)
    ratio, dmin = ex.elimination_window(dmc, _rate_nats(a.rate_bits, dmc), a.m)
    print(f"ratio {ratio:.6f}", file=out)
    print(f"delta_min {dmin}", file=out)
    return 0


def cmd_simulate(a, out) -> int:
    cfg = SimConfig(
        code=a.code, m=a.m, L=a.L, channel=a.channel, ebn0=a.ebn0, epsilon=a.epsilon,
        eps_convention=a.eps_convention, delta=a.delta, tau=a.tau, openmax=a.openmax,
        trials=a.trials, target_errors=a.target_errors, seed=a.seed, out=a.out, n=a.n,
    )
    if cfg.out:
        # fail before a long run rather than after it
        try:
            open(cfg.out, "a").close()
        except OSError as e:
            raise CliError(f"cannot write {cfg.out}: {e}")
    records = run_sweep(cfg)
    print(f"{'ebn0_db':>8} {'epsilon':>10} {'delta':>6} {'trials':>8} {'errors':>8} {'ber':>11} "
          f"{'branch/bit':>10} {'p999':>6}", file=out)
    for r in records:
        db = "-" if r.ebn0_db is None else f"{r.ebn0_db:g}"
        eps = "-" if r.epsilon is None else f"{r.epsilon:.4g}"
        print(f"{db:>8} {eps:>10} {_opt(r.delta):>6} {r.trials:>8} {r.bit_errors:>8} {r.ber:>11.4e} "
              f"{r.avg_branch_computations_per_bit:>10.3f} {r.p999_stack_size:>6}", file=out)
    return 0


def _code_for_length(a, N: int | None = None, L: int | None = None) -> CodeSpec:
    base = CodeSpec.from_octal(a.code, a.m, 1)
    if a.n is not None and a.n != base.n:
        raise CliError(f"code {a.code} has n={base.n}, --n says {a.n}")
    if L is None:
        if N % base.n:
            raise CliError(f"{N} symbols is not a multiple of n={base.n}")
        L = N // base.n - base.m
        if L < 1:
            raise CliError(f"{N} symbols is too short for memory {base.m}")
    if a.L is not None and a.L != L:
        raise CliError(f"input implies L={L}, --L says {a.L}")
    return base.with_length(L)


def cmd_encode(a, out) -> int:
    text = _read_text(a.message) if a.message.startswith("@") else a.message
    bits = "".join(text.split())
    if not bits or set(bits) - {"0", "1"}:
        raise CliError("message must be a nonempty string of 0 and 1")
    msg = np.frombuffer(bits.encode(), dtype=np.uint8) - ord("0")
    code = _code_for_length(a, L=len(msg))
    print("".join(map(str, encode(code, msg.astype(np.int8)))), file=out)
    return 0


def cmd_decode(a, out) -> int:
    try:
        vals = np.array(_read_text(a.input).split(), dtype=np.float64)
    except ValueError as e:
        raise CliError(f"bad observation file: {e}")
    if vals.size == 0 or not np.all(np.isfinite(vals)):
        raise CliError("observation file must hold finite numbers")
    code = _code_for_length(a, N=vals.size)
    if a.hard:
        if not np.all((vals == 0) | (vals == 1)):
            raise CliError("--hard input must contain only 0 and 1")
        obs = SoftObservation.hard(vals.astype(np.int8))
    else:
        obs = SoftObservation.from_llr(vals)
    res = decode(code, obs, DecoderConfig(delta=a.delta, tau=a.tau, openmax=a.openmax, seed=a.seed))
    if res.failed:
        print("decode failed: every path was eliminated", file=sys.stderr)
        return 3
    print("".join(map(str, res.message)), file=out)
    s = res.stats
    print(f"metric {res.metric:.6g}  branches {s.branch_computations}  peak_stack {s.peak_stack}",
          file=sys.stderr)
    return 0


COMMANDS = {
    "exponents": cmd_exponents,
    "window": cmd_window,
    "simulate": cmd_simulate,
    "encode": cmd_encode,
    "decode": cmd_decode,
}


def main(argv=None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    parser = build_parser()
    try:
        pre, _ = parser.parse_known_args(argv)
        if pre.config:
            _apply_config(parser, argv, _load_config(pre.config))
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args, out)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    except (CliError, ValueError, OSError) as e:
        print(f"mlsda: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
