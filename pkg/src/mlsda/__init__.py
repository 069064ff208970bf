"""Maximum-likelihood sequential decoding of convolutional codes with early elimination."""

from .channel import AwgnBpsk, Bsc, SoftObservation, ebn0_to_epsilon, soften, transmit
from .conv_code import CodeSpec, encode, parse_generators
from .decoder import DecodeResult, DecoderConfig, DecoderStats, decode, decode_stream
from .exponents import DmcSpec, elimination_window, exponent_report, truncation_window
from .open_stack import OpenStack, PriorityKey, StackEntry
from .reference import exhaustive_ml, viterbi_decode
from .sim import SimConfig, SimRecord, run_sweep

__all__ = [
    "AwgnBpsk", "Bsc", "SoftObservation", "ebn0_to_epsilon", "soften", "transmit",
    "CodeSpec", "encode", "parse_generators",
    "DecodeResult", "DecoderConfig", "DecoderStats", "decode", "decode_stream",
    "DmcSpec", "elimination_window", "exponent_report", "truncation_window",
    "OpenStack", "PriorityKey", "StackEntry",
    "exhaustive_ml", "viterbi_decode",
    "SimConfig", "SimRecord", "run_sweep",
]
