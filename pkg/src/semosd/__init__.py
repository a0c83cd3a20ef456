"""Semantic ordered-statistics decoding for short byte-aligned block codes."""

from .channel import ChannelConfig, GEParams, Observation, calibrate, llr, transmit
from .codes import CodeSpec, build, build_bch_127_64, build_hamming_7_4, build_rs_16_8, encode
from .fusion import ScoreTable, block_scores, channel_only_scores, fuse
from .harness import DecoderSpec, PointStats, RunConfig, run_point, run_sweep
from .kernels import BACKEND as KERNEL_BACKEND
from .semosd import DecodeParams, DecodeResult, decode, tep_count

__all__ = [
    "ChannelConfig", "GEParams", "Observation", "calibrate", "llr", "transmit",
    "CodeSpec", "build", "build_bch_127_64", "build_hamming_7_4", "build_rs_16_8", "encode",
    "ScoreTable", "block_scores", "channel_only_scores", "fuse",
    "DecoderSpec", "PointStats", "RunConfig", "run_point", "run_sweep",
    "DecodeParams", "DecodeResult", "decode", "tep_count",
    "KERNEL_BACKEND",
]
__version__ = "0.1.0"
