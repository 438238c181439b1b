"""Turbo code: RSC encoders, log-MAP decoding, low-weight codeword search."""

from .decoder import LlrFrame, bcjr_decode, turbo_decode
from .rsc import DEFAULT_SPEC, RscSpec, TurboCodeword, code_rate, rsc_encode, turbo_encode

__all__ = [
    "DEFAULT_SPEC",
    "LlrFrame",
    "RscSpec",
    "TurboCodeword",
    "bcjr_decode",
    "code_rate",
    "rsc_encode",
    "turbo_decode",
    "turbo_encode",
]
