"""Soft-in soft-out constituent decoder and the iterative turbo decoder."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..interleaver import Permutation
from . import kernels
from .rsc import RscSpec


def _llr(x, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def bcjr_decode(spec: RscSpec, sys_llr, par_llr, apriori=None, terminated: bool = False):
    """Exact log-MAP decoding of one constituent code.

    All inputs have one entry per trellis step (data plus tail when
    ``terminated``). Returns ``(extrinsic, posterior)`` with
    ``posterior = sys_llr + apriori + extrinsic``.
    """
    sys_llr = _llr(sys_llr, "sys_llr")
    par_llr = _llr(par_llr, "par_llr")
    apriori = np.zeros_like(sys_llr) if apriori is None else _llr(apriori, "apriori")
    if not (sys_llr.shape == par_llr.shape == apriori.shape) or sys_llr.ndim != 1:
        raise ValueError("LLR arrays must be 1-D with equal lengths")
    return kernels.log_map(spec.next_state, spec.parity, sys_llr, par_llr, apriori, terminated)


@dataclass
class LlrFrame:
    """Channel LLRs for one turbo frame plus the extrinsic exchange buffers.

    ``systematic`` and ``parity1`` have ``N + m`` entries (tail included);
    ``parity2`` has ``N``. Punctured positions carry 0.
    """

    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray
    w1: np.ndarray = field(default=None)
    w2: np.ndarray = field(default=None)

    def __post_init__(self):
        self.systematic = _llr(self.systematic, "systematic")
        self.parity1 = _llr(self.parity1, "parity1")
        self.parity2 = _llr(self.parity2, "parity2")
        n = self.parity2.size
        if self.systematic.size != self.parity1.size or self.systematic.size < n:
            raise ValueError("inconsistent LLR stream lengths")
        if self.w1 is None:
            self.w1 = np.zeros(n)
        if self.w2 is None:
            self.w2 = np.zeros(n)

    @property
    def n(self) -> int:
        return self.parity2.size


def turbo_decode(
    spec: RscSpec,
    p: Permutation,
    frame: LlrFrame,
    iterations: int = 18,
    early_stop: bool = False,
) -> np.ndarray:
    """Decode a frame; returns hard decisions on the ``N`` data bits.

    Decoder 1 runs on the terminated trellis with decoder 2's de-interleaved
    extrinsic as a priori input; decoder 2 runs unterminated on the
    interleaved stream. Decisions use ``sys + W1 + W2``. After the call
    ``frame.w1`` and ``frame.w2`` hold the final extrinsic values in natural
    order. ``early_stop`` ends once both decoders have agreed on unchanged
    hard decisions for several consecutive iterations.
    """
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    if frame.n != p.n or frame.systematic.size != p.n + spec.memory:
        raise ValueError("frame does not match interleaver length and encoder memory")
    apr = np.zeros(frame.systematic.size)
    apr[: p.n] = frame.w2
    hard, _, w1, w2, _ = kernels.turbo_decode(
        spec.next_state,
        spec.parity,
        np.ascontiguousarray(p.forward),
        frame.systematic,
        frame.parity1,
        frame.parity2,
        apr,
        iterations,
        early_stop,
    )
    frame.w1 = w1
    frame.w2 = w2
    return hard.astype(np.int8)
