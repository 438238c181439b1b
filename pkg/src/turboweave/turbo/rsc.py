"""Recursive systematic convolutional encoder and the parallel turbo encoder."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..gf2poly import Gf2Poly, is_primitive
from ..interleaver import Permutation
from . import kernels


@dataclass(frozen=True)
class RscSpec:
    """RSC constituent code.

    The register holds ``a[t-1] .. a[t-m]`` with ``a[t] = u[t] + sum fb_k a[t-k]``
    and parity ``y[t] = sum ff_k a[t-k]`` (``k = 0..m``). State integer bit
    ``k - 1`` is ``a[t-k]``.
    """

    memory: int
    feedback: Gf2Poly
    feedforward: Gf2Poly
    next_state: np.ndarray = field(init=False, repr=False, compare=False)
    parity: np.ndarray = field(init=False, repr=False, compare=False)
    tail_input: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m = self.memory
        if m < 1:
            raise ValueError("memory must be at least 1")
        if self.feedback.degree != m or 0 not in self.feedback.exponents:
            raise ValueError(f"feedback {self.feedback} must have degree {m} and a constant term")
        if self.feedforward.degree > m or self.feedforward.is_zero():
            raise ValueError(f"feedforward {self.feedforward} must be nonzero with degree <= {m}")
        n_states = 1 << m
        fb_mask = sum(1 << (k - 1) for k in self.feedback.exponents if k >= 1)
        ff_mask = sum(1 << (k - 1) for k in self.feedforward.exponents if k >= 1)
        ff0 = 1 if 0 in self.feedforward.exponents else 0
        nxt = np.zeros((n_states, 2), dtype=np.int64)
        par = np.zeros((n_states, 2), dtype=np.int64)
        tail = np.zeros(n_states, dtype=np.int64)
        for s in range(n_states):
            fb = bin(s & fb_mask).count("1") & 1
            ff = bin(s & ff_mask).count("1") & 1
            tail[s] = fb
            for u in (0, 1):
                a = u ^ fb
                nxt[s, u] = ((s << 1) | a) & (n_states - 1)
                par[s, u] = (ff0 & a) ^ ff
        for arr in (nxt, par, tail):
            arr.flags.writeable = False
        object.__setattr__(self, "next_state", nxt)
        object.__setattr__(self, "parity", par)
        object.__setattr__(self, "tail_input", tail)

    @classmethod
    def from_octal(cls, feedback: str = "15", feedforward: str = "17") -> "RscSpec":
        fb = Gf2Poly.from_octal(feedback)
        m = fb.degree
        return cls(m, fb, Gf2Poly.from_octal(feedforward, width=m + 1))

    @property
    def n_states(self) -> int:
        return 1 << self.memory

    @property
    def octal(self) -> str:
        w = self.memory + 1
        return f"{self.feedback.to_octal(w)},{self.feedforward.to_octal(w)}"

    def is_turbo_ready(self) -> bool:
        return is_primitive(self.feedback)


DEFAULT_SPEC = RscSpec.from_octal("15", "17")


def rsc_encode(spec: RscSpec, bits, terminate: bool = False):
    """Encode ``bits``; returns ``(parity, final_state, tail)``.

    With ``terminate`` the ``m`` tail inputs that flush the register are
    appended to the trellis and their parities to ``parity``.
    """
    u = np.ascontiguousarray(bits, dtype=np.int8)
    parity, state = kernels.encode(spec.next_state, spec.parity, u, 0)
    if not terminate:
        return parity, int(state), np.zeros(0, dtype=np.int8)
    tail, tail_par, state = kernels.terminate(spec.next_state, spec.parity, spec.tail_input, state, spec.memory)
    return np.concatenate([parity, tail_par]), int(state), tail


RATES = {"1/3": Fraction(1, 3), "1/2": Fraction(1, 2)}


def puncture_mask(n: int, rate: str) -> tuple[np.ndarray, np.ndarray]:
    """Keep-masks for the first ``n`` parity bits of each encoder.

    Rate 1/2 keeps encoder-1 parity on even positions and encoder-2 parity
    on odd ones. Tail parities are never punctured.
    """
    if rate == "1/3":
        return np.ones(n, dtype=bool), np.ones(n, dtype=bool)
    if rate == "1/2":
        even = np.arange(n) % 2 == 0
        return even, ~even
    raise ValueError(f"unsupported rate {rate!r}")


@dataclass
class TurboCodeword:
    systematic: np.ndarray
    parity1: np.ndarray
    parity2: np.ndarray
    tail: np.ndarray
    rate: str = "1/3"

    @property
    def n(self) -> int:
        return self.systematic.size

    @property
    def memory(self) -> int:
        return self.tail.size

    def keep_masks(self) -> tuple[np.ndarray, np.ndarray]:
        k1, k2 = puncture_mask(self.n, self.rate)
        return np.concatenate([k1, np.ones(self.memory, dtype=bool)]), k2

    def weight(self) -> int:
        """Hamming weight of the transmitted bits (after puncturing)."""
        k1, k2 = self.keep_masks()
        return int(self.systematic.sum() + self.tail.sum() + self.parity1[k1].sum() + self.parity2[k2].sum())

    def transmitted(self) -> np.ndarray:
        """Serialized channel bits: systematic, tail, kept parity1, kept parity2."""
        k1, k2 = self.keep_masks()
        return np.concatenate([self.systematic, self.tail, self.parity1[k1], self.parity2[k2]]).astype(np.int8)

    @property
    def n_transmitted(self) -> int:
        k1, k2 = self.keep_masks()
        return self.n + self.memory + int(k1.sum()) + int(k2.sum())


def turbo_encode(spec: RscSpec, p: Permutation, data, rate: str = "1/3") -> TurboCodeword:
    data = np.ascontiguousarray(data, dtype=np.int8)
    if data.size != p.n:
        raise ValueError(f"data length {data.size} does not match interleaver length {p.n}")
    if rate not in RATES:
        raise ValueError(f"unsupported rate {rate!r}")
    parity1, _, tail = rsc_encode(spec, data, terminate=True)
    parity2, _, _ = rsc_encode(spec, p.interleave(data), terminate=False)
    return TurboCodeword(data.copy(), parity1, parity2, tail, rate)


def code_rate(n: int, memory: int, rate: str, include_tail: bool = True) -> float:
    """Information bits per transmitted bit."""
    if not include_tail:
        return float(RATES[rate])
    k1, k2 = puncture_mask(n, rate)
    return n / (n + 2 * memory + int(k1.sum()) + int(k2.sum()))
