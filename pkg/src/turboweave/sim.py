"""Monte-Carlo BER/FER over AWGN with BPSK or Gray QPSK, plus CSV/SVG output.

Every frame draws its data and noise from its own generator keyed by
``(seed, frame_index)``. Results therefore do not depend on how frames are
spread over workers, and different interleavers or Eb/N0 points see the
same data and the same standard-normal noise (scaled per point).
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .interleaver import Permutation
from .turbo import kernels
from .turbo.decoder import LlrFrame
from .turbo.rsc import DEFAULT_SPEC, RATES, RscSpec, code_rate, puncture_mask, turbo_encode

MODULATIONS = ("bpsk", "qpsk")
NOISELESS_LLR = 40.0
CSV_FIELDS = ["ebn0_db", "frames", "bit_errors", "frame_errors", "ber", "fer"]


@dataclass(frozen=True)
class ChannelSpec:
    modulation: str = "bpsk"
    ebn0_db: tuple[float, ...] = (1.0,)
    rate: str = "1/3"

    def __post_init__(self):
        if self.modulation not in MODULATIONS:
            raise ValueError(f"modulation must be one of {MODULATIONS}")
        if self.rate not in RATES:
            raise ValueError(f"rate must be one of {sorted(RATES)}")
        grid = tuple(float(x) for x in self.ebn0_db)
        if not grid:
            raise ValueError("empty Eb/N0 grid")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("Eb/N0 grid must be strictly increasing")
        object.__setattr__(self, "ebn0_db", grid)


@dataclass
class RunConfig:
    interleaver: Permutation | str | Path
    spec: RscSpec = DEFAULT_SPEC
    iterations: int = 18
    min_frame_errors: int = 100
    max_frames: int = 100_000
    seed: int = 0
    include_tail_energy: bool = True
    early_stop: bool = False
    workers: int = 1
    chunk: int = 50

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be at least 1")
        if not isinstance(self.interleaver, Permutation):
            self.interleaver = Permutation.load(self.interleaver)


@dataclass
class BerPoint:
    ebn0_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    n: int = field(default=0, repr=False)
    ber: float = float("nan")
    fer: float = float("nan")

    def __post_init__(self):
        if self.n and self.frames and math.isnan(self.ber):
            self.ber = self.bit_errors / (self.frames * self.n)
        if self.frames and math.isnan(self.fer):
            self.fer = self.frame_errors / self.frames

    def sigma(self) -> float:
        """Binomial standard error of ``ber``."""
        bits = self.frames * self.n if self.n else self.bit_errors / self.ber if self.ber else 0
        if not bits:
            return 0.0
        return math.sqrt(self.ber * (1 - self.ber) / bits)


def parse_grid(text: str) -> tuple[float, ...]:
    """``"0:0.5:2"`` -> (0, 0.5, 1, 1.5, 2); ``"1,2.5"`` -> (1, 2.5)."""
    if ":" in text:
        lo, step, hi = (float(x) for x in text.split(":"))
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(round(lo + k * step, 10) for k in range(count))
    return tuple(float(x) for x in text.split(","))


def noise_variance(ebn0_db: float, rate: float) -> float:
    """Per-dimension noise variance for unit-energy coded bits."""
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def modulate(bits: np.ndarray, modulation: str) -> np.ndarray:
    """BPSK ``0 -> +1``; Gray QPSK puts even bits on I and odd bits on Q."""
    x = 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)
    if modulation == "bpsk":
        return x
    if modulation == "qpsk":
        if x.size % 2:
            x = np.append(x, 1.0)
        return x[0::2] + 1j * x[1::2]
    raise ValueError(f"unknown modulation {modulation!r}")


def llr_map(symbols: np.ndarray, noise_var: float, modulation: str, n_bits: int | None = None) -> np.ndarray:
    """Channel LLRs ``2 y / noise_var`` per bit; QPSK splits I and Q."""
    if noise_var <= 0:
        raise ValueError("noise variance must be positive")
    y = np.asarray(symbols)
    if modulation == "bpsk":
        out = 2.0 * np.real(y) / noise_var
    elif modulation == "qpsk":
        out = np.empty(2 * y.size)
        out[0::2] = 2.0 * y.real / noise_var
        out[1::2] = 2.0 * y.imag / noise_var
    else:
        raise ValueError(f"unknown modulation {modulation!r}")
    return out if n_bits is None else out[:n_bits]


def depuncture(llr: np.ndarray, n: int, memory: int, rate: str) -> LlrFrame:
    """Spread serialized LLRs (systematic, tail, kept parity1, kept parity2) back into streams."""
    k1, k2 = puncture_mask(n, rate)
    k1 = np.concatenate([k1, np.ones(memory, dtype=bool)])
    pos = 0
    sys_llr = llr[pos : pos + n + memory].copy()
    pos += n + memory
    p1 = np.zeros(n + memory)
    p1[k1] = llr[pos : pos + k1.sum()]
    pos += int(k1.sum())
    p2 = np.zeros(n)
    p2[k2] = llr[pos : pos + k2.sum()]
    return LlrFrame(sys_llr, p1, p2)


def _frame_rng(seed: int, frame: int) -> np.random.Generator:
    return np.random.default_rng([seed, frame])


def _frame_llrs(cfg: RunConfig, ch: ChannelSpec, sigma2: float, frame: int):
    """Data and channel LLR streams for one frame, via the modular channel path."""
    p = cfg.interleaver
    rng = _frame_rng(cfg.seed, frame)
    data = rng.integers(0, 2, p.n, dtype=np.int8)
    bits = turbo_encode(cfg.spec, p, data, ch.rate).transmitted()
    sym = modulate(bits, ch.modulation)
    z = rng.standard_normal(_n_draws(bits.size, ch.modulation))
    if sigma2 > 0:
        s = math.sqrt(sigma2)
        sym = sym + s * (z[0::2] + 1j * z[1::2]) if ch.modulation == "qpsk" else sym + s * z
        llr = llr_map(sym, sigma2, ch.modulation, bits.size)
    else:
        llr = NOISELESS_LLR * (1.0 - 2.0 * bits)
    return data, depuncture(llr, p.n, cfg.spec.memory, ch.rate)


def _n_draws(n_bits: int, modulation: str) -> int:
    return n_bits + (n_bits % 2 if modulation == "qpsk" else 0)


def _run_chunk(args) -> list[int]:
    """Bit errors per frame for frames ``start..stop-1``.

    Uses the fused compiled kernel. Each transmitted bit ``k`` sees noise
    ``sigma * z[k]`` under both BPSK and Gray QPSK (I on even bits, Q on odd),
    which is exactly what :func:`_frame_llrs` produces.
    """
    cfg, ch, sigma2, start, stop = args
    spec, p = cfg.spec, cfg.interleaver
    k1, k2 = puncture_mask(p.n, ch.rate)
    k1 = np.concatenate([k1, np.ones(spec.memory, dtype=bool)])
    n_bits = p.n + spec.memory + int(k1.sum()) + int(k2.sum())
    fwd = np.ascontiguousarray(p.forward)
    if sigma2 > 0:
        s, scale = math.sqrt(sigma2), 2.0 / sigma2
    else:
        s, scale = 0.0, NOISELESS_LLR
    out = []
    for f in range(start, stop):
        rng = _frame_rng(cfg.seed, f)
        data = rng.integers(0, 2, p.n, dtype=np.int8)
        noise = s * rng.standard_normal(_n_draws(n_bits, ch.modulation))[:n_bits]
        out.append(int(kernels.frame_errors(
            spec.next_state, spec.parity, spec.tail_input, fwd, spec.memory, data, noise,
            k1, k2, scale, cfg.iterations, cfg.early_stop,
        )))
    return out


def effective_rate(cfg: RunConfig, ch: ChannelSpec) -> float:
    return code_rate(cfg.interleaver.n, cfg.spec.memory, ch.rate, cfg.include_tail_energy)


def simulate(cfg: RunConfig, ch: ChannelSpec) -> list[BerPoint]:
    """One :class:`BerPoint` per grid value.

    Frames run in chunks of ``cfg.chunk``; a point stops after the first chunk
    that brings the frame-error count to ``min_frame_errors``, or at
    ``max_frames``. Chunks are consumed in index order, so the worker count
    never changes the result.
    """
    rate = effective_rate(cfg, ch)
    points = []
    pool = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        for ebn0 in ch.ebn0_db:
            sigma2 = noise_variance(ebn0, rate)
            frames = bit_errors = frame_errors = 0
            next_start = 0
            done = False
            while not done:
                jobs = []
                for _ in range(max(1, cfg.workers)):
                    if next_start >= cfg.max_frames:
                        break
                    stop = min(next_start + cfg.chunk, cfg.max_frames)
                    jobs.append((cfg, ch, sigma2, next_start, stop))
                    next_start = stop
                if not jobs:
                    break
                results = pool.map(_run_chunk, jobs) if pool else map(_run_chunk, jobs)
                for errs in results:
                    if done:
                        break
                    frames += len(errs)
                    bit_errors += sum(errs)
                    frame_errors += sum(1 for e in errs if e)
                    if frame_errors >= cfg.min_frame_errors or frames >= cfg.max_frames:
                        done = True
            points.append(BerPoint(ebn0, frames, bit_errors, frame_errors, n=cfg.interleaver.n))
    finally:
        if pool:
            pool.shutdown()
    return points


def simulate_uncoded(ch: ChannelSpec, n_bits: int, seed: int = 0) -> list[BerPoint]:
    """Uncoded reference: ``n_bits`` bits per point straight through the channel."""
    points = []
    for k, ebn0 in enumerate(ch.ebn0_db):
        rng = np.random.default_rng([seed, k])
        bits = rng.integers(0, 2, n_bits, dtype=np.int8)
        sym = modulate(bits, ch.modulation)
        sigma2 = noise_variance(ebn0, 1.0)
        if sigma2 > 0:
            if ch.modulation == "qpsk":
                z = rng.standard_normal((2, sym.size))
                sym = sym + math.sqrt(sigma2) * (z[0] + 1j * z[1])
            else:
                sym = sym + math.sqrt(sigma2) * rng.standard_normal(sym.size)
            hard = (llr_map(sym, sigma2, ch.modulation, n_bits) < 0).astype(np.int8)
        else:
            hard = bits
        errs = int(np.count_nonzero(hard != bits))
        points.append(BerPoint(ebn0, 1, errs, int(errs > 0), n=n_bits))
    return points


def write_csv(points: Sequence[BerPoint], path: str | Path) -> None:
    if not points:
        raise ValueError("no points to write")
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(CSV_FIELDS)
        for pt in points:
            out.writerow([repr(pt.ebn0_db), pt.frames, pt.bit_errors, pt.frame_errors, repr(pt.ber), repr(pt.fer)])


def read_csv(path: str | Path) -> list[BerPoint]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [
        BerPoint(
            float(r["ebn0_db"]),
            int(r["frames"]),
            int(r["bit_errors"]),
            int(r["frame_errors"]),
            ber=float(r["ber"]),
            fer=float(r["fer"]),
        )
        for r in rows
    ]


_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def write_svg(series: dict[str, Sequence[BerPoint]], path: str | Path, title: str = "") -> None:
    """Log-scale BER against Eb/N0, one polyline per series."""
    if not series or not any(series.values()):
        raise ValueError("no points to plot")
    W, H, L, R, T, B = 640, 480, 70, 150, 40, 50
    pts = [p for s in series.values() for p in s]
    xs = [p.ebn0_db for p in pts]
    ys = [p.ber for p in pts if p.ber > 0]
    x0, x1 = min(xs), max(xs)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    floor = min(ys) if ys else 1e-6
    d0 = math.floor(math.log10(floor))
    d1 = max(d0 + 1, math.ceil(math.log10(max(ys))) if ys else 0)

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        ly = math.log10(max(y, 10.0**d0))
        return T + (d1 - ly) / (d1 - d0) * (H - T - B)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" fill="none" stroke="black"/>',
    ]
    for d in range(d0, d1 + 1):
        y = py(10.0**d)
        parts.append(f'<line x1="{L}" y1="{y:.1f}" x2="{W - R}" y2="{y:.1f}" stroke="#ddd"/>')
        parts.append(f'<text x="{L - 8}" y="{y + 4:.1f}" font-size="11" text-anchor="end">1e{d}</text>')
    for x in sorted(set(xs)):
        parts.append(f'<text x="{px(x):.1f}" y="{H - B + 16}" font-size="11" text-anchor="middle">{x:g}</text>')
    parts.append(f'<text x="{(L + W - R) / 2}" y="{H - 10}" font-size="12" text-anchor="middle">Eb/N0 (dB)</text>')
    parts.append(f'<text x="16" y="{(T + H - B) / 2}" font-size="12" transform="rotate(-90 16 {(T + H - B) / 2})" text-anchor="middle">BER</text>')
    if title:
        parts.append(f'<text x="{W / 2}" y="22" font-size="14" text-anchor="middle">{title}</text>')
    for k, (label, s) in enumerate(series.items()):
        color = _COLORS[k % len(_COLORS)]
        coords = " ".join(f"{px(p.ebn0_db):.1f},{py(p.ber):.1f}" for p in s)
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{coords}"/>')
        ly = T + 20 + 18 * k
        parts.append(f'<line x1="{W - R + 10}" y1="{ly}" x2="{W - R + 30}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{W - R + 36}" y="{ly + 4}" font-size="12">{label}</text>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n")


def emit(points, path: str | Path, fmt: str = "csv") -> None:
    """Write ``points`` as CSV, or a ``{label: points}`` mapping as SVG."""
    if fmt == "csv":
        write_csv(points, path)
    elif fmt == "svg":
        write_svg(points if isinstance(points, dict) else {"ber": points}, path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
