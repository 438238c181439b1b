"""Interleaver permutations: random, S-random, deterministic affine.

Indices are 0-based. A permutation maps input position ``i`` of the first
encoder to position ``forward[i]`` of the second encoder's input, so
``interleave(u)[forward[i]] = u[i]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FILE_HEADER = "# turbo-weave interleaver N={n}"


class ConvergenceError(RuntimeError):
    """A randomized construction ran out of restarts."""

    def __init__(self, message: str, best_length: int = 0, best_spread: int = 0):
        super().__init__(message)
        self.best_length = best_length
        self.best_spread = best_spread


@dataclass(frozen=True, eq=False)
class Permutation:
    forward: np.ndarray
    inverse: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        fwd = np.asarray(self.forward, dtype=np.int64).copy()
        n = fwd.size
        if fwd.ndim != 1 or n == 0:
            raise ValueError("permutation must be a non-empty 1-D array")
        inv = np.full(n, -1, dtype=np.int64)
        if fwd.min() < 0 or fwd.max() >= n:
            raise ValueError("permutation entries out of range")
        inv[fwd] = np.arange(n)
        if (inv < 0).any():
            raise ValueError("not a bijection")
        fwd.flags.writeable = False
        inv.flags.writeable = False
        object.__setattr__(self, "forward", fwd)
        object.__setattr__(self, "inverse", inv)

    @property
    def n(self) -> int:
        return int(self.forward.size)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.forward, other.forward)

    def __hash__(self) -> int:
        return hash(self.forward.tobytes())

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def interleave(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x)
        out = np.empty_like(x[: self.n])
        out[self.forward] = x[: self.n]
        return out

    def deinterleave(self, y: np.ndarray) -> np.ndarray:
        return np.asarray(y)[self.forward]

    def inverted(self) -> "Permutation":
        return Permutation(self.inverse)

    def swapped(self, i: int, j: int) -> "Permutation":
        """Exchange the images of ``i`` and ``j``."""
        fwd = self.forward.copy()
        fwd[i], fwd[j] = fwd[j], fwd[i]
        return Permutation(fwd)

    def save(self, path: str | Path) -> None:
        lines = [FILE_HEADER.format(n=self.n)]
        lines.extend(str(int(v)) for v in self.forward)
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "Permutation":
        lines = Path(path).read_text().splitlines()
        if not lines or not lines[0].startswith("# turbo-weave interleaver N="):
            raise ValueError(f"{path}: missing interleaver header")
        n = int(lines[0].rsplit("=", 1)[1])
        body = [ln for ln in lines[1:] if ln.strip()]
        if len(body) != n:
            raise ValueError(f"{path}: header says N={n} but found {len(body)} entries")
        return cls(np.array([int(v) for v in body], dtype=np.int64))


def random_interleaver(n: int, seed: int) -> Permutation:
    if n < 1:
        raise ValueError("n must be positive")
    rng = np.random.default_rng(seed)
    return Permutation(rng.permutation(n))


def s_random(n: int, s: int, seed: int, max_restarts: int = 1000) -> Permutation:
    """S-random interleaver by sequential rejection.

    Each new image must differ by more than ``s`` from the images of the
    previous ``s`` positions. Dead ends first undo recent selections; only
    when that budget is spent does the construction restart from scratch.
    """
    return constrained_random(n, s, seed=seed, max_restarts=max_restarts)


def constrained_random(
    n: int,
    s1: int,
    s2: int | None = None,
    *,
    seed: int,
    max_restarts: int = 1000,
    fixed: dict[int, int] | None = None,
    forbidden: dict[int, set[int]] | None = None,
) -> Permutation:
    """Sequential random selection under spread and displacement rules.

    ``s1``: images of positions at most ``s1`` apart differ by more than ``s1``.
    ``s2``: when given, ``|i - forward[i]| > s2`` for every ``i``.
    ``fixed`` pins ``forward[i]``; ``forbidden[v]`` lists positions that may not
    take image ``v``.
    """
    if s1 < 0:
        raise ValueError("spread must be non-negative")
    fixed = dict(fixed or {})
    forbidden = forbidden or {}
    seq = np.random.SeedSequence(seed)
    best_len = 0
    for _ in range(max_restarts + 1):
        rng = np.random.default_rng(seq.spawn(1)[0])
        out = _try_sequential(n, s1, s2, rng, fixed, forbidden)
        if isinstance(out, np.ndarray):
            return Permutation(out)
        best_len = max(best_len, out)
    best_spread = 0
    for s in range(s1 - 1, 0, -1):
        probe = np.random.SeedSequence(seed)
        if any(
            isinstance(_try_sequential(n, s, s2, np.random.default_rng(probe.spawn(1)[0]), fixed, forbidden), np.ndarray)
            for _ in range(20)
        ):
            best_spread = s
            break
    raise ConvergenceError(
        f"no permutation with n={n}, s1={s1}, s2={s2} after {max_restarts} restarts "
        f"(longest partial run {best_len} of {n}; spread {best_spread} is reachable)",
        best_length=best_len,
        best_spread=best_spread,
    )


def _try_sequential(n, s1, s2, rng, fixed, forbidden, max_backtracks=50):
    """One randomized pass; returns the permutation or the furthest position reached.

    A dead end at position ``i`` is first repaired by a swap: some earlier
    position hands its image to ``i`` and takes a leftover image instead,
    with both placements re-checked on both sides. Failing that, recent
    selections are undone and the freed images reshuffled into the pool.
    """
    taken = set(fixed.values())
    pool = [v for v in rng.permutation(n).tolist() if v not in taken]
    forward = np.full(n, -1, dtype=np.int64)
    i = 0
    furthest = 0
    backtracks = 0
    window = max(2, s1)
    while i < n:
        if i in fixed:
            v = fixed[i]
            placed = _admissible(forward, i, v, s1, s2, forbidden)
            if placed:
                forward[i] = v
        else:
            placed = False
            for k, v in enumerate(pool):
                if _admissible(forward, i, v, s1, s2, forbidden):
                    forward[i] = pool.pop(k)
                    placed = True
                    break
            if not placed:
                placed = _swap_repair(forward, i, pool, s1, s2, rng, fixed, forbidden)
        if placed:
            i += 1
            furthest = max(furthest, i)
            continue
        if backtracks >= max_backtracks:
            return furthest
        backtracks += 1
        back = min(i, window + int(rng.integers(0, window + 1)))
        for j in range(i - back, i):
            if j not in fixed:
                pool.append(int(forward[j]))
            forward[j] = -1
        rng.shuffle(pool)
        i -= back
        if backtracks % 10 == 0:
            window *= 2
    return forward


def _admissible(forward, i, v, s1, s2, forbidden, skip=-1) -> bool:
    """Whether image ``v`` fits position ``i`` against every filled neighbour."""
    if s2 is not None and abs(i - v) <= s2:
        return False
    if i in forbidden.get(v, ()):
        return False
    n = forward.size
    for j in range(max(0, i - s1), min(n, i + s1 + 1)):
        if j == i or j == skip:
            continue
        w = forward[j]
        if w >= 0 and abs(int(w) - v) <= s1:
            return False
    return True


def _swap_repair(forward, i, pool, s1, s2, rng, fixed, forbidden) -> bool:
    for pk in rng.permutation(len(pool)).tolist():
        v = pool[pk]
        for k in rng.permutation(i).tolist():
            if k in fixed:
                continue
            x = int(forward[k])
            if not _admissible(forward, k, v, s1, s2, forbidden, skip=k):
                continue
            forward[k] = v
            if _admissible(forward, i, x, s1, s2, forbidden):
                forward[i] = x
                pool.pop(pk)
                return True
            forward[k] = x
    return False


def deterministic(n: int, alpha: int) -> Permutation:
    """Affine interleaver ``i -> alpha*i + beta (mod n)`` with ``beta = (alpha-1)//2``.

    Works on 1-based positions internally so that residues fall in ``1..n``,
    then shifts to 0-based: ``forward[i] = (alpha*(i+1) + beta - 1) mod n``.
    """
    if n < 1 or alpha < 1:
        raise ValueError("n and alpha must be positive")
    if math.gcd(alpha, n) != 1:
        raise ValueError(f"gcd(alpha={alpha}, n={n}) = {math.gcd(alpha, n)}, must be 1")
    if alpha == 1 or n % (alpha - 1) != 0:
        raise ValueError(f"alpha - 1 = {alpha - 1} must divide n = {n}")
    beta = (alpha - 1) // 2
    i = np.arange(n, dtype=np.int64)
    return Permutation((alpha * (i + 1) + beta - 1) % n)


def theorem_spreads(n: int, alpha: int) -> tuple[int, int]:
    """Guaranteed (s1, s2) of :func:`deterministic` for these parameters."""
    return min(alpha, n // (alpha + 1)), (alpha - 1) // 2


def alpha_search(n: int) -> list[tuple[int, int, int]]:
    """Feasible ``alpha`` values with their guaranteed spreads, best first.

    ``s1`` never exceeds ``sqrt(n)``: ``s1`` images pairwise ``s1`` apart
    would already cover ``s1 * s1`` positions.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    rows = []
    for d in range(1, n + 1):
        if n % d:
            continue
        alpha = d + 1
        if math.gcd(alpha, n) != 1:
            continue
        s1, s2 = theorem_spreads(n, alpha)
        rows.append((alpha, s1, s2))
    rows.sort(key=lambda r: (-r[1], -r[2], r[0]))
    return rows


@dataclass(frozen=True)
class SpreadReport:
    s1_achieved: int
    s2_achieved: int
    violations: list[tuple[int, int]]
    circular: bool
    s1_requested: int = 0
    s2_requested: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _dist(x: np.ndarray, n: int, circular: bool) -> np.ndarray:
    x = np.abs(x)
    if circular:
        x = x % n
        return np.minimum(x, n - x)
    return x


def verify_spread(p: Permutation, s1: int, s2: int, circular: bool) -> SpreadReport:
    """Check spread and displacement of ``p``.

    Circular mode follows the affine construction: positions within ``s1``
    (mod ``n``) must map at least ``s1`` apart. Linear mode follows the
    S-random rule: positions within ``s1`` must map more than ``s1`` apart.
    In both modes the displacement rule is ``dist(i, forward[i]) >= s2``.

    Violations are ``(i, j)`` pairs for the spread rule and ``(i, i)`` for
    the displacement rule. ``s1_achieved`` is the largest ``s`` for which the
    spread rule holds (0 if it fails even for ``s = 1``).
    """
    n = p.n
    fwd = p.forward
    idx = np.arange(n)
    violations: list[tuple[int, int]] = []

    # running minimum of image distances over offsets 1..d
    achieved = 0
    running = None
    d_stop = n - 1 if not circular else n // 2
    d = 1
    while d <= d_stop:
        if circular:
            j = (idx + d) % n
            img = _dist(fwd[j] - fwd, n, True)
            src = idx
        else:
            img = np.abs(fwd[d:] - fwd[:-d])
            src = idx[:-d]
            j = src + d
        if img.size:
            m = int(img.min())
            running = m if running is None else min(running, m)
        holds = running is None or (running >= d if circular else running > d)
        if d <= s1:
            bad = img < s1 if circular else img <= s1
            violations.extend(zip(src[bad].tolist(), j[bad].tolist()))
        if holds:
            achieved = d
        if not holds and d >= s1:
            break
        d += 1

    disp = _dist(fwd - idx, n, circular)
    s2_achieved = int(disp.min())
    if s2 > 0:
        bad = np.nonzero(disp < s2)[0].tolist()
        violations.extend((i, i) for i in bad)
    return SpreadReport(achieved, s2_achieved, violations, circular, s1, s2)
