"""Low-weight turbo codewords: all inputs of weight <= w_det under a weight cap.

Every input splits, as seen by the terminated first encoder, into closed
events (each a multiple of the feedback polynomial, leaving the register at
zero) followed by at most one open event that the tail bits close. A closed
event of span ``D`` costs at least ``f(D)``, the cheapest way to stay out of
the zero state for ``D`` steps, so only short events and open events near
the block end can fit under the cap. Closed events come from
:func:`~turboweave.gf2poly.enumerate_divisible` and are translated over the
block; open events are enumerated directly in the final window. Exact
weights of the survivors are then evaluated in bulk from per-state
zero-input cycle tables.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from ..gf2poly import enumerate_divisible, hamming_weight_classes
from ..interleaver import Permutation
from .rsc import RscSpec


@dataclass(frozen=True)
class LowWeightWord:
    support: tuple[int, ...]
    weight: int
    parity1: int
    parity2: int

    @property
    def input_weight(self) -> int:
        return len(self.support)


@dataclass
class DistanceReport:
    """Outcome of a capped search.

    ``d_w[w]`` is the least codeword weight over inputs of weight ``w``, or
    None if every such input exceeds ``d_cap``. ``words`` lists every input
    within the cap, ordered by (input weight, support).
    """

    n: int
    w_det: int
    d_cap: int
    d_w: dict[int, int | None]
    argmin: dict[int, tuple[int, ...] | None]
    words: list[LowWeightWord] = field(default_factory=list)

    @property
    def d_min(self) -> int | None:
        vals = [d for d in self.d_w.values() if d is not None]
        return min(vals) if vals else None

    @property
    def d_eff(self) -> int | None:
        """Least weight over weight-2 inputs (effective free distance)."""
        return self.d_w.get(2)

    def offenders(self, target: int) -> list[LowWeightWord]:
        return [wd for wd in self.words if wd.weight <= target]

    def certifies(self, target: int) -> bool:
        """No input of weight <= w_det reaches codeword weight <= target."""
        if target > self.d_cap:
            raise ValueError("search cap is below the target")
        return not self.offenders(target)

    def to_text(self) -> str:
        lines = [f"N={self.n} w_det={self.w_det} d_cap={self.d_cap}"]
        for w in sorted(self.d_w):
            d = self.d_w[w]
            shown = f"> {self.d_cap}" if d is None else str(d)
            lines.append(f"  w={w}: d_w {shown}  input {self.argmin[w]}")
        dm = self.d_min
        lines.append(f"d_min {'> ' + str(self.d_cap) if dm is None else dm}")
        de = self.d_eff
        lines.append(f"d_eff (weight-2) {'> ' + str(self.d_cap) if de is None else de}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        rows = ["input_weight,codeword_weight,parity1,parity2,support"]
        for wd in self.words:
            rows.append(f"{wd.input_weight},{wd.weight},{wd.parity1},{wd.parity2},{' '.join(map(str, wd.support))}")
        return "\n".join(rows) + "\n"


class _Tables:
    """Zero-input cycle tables of one RSC code, for bulk path weights."""

    def __init__(self, spec: RscSpec):
        S = spec.n_states
        self.spec = spec
        self.nxt = np.asarray(spec.next_state)
        self.par = np.asarray(spec.parity)
        cycles = []
        for s in range(S):
            seq = [s]
            while True:
                nxt = int(spec.next_state[seq[-1], 0])
                if nxt == s:
                    break
                seq.append(nxt)
            cycles.append(seq)
        cmax = max(len(c) for c in cycles)
        self.clen = np.array([len(c) for c in cycles])
        self.cstate = np.zeros((S, cmax + 1), dtype=np.int64)
        self.cweight = np.zeros((S, cmax + 1), dtype=np.int64)
        for s, seq in enumerate(cycles):
            acc = 0
            for r in range(cmax + 1):
                st = seq[r % len(seq)]
                self.cstate[s, r] = st
                self.cweight[s, r] = acc
                acc += int(spec.parity[st, 0])
        self.cycle_weight = self.cweight[np.arange(S), self.clen]
        tail_cost = np.zeros(S, dtype=np.int64)
        for s in range(S):
            st, c = s, 0
            for _ in range(spec.memory):
                u = int(spec.tail_input[st])
                c += u + int(spec.parity[st, u])
                st = int(spec.next_state[st, u])
            tail_cost[s] = c
        self.tail_cost = tail_cost

    def advance(self, state, gap):
        """Run ``gap`` zero inputs from each state; returns (state, parity weight)."""
        c = self.clen[state]
        q, r = np.divmod(gap, c)
        w = q * self.cycle_weight[state] + self.cweight[state, r]
        return self.cstate[state, r], w

    def path_weight(self, positions: np.ndarray, n: int, terminated: bool) -> np.ndarray:
        """Parity weight (plus tail inputs and parities when terminated).

        ``positions`` is an ``(M, w)`` array of sorted input positions.
        """
        M = positions.shape[0]
        state = np.zeros(M, dtype=np.int64)
        total = np.zeros(M, dtype=np.int64)
        prev = np.full(M, -1, dtype=np.int64)
        for col in range(positions.shape[1]):
            pos = positions[:, col]
            state, w = self.advance(state, pos - prev - 1)
            total += w + self.par[state, 1]
            state = self.nxt[state, 1]
            prev = pos
        state, w = self.advance(state, n - 1 - prev)
        total += w
        if terminated:
            total += self.tail_cost[state]
        return total


@lru_cache(maxsize=8)
def _tables(spec: RscSpec) -> _Tables:
    return _Tables(spec)


def _min_open_cost(spec: RscSpec, w_det: int, budget: int, limit: int) -> int:
    """Largest ``L`` such that some path can stay off the zero state for ``L`` steps within budget.

    The path starts with input 1 from state zero; cost counts inputs and
    parities. The minimum cost is nondecreasing in the length.
    """
    S = spec.n_states
    inf = 1 << 30
    dp = np.full((S, w_det + 1), inf, dtype=np.int64)
    s1 = int(spec.next_state[0, 1])
    dp[s1, 1] = 1 + int(spec.parity[0, 1])
    length = 1
    best = int(dp.min())
    if best > budget:
        return 0
    while length < limit:
        new = np.full_like(dp, inf)
        for s in range(1, S):
            for j in range(w_det + 1):
                c = dp[s, j]
                if c >= inf:
                    continue
                for u in (0, 1):
                    jj = j + u
                    if jj > w_det:
                        continue
                    ns = int(spec.next_state[s, u])
                    if ns == 0:
                        continue
                    cc = c + u + int(spec.parity[s, u])
                    if cc < new[ns, jj]:
                        new[ns, jj] = cc
        if int(new.min()) > budget:
            break
        dp = new
        length += 1
    return length


@dataclass(frozen=True)
class _Event:
    offsets: tuple[int, ...]
    cost: int

    @property
    def span(self) -> int:
        return self.offsets[-1]

    @property
    def weight(self) -> int:
        return len(self.offsets)


@lru_cache(maxsize=32)
def _closed_events(spec: RscSpec, w_det: int, budget: int, span_limit: int) -> tuple[_Event, ...]:
    """Single closed events (start at offset 0) with cost <= budget."""
    classes = hamming_weight_classes(spec.feedback, min(w_det, (1 << spec.memory) - 1))
    nxt, par = spec.next_state, spec.parity
    events = []
    for poly in enumerate_divisible(classes, span_limit + 1, w_det):
        offs = poly.exponents
        if offs[0] != 0:
            continue
        s, cost, single = 0, 0, True
        ones = set(offs)
        for t in range(offs[-1] + 1):
            u = 1 if t in ones else 0
            cost += u + int(par[s, u])
            s = int(nxt[s, u])
            if s == 0 and t < offs[-1]:
                single = False
                break
            if cost > budget:
                break
        if single and cost <= budget and s == 0:
            events.append(_Event(offs, cost))
    events.sort(key=lambda e: (e.cost, e.weight, e.offsets))
    return tuple(events)


def _place_closed(events, n, w_det, budget):
    """Closed-event sequences, as rows of positions grouped by input weight.

    Returns ``{weight: (positions, cost, end)}`` where ``end`` is the last
    position used; weight 0 holds the empty sequence with ``end = -1``.
    """
    out = {0: (np.zeros((1, 0), dtype=np.int64), np.zeros(1, dtype=np.int64), np.array([-1]))}
    frontier = dict(out)
    for _ in range(w_det // 2):
        nxt_frontier = {}
        for w0, (pos0, cost0, end0) in frontier.items():
            for ev in events:
                w1 = w0 + ev.weight
                if w1 > w_det:
                    continue
                ok = cost0 + ev.cost <= budget
                if not ok.any():
                    continue
                P, C, E = pos0[ok], cost0[ok], end0[ok]
                # start t ranges over [E + 1, n - 1 - span]
                lo = E + 1
                hi = n - 1 - ev.span
                counts = np.maximum(hi - lo + 1, 0)
                if counts.sum() == 0:
                    continue
                rep = np.repeat(np.arange(P.shape[0]), counts)
                starts = np.concatenate([np.arange(a, hi + 1) for a in lo[counts > 0]])
                new_pos = np.concatenate([P[rep], starts[:, None] + np.array(ev.offsets)[None, :]], axis=1)
                bucket = nxt_frontier.setdefault(w1, [])
                bucket.append((new_pos, C[rep] + ev.cost, starts + ev.span))
        frontier = {}
        for w1, parts in nxt_frontier.items():
            frontier[w1] = tuple(np.concatenate(x) for x in zip(*parts))
            if w1 in out:
                out[w1] = tuple(np.concatenate([a, b]) for a, b in zip(out[w1], frontier[w1]))
            else:
                out[w1] = frontier[w1]
        if not frontier:
            break
    return out


def _window_combos(tables: _Tables, n: int, w_det: int, budget: int, window: int):
    """Inputs confined to the last ``window`` positions, with encoder-1 cost."""
    start = max(0, n - window)
    found = {}
    for w in range(1, w_det + 1):
        rows = np.array(list(itertools.combinations(range(start, n), w)), dtype=np.int64).reshape(-1, w)
        if rows.size == 0:
            continue
        cost = w + tables.path_weight(rows, n, terminated=True)
        keep = cost <= budget
        found[w] = (rows[keep], cost[keep])
    return found


def distance_search(spec: RscSpec, p: Permutation, w_det: int = 4, d_cap: int = 20) -> DistanceReport:
    """All nonzero inputs of weight <= ``w_det`` whose turbo codeword weight is <= ``d_cap``.

    Codeword weight counts systematic bits, the first encoder's parity, tail
    inputs and tail parities, and the unterminated second encoder's parity
    (rate 1/3, no puncturing).
    """
    if w_det < 1:
        raise ValueError("w_det must be positive")
    if not spec.is_turbo_ready():
        raise ValueError("distance search needs a primitive feedback polynomial")
    n = p.n
    tables = _tables(spec)
    ff0 = 1 if 0 in spec.feedforward.exponents else 0
    budget = d_cap - ff0  # second encoder emits at least ff0 for any nonzero input
    window = _min_open_cost(spec, w_det, budget, limit=n + 1)
    events = _closed_events(spec, w_det, budget, min(window, n))

    closed = _place_closed(events, n, w_det, budget)
    candidates: dict[int, list[np.ndarray]] = {}
    for w, (pos, _, _) in closed.items():
        if w:
            candidates.setdefault(w, []).append(pos)
    for ww, (rows, costs) in _window_combos(tables, n, w_det, budget, window).items():
        for wc, (pos, cost_c, end_c) in closed.items():
            if wc + ww > w_det or pos.shape[0] == 0 or rows.shape[0] == 0:
                continue
            # pair every window combo with every compatible closed prefix
            fits = (cost_c[:, None] + costs[None, :] <= budget) & (end_c[:, None] < rows[None, :, 0])
            ci, wi = np.nonzero(fits)
            if ci.size:
                candidates.setdefault(wc + ww, []).append(np.concatenate([pos[ci], rows[wi]], axis=1))

    words: list[LowWeightWord] = []
    d_w: dict[int, int | None] = {w: None for w in range(1, w_det + 1)}
    argmin: dict[int, tuple[int, ...] | None] = {w: None for w in range(1, w_det + 1)}
    fwd = p.forward
    for w in sorted(candidates):
        rows = np.unique(np.concatenate(candidates[w]), axis=0)
        p1 = tables.path_weight(rows, n, terminated=True)
        inter = np.sort(fwd[rows], axis=1)
        p2 = tables.path_weight(inter, n, terminated=False)
        total = w + p1 + p2
        keep = np.nonzero(total <= d_cap)[0]
        for r in keep:
            words.append(LowWeightWord(tuple(int(x) for x in rows[r]), int(total[r]), int(p1[r]), int(p2[r])))
    words.sort(key=lambda wd: (wd.input_weight, wd.support))
    for wd in words:
        w = wd.input_weight
        if d_w[w] is None or wd.weight < d_w[w]:
            d_w[w] = wd.weight
            argmin[w] = wd.support
    return DistanceReport(n, w_det, d_cap, d_w, argmin, words)


def codeword_weight(spec: RscSpec, p: Permutation, support) -> LowWeightWord:
    """Exact rate-1/3 codeword weight of one input given by its support."""
    support = tuple(sorted(int(x) for x in support))
    tables = _tables(spec)
    rows = np.array([support], dtype=np.int64)
    p1 = int(tables.path_weight(rows, p.n, terminated=True)[0])
    inter = np.sort(p.forward[rows], axis=1)
    p2 = int(tables.path_weight(inter, p.n, terminated=False)[0])
    return LowWeightWord(support, len(support) + p1 + p2, p1, p2)
