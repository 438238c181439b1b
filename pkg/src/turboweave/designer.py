"""Two-step S-random interleaver design.

Step 1 draws a spread, displaced permutation that also respects the
first encoder's termination. Step 2 removes low-weight codewords by
swapping images of neighbouring positions, keeping only swaps that do not
raise the ``ids_new`` score.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

from .ids import CorrModel, corr_base, ids_scores_from_base
from .interleaver import Permutation, constrained_random, verify_spread
from .turbo.distance import codeword_weight, distance_search
from .turbo.rsc import DEFAULT_SPEC, RscSpec

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DesignParams:
    n: int
    s1: int
    s2: int
    w_det: int = 4
    d_min_target: int = 20
    seed: int = 0
    max_step2_rounds: int = 100
    a: float = 0.5
    c: float = 0.2
    spec: RscSpec = DEFAULT_SPEC
    max_restarts: int = 1000

    def __post_init__(self):
        if self.s1 < 1 or self.s2 < 0 or self.w_det < 2 or self.d_min_target < 1:
            raise ValueError("need s1 >= 1, s2 >= 0, w_det >= 2, d_min_target >= 1")
        if 2 * self.s2 >= self.n:
            raise ValueError("s2 must be below n/2")

    @property
    def model(self) -> CorrModel:
        return CorrModel(self.a, self.c, self.n)


@dataclass(frozen=True)
class SwapRecord:
    round: int
    i: int
    j: int
    ids_before: float
    ids_after: float
    support: tuple[int, ...]
    d_before: int
    d_after: int


@dataclass
class DesignTrace:
    swaps: list[SwapRecord] = field(default_factory=list)
    converged: bool = False
    rounds: int = 0
    skipped: int = 0
    initial_ids_new: float = float("nan")

    def is_monotone(self) -> bool:
        prev = self.initial_ids_new
        for rec in self.swaps:
            if rec.ids_after > rec.ids_before or rec.ids_before > prev:
                return False
            prev = rec.ids_after
        return True

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(["round", "i", "j", "ids_new_before", "ids_new_after", "support", "d_before", "d_after"])
            for r in self.swaps:
                out.writerow([r.round, r.i, r.j, repr(r.ids_before), repr(r.ids_after),
                              " ".join(map(str, r.support)), r.d_before, r.d_after])


def termination_constraints(n: int, memory: int) -> tuple[dict[int, int], dict[int, set[int]]]:
    """Pins and exclusions protecting the first encoder's termination.

    In 1-based terms: ``pi(1) = N``, and ``pi(i) = N - k`` for ``k = 1..m-1``
    only when ``i < N/2``. Returned in 0-based form.
    """
    fixed = {0: n - 1}
    late = {i for i in range(n) if 2 * (i + 1) >= n}
    forbidden = {n - 1 - k: late for k in range(1, memory)}
    return fixed, forbidden


def check_termination(p: Permutation, memory: int) -> list[str]:
    """Human-readable violations of :func:`termination_constraints`."""
    n = p.n
    problems = []
    if p.forward[0] != n - 1:
        problems.append(f"pi(1) = {p.forward[0] + 1}, expected {n}")
    for k in range(1, memory):
        i = int(p.inverse[n - 1 - k])
        if 2 * (i + 1) >= n:
            problems.append(f"pi({i + 1}) = N-{k} with {i + 1} >= N/2")
    return problems


def step1(params: DesignParams) -> Permutation:
    fixed, forbidden = termination_constraints(params.n, params.spec.memory)
    return constrained_random(
        params.n,
        params.s1,
        params.s2,
        seed=params.seed,
        max_restarts=params.max_restarts,
        fixed=fixed,
        forbidden=forbidden,
    )


def step2(p: Permutation, params: DesignParams) -> tuple[Permutation, DesignTrace]:
    """Swap search raising the low-weight codeword floor above the target.

    Each round lists the offenders (inputs of weight <= ``w_det`` with
    codeword weight <= target). For each still-offending input with first
    position ``i1``, ``j`` runs from ``i1 + 1`` upward and wraps around to
    the positions before ``i1``. The input's own positions are skipped, as
    are swaps that would break the termination pins. The first swap that
    does not raise ``ids_new`` and lifts this input above the target is
    kept. An offender with no such ``j`` waits for the next round.
    """
    if p.n != params.n:
        raise ValueError("permutation length does not match the design")
    spec = params.spec
    target = params.d_min_target
    base = corr_base(params.model)
    current = ids_scores_from_base(base, p).ids_new
    trace = DesignTrace(initial_ids_new=current)
    protect = not check_termination(p, spec.memory)
    n = p.n
    for rnd in range(1, params.max_step2_rounds + 1):
        offenders = distance_search(spec, p, params.w_det, target).offenders(target)
        trace.rounds = rnd
        log.info("round %d: %d offenders, ids_new %.6g", rnd, len(offenders), current)
        if not offenders:
            trace.converged = True
            return p, trace
        for off in offenders:
            before = codeword_weight(spec, p, off.support).weight
            if before > target:
                continue
            i1 = off.support[0]
            for j in (*range(i1 + 1, n), *range(i1)):
                if j in off.support:
                    continue
                cand = p.swapped(i1, j)
                if protect and check_termination(cand, spec.memory):
                    continue
                score = ids_scores_from_base(base, cand).ids_new
                if score > current:
                    continue
                after = codeword_weight(spec, cand, off.support).weight
                if after <= target:
                    continue
                trace.swaps.append(SwapRecord(rnd, i1, j, current, score, off.support, before, after))
                p, current = cand, score
                break
            else:
                trace.skipped += 1
    trace.converged = not distance_search(spec, p, params.w_det, target).offenders(target)
    return p, trace


@dataclass
class DesignResult:
    permutation: Permutation
    trace: DesignTrace
    params: DesignParams

    def metadata(self) -> dict[str, str]:
        p, prm = self.permutation, self.params
        scores = ids_scores_from_base(corr_base(prm.model), p)
        report = distance_search(prm.spec, p, prm.w_det, prm.d_min_target)
        spread = verify_spread(p, prm.s1, prm.s2, circular=False)
        meta = {
            "n": prm.n,
            "s1": prm.s1,
            "s2": prm.s2,
            "w_det": prm.w_det,
            "d_min_target": prm.d_min_target,
            "seed": prm.seed,
            "encoder": prm.spec.octal,
            "corr_a": prm.a,
            "corr_c": prm.c,
            "ids": scores.ids,
            "ids1": scores.ids1,
            "ids2": scores.ids2,
            "ids_new": scores.ids_new,
            "certified_above_target": not report.offenders(prm.d_min_target),
            "d_min_within_cap": report.d_min if report.d_min is not None else f">{prm.d_min_target}",
            "s1_achieved": spread.s1_achieved,
            "s2_achieved": spread.s2_achieved,
            "termination_ok": not check_termination(p, prm.spec.memory),
            "converged": self.trace.converged,
            "rounds": self.trace.rounds,
            "swaps": len(self.trace.swaps),
            "skipped_offenders": self.trace.skipped,
        }
        return {k: str(v) for k, v in meta.items()}

    def save(self, path: str | Path, trace_path: str | Path | None = None) -> None:
        """Write the interleaver file, its ``.meta`` sidecar and optionally the trace CSV."""
        path = Path(path)
        self.permutation.save(path)
        meta = self.metadata()
        Path(str(path) + ".meta").write_text("".join(f"{k}={v}\n" for k, v in meta.items()))
        if trace_path is not None:
            self.trace.write_csv(trace_path)


def design(params: DesignParams) -> DesignResult:
    p = step1(params)
    p, trace = step2(p, params)
    return DesignResult(p, trace, params)


def read_meta(path: str | Path) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        if line.strip() and not line.startswith("#"):
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out
