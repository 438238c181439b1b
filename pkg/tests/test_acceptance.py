"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``pytest tests/test_acceptance.py -s`` or
``python tests/test_acceptance.py``. The lines are also repeated in the
pytest terminal summary.
"""

import itertools
import math
import time

import numpy as np
import pytest

from turboweave import sim
from turboweave.designer import DesignParams, design, step1
from turboweave.gf2poly import Gf2Poly, divisible_by_primitive, hamming_weight_classes, poly_mod
from turboweave.ids import CorrModel, corr_base, propagate_third, propagate_third_expanded
from turboweave.interleaver import (
    deterministic,
    random_interleaver,
    s_random,
    theorem_spreads,
    verify_spread,
)
from turboweave.turbo import DEFAULT_SPEC, bcjr_decode, rsc_encode
from turboweave.turbo.distance import distance_search

RESULTS: dict[int, str] = {}


def report(number, ok, detail, started):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({time.time() - started:.0f} s) {detail}"
    RESULTS[number] = line
    print(line)
    return ok


# ----- a reference encoder built straight from the tap recursion ----------

FB = (1, 1, 0, 1)  # 1 + X + X^3
FF = (1, 1, 1, 1)  # 1 + X + X^2 + X^3
M = 3


def _tables():
    """next_state[s][u], parity[s][u] with s = a[t-1] | a[t-2] << 1 | a[t-3] << 2."""
    nxt = [[0, 0] for _ in range(1 << M)]
    par = [[0, 0] for _ in range(1 << M)]
    for s in range(1 << M):
        reg = [(s >> k) & 1 for k in range(M)]
        for u in (0, 1):
            a = u
            for k in range(1, M + 1):
                a ^= FB[k] & reg[k - 1]
            y = FF[0] & a
            for k in range(1, M + 1):
                y ^= FF[k] & reg[k - 1]
            nxt[s][u] = ((s << 1) | a) & ((1 << M) - 1)
            par[s][u] = y
    return nxt, par


NXT, PAR = _tables()


def _feedback_input(s):
    """Input that drives the feedback sum to zero (used to flush the register)."""
    return 0 if NXT[s][0] & 1 == 0 else 1


def _tail_cost(s):
    cost = 0
    for _ in range(M):
        u = _feedback_input(s)
        cost += u + PAR[s][u]
        s = NXT[s][u]
    assert s == 0
    return cost


TAIL = [_tail_cost(s) for s in range(1 << M)]


def _first_encoder_candidates(n, w_max, budget):
    """All supports of weight <= w_max whose systematic + parity-1 + tail weight is <= budget.

    Depth-first over positions. In the zero state the next one may sit
    anywhere; in a nonzero state every step costs its parity bit, so paths
    are cut as soon as the running weight exceeds the budget.
    """
    out = []
    support = []

    def walk(t, s, acc):
        if s == 0:
            if support:
                out.append((tuple(support), acc))
            if len(support) == w_max:
                return
            for t1 in range(t, n):
                c = acc + 1 + PAR[0][1]
                if c <= budget:
                    support.append(t1)
                    walk(t1 + 1, NXT[0][1], c)
                    support.pop()
            return
        if t == n:
            c = acc + TAIL[s]
            if c <= budget:
                out.append((tuple(support), c))
            return
        c0 = acc + PAR[s][0]
        if c0 <= budget:
            walk(t + 1, NXT[s][0], c0)
        if len(support) < w_max:
            c1 = acc + 1 + PAR[s][1]
            if c1 <= budget:
                support.append(t)
                walk(t + 1, NXT[s][1], c1)
                support.pop()

    walk(0, 0, 0)
    return out


def _second_parity_within(fwd, support, n, limit):
    """Parity-2 weight of the interleaved support, or None once it exceeds ``limit``."""
    ones = sorted(fwd[i] for i in support)
    s, w, k = 0, 0, 0
    t = ones[0]
    while t < n:
        u = 1 if k < len(ones) and ones[k] == t else 0
        k += u
        w += PAR[s][u]
        s = NXT[s][u]
        if w > limit:
            return None
        if s == 0 and k == len(ones):
            return w
        t += 1
    return w


def independent_offenders(perm, w_max, target):
    fwd = [int(v) for v in perm.forward]
    found = []
    for sup, e1 in _first_encoder_candidates(perm.n, w_max, target):
        p2 = _second_parity_within(fwd, sup, perm.n, target - e1)
        if p2 is not None:
            found.append((sup, e1 + p2))
    return found


def ref_terminated_encode(bits):
    s, par, tail = 0, [], []
    for u in bits:
        par.append(PAR[s][u])
        s = NXT[s][u]
    for _ in range(M):
        u = _feedback_input(s)
        tail.append(u)
        par.append(PAR[s][u])
        s = NXT[s][u]
    return par, tail


# ----- criteria ------------------------------------------------------------


def test_criterion_1_affine_spread_sweep():
    t0 = time.time()
    pairs = bad = 0
    for n in range(1, 4097):
        for a in range(2, n + 2):
            if math.gcd(a, n) != 1 or n % (a - 1):
                continue
            pairs += 1
            s1, s2 = theorem_spreads(n, a)
            if not verify_spread(deterministic(n, a), s1, s2, circular=True).ok:
                bad += 1
    ref = verify_spread(deterministic(1024, 33), 30, 16, circular=True).ok and theorem_spreads(1024, 33) == (30, 16)
    elapsed = time.time() - t0
    ok = bad == 0 and ref and elapsed < 60
    report(1, ok, f"{pairs} (n, alpha) pairs, {bad} with violations; (1024, 33) -> (30, 16) ok={ref}", t0)
    assert ok


def _int_mod(a, b):
    db = b.bit_length() - 1
    while a and a.bit_length() - 1 >= db:
        a ^= b << (a.bit_length() - 1 - db)
    return a


def test_criterion_2_divisibility_oracle():
    t0 = time.time()
    p = Gf2Poly.parse("x^3+x+1")
    cls = hamming_weight_classes(p, 7)
    checked = disagree = 0
    for w in range(0, 5):
        for exps in itertools.combinations(range(24), w):
            f = Gf2Poly(exps)
            want = _int_mod(f.to_int(), p.to_int()) == 0
            checked += 1
            disagree += divisible_by_primitive(f, cls) != want or poly_mod(f, p).is_zero() != want
    rng = np.random.default_rng(2024)
    for _ in range(100_000):
        w = int(rng.integers(1, 7))
        f = Gf2Poly.from_exponents(rng.choice(10_000, size=w, replace=False).tolist())
        checked += 1
        disagree += divisible_by_primitive(f, cls) != poly_mod(f, p).is_zero()
    sizes = tuple(len(cls.classes[w]) for w in (3, 4, 7))
    elapsed = time.time() - t0
    ok = disagree == 0 and sizes == (7, 7, 1) and elapsed < 60
    report(2, ok, f"{checked} polynomials, {disagree} disagreements; class sizes {sizes}", t0)
    assert ok


def _brute_posterior(sys, par, apr, n, terminated):
    steps = len(sys)
    num = np.full(steps, -np.inf)
    den = np.full(steps, -np.inf)
    for bits in itertools.product((0, 1), repeat=n):
        if terminated:
            p, tail = ref_terminated_encode(bits)
        else:
            p, tail = ref_terminated_encode(bits)[0][:n], []
        x = list(bits) + tail
        metric = sum((1 - 2 * x[k]) * (sys[k] + apr[k]) / 2 + (1 - 2 * p[k]) * par[k] / 2 for k in range(steps))
        for k in range(steps):
            if x[k]:
                den[k] = np.logaddexp(den[k], metric)
            else:
                num[k] = np.logaddexp(num[k], metric)
    return num - den


def test_criterion_3_log_map_exactness():
    t0 = time.time()
    rng = np.random.default_rng(3)
    n = 8
    worst = 0.0
    for terminated in (False, True):
        steps = n + (M if terminated else 0)
        for _ in range(100):
            sys, par = rng.normal(0, 2.5, (2, steps))
            apr = rng.normal(0, 1.5, steps)
            _, post = bcjr_decode(DEFAULT_SPEC, sys, par, apr, terminated)
            worst = max(worst, float(np.max(np.abs(post - _brute_posterior(sys, par, apr, n, terminated)))))
    elapsed = time.time() - t0
    ok = worst <= 1e-9 and elapsed < 60
    report(3, ok, f"200 instances, max |delta| = {worst:.2e}", t0)
    assert ok


def test_criterion_4_third_step_forms_agree():
    t0 = time.time()
    rng = np.random.default_rng(4)
    worst = 0.0
    for k in range(50):
        n = int(rng.integers(2, 33))
        a, c = rng.uniform(0.05, 1.5, 2)
        b = corr_base(CorrModel(float(a), float(c), n))
        p = random_interleaver(n, k)
        worst = max(worst, float(np.max(np.abs(propagate_third(b, p) - propagate_third_expanded(b, p)))))
    ok = worst <= 1e-10
    report(4, ok, f"50 instances, max entry difference {worst:.2e}", t0)
    assert ok


def test_criterion_5_step2_soundness():
    t0 = time.time()
    prm = DesignParams(192, 9, 3, 4, 20, seed=42)
    res = design(prm)
    # The verifier must see the offenders the design started from.
    start = step1(prm)
    seen = {sup for sup, _ in independent_offenders(start, 4, 20)}
    searched = {o.support for o in distance_search(DEFAULT_SPEC, start, 4, 20).offenders(20)}
    left = independent_offenders(res.permutation, 4, 20)
    ok = res.trace.converged and res.trace.is_monotone() and not left and seen == searched and bool(seen)
    report(
        5, ok,
        f"converged={res.trace.converged} swaps={len(res.trace.swaps)} monotone={res.trace.is_monotone()}; "
        f"{len(seen)} starting offenders found by both searches; {len(left)} left after design",
        t0,
    )
    assert ok


def test_criterion_8_property_suites(tmp_path):
    t0 = time.time()
    rng = np.random.default_rng(8)
    failures = []

    perms = [random_interleaver(int(n), int(k)) for k, n in enumerate(rng.integers(1, 500, 40))]
    perms += [s_random(192, 9, seed=k) for k in range(5)] + [deterministic(1024, 33), step1(DesignParams(192, 9, 3))]
    for p in perms:
        fwd, inv = np.asarray(p.forward), np.asarray(p.inverse)
        if not (np.array_equal(np.sort(fwd), np.arange(p.n)) and np.array_equal(inv[fwd], np.arange(p.n))):
            failures.append("bijectivity")
            break

    for _ in range(500):
        n = int(rng.integers(1, 200))
        a, b = rng.integers(0, 2, (2, n), dtype=np.int8)
        pa, pb, pab = (rsc_encode(DEFAULT_SPEC, x)[0] for x in (a, b, a ^ b))
        if not np.array_equal(pa ^ pb, pab):
            failures.append("linearity")
            break

    for _ in range(10_000):
        bits = rng.integers(0, 2, int(rng.integers(1, 300)), dtype=np.int8)
        par, state, tail = rsc_encode(DEFAULT_SPEC, bits, terminate=True)
        s = 0
        for u in np.concatenate([bits, tail]).tolist():
            s = NXT[s][u]
        if state != 0 or s != 0 or len(par) != bits.size + M:
            failures.append("termination")
            break

    worst = 0.0
    for terminated in (False, True):
        sys, par, apr = rng.normal(0, 2, (3, 40))
        ext, _ = bcjr_decode(DEFAULT_SPEC, sys, par, apr, terminated)
        for k in range(40):
            bumped = sys.copy()
            bumped[k] += rng.normal(0, 5)
            worst = max(worst, abs(bcjr_decode(DEFAULT_SPEC, bumped, par, apr, terminated)[0][k] - ext[k]))
    if worst > 1e-12:
        failures.append("extrinsic purity")

    cfg = dict(interleaver=s_random(64, 4, seed=1), iterations=4, min_frame_errors=20, max_frames=300, seed=5, chunk=25)
    ch = sim.ChannelSpec("bpsk", (0.5, 1.5))
    blobs = []
    for workers in (1, 1, 2):
        path = tmp_path / f"run{len(blobs)}.csv"
        sim.write_csv(sim.simulate(sim.RunConfig(**cfg, workers=workers), ch), path)
        blobs.append(path.read_bytes())
    if len(set(blobs)) != 1:
        failures.append("csv reproducibility")

    ok = not failures
    report(8, ok, f"bijectivity, linearity, 10^4 terminations, extrinsic purity ({worst:.1e}), "
                  f"csv reproducibility; failing: {failures or 'none'}", t0)
    assert ok


def _separated(better, worse):
    """True when ``better`` is lower by more than twice the combined binomial sigma."""
    return worse.ber - better.ber > 2 * math.hypot(better.sigma(), worse.sigma())


def _curve(perm, ch, max_frames, chunk):
    cfg = sim.RunConfig(perm, iterations=18, min_frame_errors=100, max_frames=max_frames,
                        seed=1, early_stop=True, chunk=chunk)
    return sim.simulate(cfg, ch)


def test_criterion_6_ber_ordering_n192(tmp_path):
    t0 = time.time()
    ch = sim.ChannelSpec("bpsk", (1.0, 2.0, 3.0), "1/3")
    curves = {
        "two-step": _curve(design(DesignParams(192, 9, 3, 4, 20, seed=42)).permutation, ch, 600_000, 1000),
        "s-random": _curve(s_random(192, 9, seed=42), ch, 600_000, 1000),
        "random": _curve(random_interleaver(192, 42), ch, 600_000, 1000),
    }
    sim.emit(curves, tmp_path / "n192.svg", "svg")
    # Highest grid point where every estimate has 100 frame errors or hit the cap.
    k = max(i for i in range(len(ch.ebn0_db))
            if all(c[i].frame_errors >= 100 or c[i].frames >= 600_000 for c in curves.values()))
    a, b, c = (curves[name][k] for name in ("two-step", "s-random", "random"))
    ok = _separated(a, b) and _separated(b, c)
    report(6, ok,
           f"at {ch.ebn0_db[k]} dB: two-step {a.ber:.2e}±{a.sigma():.1e} ({a.frames} frames), "
           f"s-random {b.ber:.2e}±{b.sigma():.1e} ({b.frames}), random {c.ber:.2e}±{c.sigma():.1e} ({c.frames})",
           t0)
    assert ok


def test_criterion_7_deterministic_vs_random_n1024():
    t0 = time.time()
    ch = sim.ChannelSpec("qpsk", (0.5, 1.0, 1.5, 2.0, 2.5), "1/2")
    det = _curve(deterministic(1024, 33), ch, 5000, 100)
    rnd = _curve(random_interleaver(1024, 42), ch, 5000, 100)
    ratios = []
    for d, r in zip(det, rnd):
        ratios.append(d.ber / r.ber if r.ber > 0 else (1.0 if d.ber == 0 else math.inf))
    ok = all(1 / 3 <= q <= 3 for q in ratios)
    pairs = ", ".join(f"{x} dB {q:.2f}" for x, q in zip(ch.ebn0_db, ratios))
    report(7, ok, f"BER ratio deterministic/random: {pairs}", t0)
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
