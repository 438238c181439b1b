import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turboweave.interleaver import (
    ConvergenceError,
    Permutation,
    alpha_search,
    constrained_random,
    deterministic,
    random_interleaver,
    s_random,
    theorem_spreads,
    verify_spread,
)

perms = st.integers(1, 60).flatmap(lambda n: st.permutations(list(range(n))))


def naive_spread_ok(fwd, s1, s2, circular):
    """Pairwise check straight from the definitions."""
    n = len(fwd)

    def dist(a, b):
        d = abs(a - b)
        return min(d % n, n - d % n) if circular else d

    for i in range(n):
        if dist(i, fwd[i]) < s2:
            return False
        for j in range(i + 1, n):
            if 0 < dist(i, j) <= s1:
                far = dist(fwd[i], fwd[j])
                if (far < s1) if circular else (far <= s1):
                    return False
    return True


# ----- Permutation ---------------------------------------------------------


@given(perms)
def test_inverse_is_exact(fwd):
    p = Permutation(fwd)
    assert np.array_equal(p.forward[p.inverse], np.arange(p.n))
    assert np.array_equal(p.inverse[p.forward], np.arange(p.n))


@given(perms, st.data())
def test_interleave_roundtrip(fwd, data):
    p = Permutation(fwd)
    x = np.array(data.draw(st.lists(st.integers(0, 9), min_size=p.n, max_size=p.n)))
    y = p.interleave(x)
    assert np.array_equal(p.deinterleave(y), x)
    assert all(y[p.forward[i]] == x[i] for i in range(p.n))


@pytest.mark.parametrize("bad", [[0, 0, 1], [0, 3, 1], [-1, 0, 1], []])
def test_rejects_non_bijection(bad):
    with pytest.raises(ValueError):
        Permutation(bad)


def test_file_roundtrip(tmp_path):
    p = random_interleaver(97, 3)
    p.save(tmp_path / "a.il")
    text = (tmp_path / "a.il").read_text()
    assert text.splitlines()[0] == "# turbo-weave interleaver N=97"
    q = Permutation.load(tmp_path / "a.il")
    assert q == p
    q.save(tmp_path / "b.il")
    assert (tmp_path / "b.il").read_bytes() == text.encode()


def test_load_rejects_wrong_count(tmp_path):
    (tmp_path / "x.il").write_text("# turbo-weave interleaver N=3\n0\n1\n")
    with pytest.raises(ValueError):
        Permutation.load(tmp_path / "x.il")


def test_swapped_keeps_bijection():
    p = random_interleaver(20, 1)
    q = p.swapped(3, 11)
    assert q.forward[3] == p.forward[11] and q.forward[11] == p.forward[3]
    assert q.swapped(3, 11) == p


# ----- random --------------------------------------------------------------


def test_random_basics():
    assert random_interleaver(1, 5) == Permutation.identity(1)
    assert random_interleaver(192, 7) == random_interleaver(192, 7)
    assert random_interleaver(192, 7) != random_interleaver(192, 8)


# ----- S-random ------------------------------------------------------------


@pytest.mark.parametrize("n,s", [(8, 1), (64, 5), (192, 9), (400, 14), (1024, 22)])
def test_s_random_spread(n, s):
    p = s_random(n, s, seed=11)
    assert verify_spread(p, s, 0, circular=False).ok


def test_s_random_small_has_oracle_witness():
    ok = [f for f in itertools.permutations(range(8)) if naive_spread_ok(f, 1, 0, False)]
    assert ok
    assert naive_spread_ok(list(s_random(8, 1, seed=0).forward), 1, 0, False)


def test_s_random_infeasible():
    assert not any(naive_spread_ok(f, 3, 0, False) for f in itertools.permutations(range(4)))
    with pytest.raises(ConvergenceError) as info:
        s_random(4, 3, seed=0, max_restarts=20)
    assert info.value.best_spread < 3


def test_s_random_deterministic_given_seed():
    assert s_random(192, 9, seed=5) == s_random(192, 9, seed=5)


def test_constrained_random_displacement_and_pins():
    n = 64
    p = constrained_random(n, 4, 3, seed=2, fixed={0: n - 1}, forbidden={n - 2: set(range(32, 64))})
    assert p.forward[0] == n - 1
    assert p.inverse[n - 2] < 32
    assert np.all(np.abs(p.forward - np.arange(n)) > 3)
    assert verify_spread(p, 4, 4, circular=False).ok


# ----- deterministic -------------------------------------------------------


def test_deterministic_reference_case():
    p = deterministic(1024, 33)
    assert theorem_spreads(1024, 33) == (30, 16)
    rep = verify_spread(p, 30, 16, circular=True)
    assert rep.ok
    assert rep.s1_achieved >= 30 and rep.s2_achieved >= 16


def test_deterministic_small_case():
    p = deterministic(12, 5)
    assert theorem_spreads(12, 5) == (2, 2)
    assert verify_spread(p, 2, 2, circular=True).ok
    # 1-based congruence pi(i) = 5 i + 2 (mod 12), shifted to 0-based
    want = [((5 * i + 2 - 1) % 12) for i in range(1, 13)]
    assert list(p.forward) == want


@pytest.mark.parametrize("n,alpha,word", [(12, 4, "gcd"), (12, 6, "gcd"), (12, 11, "divide"), (10, 1, "divide")])
def test_deterministic_preconditions(n, alpha, word):
    with pytest.raises(ValueError, match=word):
        deterministic(n, alpha)


def _feasible(n):
    return [a for a in range(2, n + 2) if math.gcd(a, n) == 1 and n % (a - 1) == 0]


@pytest.mark.parametrize("chunk", range(4))
def test_affine_guarantee_sweep(chunk):
    """Every feasible (n, alpha) with n <= 4096 meets its guaranteed spreads."""
    for n in range(4 + chunk, 4097, 4):
        for a in _feasible(n):
            s1, s2 = theorem_spreads(n, a)
            rep = verify_spread(deterministic(n, a), s1, s2, circular=True)
            assert rep.ok, (n, a, rep.violations[:3])


def test_alpha_search():
    rows = alpha_search(1024)
    assert (33, 30, 16) in rows
    assert all(s1 <= 32 for _, s1, _ in rows)
    assert rows[0][1] == max(r[1] for r in rows)
    assert (5, 2, 2) in alpha_search(12)
    with pytest.raises(ValueError):
        alpha_search(3)


# ----- verify_spread -------------------------------------------------------


def test_identity_fails_displacement_everywhere():
    rep = verify_spread(Permutation.identity(10), 0, 1, circular=False)
    assert sorted(i for i, j in rep.violations if i == j) == list(range(10))


def test_reversal_fixed_point():
    rep = verify_spread(Permutation([4, 3, 2, 1, 0]), 0, 1, circular=True)
    assert rep.violations == [(2, 2)]


@settings(max_examples=300)
@given(perms, st.integers(0, 6), st.integers(0, 6), st.booleans())
def test_verify_matches_pairwise_definition(fwd, s1, s2, circular):
    rep = verify_spread(Permutation(fwd), s1, s2, circular)
    assert rep.ok == naive_spread_ok(fwd, s1, s2, circular)


@given(perms, st.integers(0, 6), st.booleans())
def test_displacement_symmetric_under_inversion(fwd, s2, circular):
    p = Permutation(fwd)
    a = verify_spread(p, 0, s2, circular)
    b = verify_spread(p.inverted(), 0, s2, circular)
    assert a.s2_achieved == b.s2_achieved
    assert a.ok == b.ok


@given(perms, st.booleans())
def test_achieved_spread_is_tight(fwd, circular):
    p = Permutation(fwd)
    rep = verify_spread(p, 0, 0, circular)
    s = rep.s1_achieved
    assert naive_spread_ok(fwd, s, 0, circular)
    if len(fwd) > 1:
        assert not naive_spread_ok(fwd, s + 1, 0, circular)
