"""Compiled trellis kernels: encoding and exact log-MAP decoding.

LLRs are ``log P(bit = 0) / P(bit = 1)``; the BPSK map is ``0 -> +1``.
"""

import math

import numpy as np
from numba import njit

NEG_INF = -np.inf


@njit(cache=True)
def encode(nxt, par, bits, state):
    out = np.empty(bits.size, dtype=np.int8)
    for t in range(bits.size):
        u = bits[t]
        out[t] = par[state, u]
        state = nxt[state, u]
    return out, state


@njit(cache=True)
def terminate(nxt, par, tail_input, state, m):
    tail = np.empty(m, dtype=np.int8)
    out = np.empty(m, dtype=np.int8)
    for t in range(m):
        u = tail_input[state]
        tail[t] = u
        out[t] = par[state, u]
        state = nxt[state, u]
    return tail, out, state


@njit(cache=True, inline="always")
def maxstar(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@njit(cache=True)
def log_map(nxt, par, sys_llr, par_llr, apriori, terminated):
    """Forward/backward log-MAP over ``K = sys_llr.size`` trellis steps.

    Returns ``(extrinsic, posterior)``. The extrinsic term at step ``k`` is
    built from the parity metric alone, so it never sees ``sys_llr[k]`` or
    ``apriori[k]``; the posterior adds them back.
    """
    K = sys_llr.size
    S = nxt.shape[0]
    alpha = np.full((K + 1, S), NEG_INF)
    beta = np.full((K + 1, S), NEG_INF)
    alpha[0, 0] = 0.0
    for k in range(K):
        hu = 0.5 * (sys_llr[k] + apriori[k])
        hp = 0.5 * par_llr[k]
        for s in range(S):
            a = alpha[k, s]
            if a == NEG_INF:
                continue
            for u in range(2):
                g = (hu if u == 0 else -hu) + (hp if par[s, u] == 0 else -hp)
                ns = nxt[s, u]
                alpha[k + 1, ns] = maxstar(alpha[k + 1, ns], a + g)
        norm = alpha[k + 1, 0]
        for s in range(1, S):
            if alpha[k + 1, s] > norm:
                norm = alpha[k + 1, s]
        for s in range(S):
            alpha[k + 1, s] -= norm
    if terminated:
        beta[K, 0] = 0.0
    else:
        for s in range(S):
            beta[K, s] = 0.0
    ext = np.empty(K)
    post = np.empty(K)
    for k in range(K - 1, -1, -1):
        hu = 0.5 * (sys_llr[k] + apriori[k])
        hp = 0.5 * par_llr[k]
        num0 = NEG_INF
        num1 = NEG_INF
        for s in range(S):
            acc = NEG_INF
            for u in range(2):
                ns = nxt[s, u]
                b = beta[k + 1, ns]
                if b == NEG_INF:
                    continue
                gp = hp if par[s, u] == 0 else -hp
                g = (hu if u == 0 else -hu) + gp
                acc = maxstar(acc, g + b)
                a = alpha[k, s]
                if a != NEG_INF:
                    if u == 0:
                        num0 = maxstar(num0, a + gp + b)
                    else:
                        num1 = maxstar(num1, a + gp + b)
            beta[k, s] = acc
        norm = beta[k, 0]
        for s in range(1, S):
            if beta[k, s] > norm:
                norm = beta[k, s]
        for s in range(S):
            beta[k, s] -= norm
        e = num0 - num1
        ext[k] = e
        post[k] = sys_llr[k] + apriori[k] + e
    return ext, post


# Early stop needs this many consecutive iterations in which the hard
# decisions neither change nor disagree between the two decoders. A single
# repeat stops too often on transient fixed points at high SNR.
STOP_PATIENCE = 4


@njit(cache=True)
def turbo_decode(nxt, par, fwd, sys_llr, par1_llr, par2_llr, apriori1, iterations, early_stop):
    """Iterative decoding; returns ``(hard, llr, w1, w2, iterations_run)``.

    ``w1`` and ``w2`` are the last extrinsic outputs of each decoder in
    natural order.

    ``sys_llr`` and ``par1_llr`` cover ``N + m`` steps (decoder 1 is
    terminated), ``par2_llr`` covers ``N`` (decoder 2 is not).
    """
    N = fwd.size
    K1 = sys_llr.size
    apr1 = apriori1.copy()
    sys2 = np.empty(N)
    apr2 = np.empty(N)
    for i in range(N):
        sys2[fwd[i]] = sys_llr[i]
    llr = np.zeros(N)
    w1 = np.zeros(N)
    hard = np.zeros(N, dtype=np.int8)
    prev = np.full(N, -1, dtype=np.int8)
    done = 0
    stable = 0
    for it in range(iterations):
        ext1, post1 = log_map(nxt, par, sys_llr, par1_llr, apr1, True)
        for i in range(N):
            apr2[fwd[i]] = ext1[i]
            w1[i] = ext1[i]
        ext2, post2 = log_map(nxt, par, sys2, par2_llr, apr2, False)
        same = True
        for i in range(N):
            apr1[i] = ext2[fwd[i]]
            llr[i] = post2[fwd[i]]
            b = 1 if llr[i] < 0 else 0
            hard[i] = b
            if b != prev[i] or (post1[i] < 0) != (b == 1):
                same = False
            prev[i] = b
        for k in range(N, K1):
            apr1[k] = 0.0
        done = it + 1
        stable = stable + 1 if same else 0
        if early_stop and stable >= STOP_PATIENCE:
            break
    return hard, llr, w1, apr1[:N].copy(), done


@njit(cache=True)
def frame_errors(nxt, par, tail_input, fwd, m, data, noise, keep1, keep2, scale, iterations, early_stop):
    """Encode one frame, add the given noise and decode it; returns bit errors.

    ``noise`` holds one sample per transmitted bit in the order systematic,
    tail, kept parity1, kept parity2. ``scale`` is ``2 / sigma**2``.
    """
    N = data.size
    p1, st = encode(nxt, par, data, 0)
    tail, tp, st = terminate(nxt, par, tail_input, st, m)
    v = np.empty(N, dtype=np.int8)
    for i in range(N):
        v[fwd[i]] = data[i]
    p2, _ = encode(nxt, par, v, 0)
    sys_llr = np.empty(N + m)
    par1 = np.zeros(N + m)
    par2 = np.zeros(N)
    pos = 0
    for i in range(N):
        sys_llr[i] = scale * ((1.0 - 2.0 * data[i]) + noise[pos])
        pos += 1
    for t in range(m):
        sys_llr[N + t] = scale * ((1.0 - 2.0 * tail[t]) + noise[pos])
        pos += 1
    for i in range(N + m):
        bit = p1[i] if i < N else tp[i - N]
        if keep1[i]:
            par1[i] = scale * ((1.0 - 2.0 * bit) + noise[pos])
            pos += 1
    for i in range(N):
        if keep2[i]:
            par2[i] = scale * ((1.0 - 2.0 * p2[i]) + noise[pos])
            pos += 1
    hard, _, _, _, _ = turbo_decode(nxt, par, fwd, sys_llr, par1, par2, np.zeros(N + m), iterations, early_stop)
    errs = 0
    for i in range(N):
        if hard[i] != data[i]:
            errs += 1
    return errs
