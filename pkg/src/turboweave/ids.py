"""Correlation model between extrinsic outputs and input bits, and the
iterative-decoding-suitability (IDS) scores derived from it.

Matrices are dense ``n x n`` float64 arrays. With ``P[i, forward[i]] = 1``,
``M @ P`` is ``M[:, inverse]`` and ``M @ P.T`` is ``M[:, forward]``, so the
permutation matrix is never built.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interleaver import Permutation

MAX_N = 4096


@dataclass(frozen=True)
class CorrModel:
    """Exponentially decaying correlation ``a * exp(-c |k1 - k2|)``."""

    a: float = 0.5
    c: float = 0.2
    n: int = 0

    def __post_init__(self):
        if self.a < 0 or self.c <= 0:
            raise ValueError("need a >= 0 and c > 0")


@dataclass(frozen=True)
class IdsScores:
    ids: float
    ids1: float
    ids2: float
    ids_new: float

    def as_row(self) -> tuple[float, float, float, float]:
        return (self.ids, self.ids1, self.ids2, self.ids_new)


def corr_base(model: CorrModel) -> np.ndarray:
    n = model.n
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in [1, {MAX_N}]")
    k = np.arange(n)
    dist = np.abs(k[:, None] - k[None, :])
    out = model.a * np.exp(-model.c * dist)
    np.fill_diagonal(out, 0.0)
    return out


def _check(base: np.ndarray, p: Permutation):
    if base.ndim != 2 or base.shape != (p.n, p.n):
        raise ValueError(f"matrix shape {base.shape} does not match permutation length {p.n}")


def times_p(m: np.ndarray, p: Permutation) -> np.ndarray:
    return m[:, p.inverse]


def times_pt(m: np.ndarray, p: Permutation) -> np.ndarray:
    return m[:, p.forward]


def propagate_second(base: np.ndarray, p: Permutation, deinterleave: bool = False) -> np.ndarray:
    """``0.5 * base @ P @ (I + base)``; ``P`` becomes ``P.T`` with ``deinterleave``."""
    _check(base, p)
    left = times_pt(base, p) if deinterleave else times_p(base, p)
    return 0.5 * (left + left @ base)


def propagate_third(base: np.ndarray, p: Permutation, second: np.ndarray | None = None) -> np.ndarray:
    """Correlation after the third half-iteration: ``0.5 * r2 @ P.T @ (I + r2)``."""
    _check(base, p)
    r2 = propagate_second(base, p) if second is None else second
    left = times_pt(r2, p)
    return 0.5 * (left + left @ r2)


def propagate_third_expanded(base: np.ndarray, p: Permutation) -> np.ndarray:
    """Same matrix as :func:`propagate_third`, multiplied out term by term with an explicit ``P``."""
    _check(base, p)
    n = p.n
    P = np.zeros((n, n))
    P[np.arange(n), p.forward] = 1.0
    eye = np.eye(n)
    rP = base @ P
    left = base + rP @ base @ P.T
    right = eye + 0.5 * rP + 0.5 * rP @ base
    return 0.25 * left @ right


def v_statistic(m: np.ndarray) -> np.ndarray:
    """Per-row spread: sum of squared deviations from the row mean over ``n - 1``."""
    n = m.shape[1]
    if n < 2:
        raise ValueError("need at least two columns")
    dev = m - m.mean(axis=1, keepdims=True)
    return (dev * dev).sum(axis=1) / (n - 1)


def ids_scores(model: CorrModel, p: Permutation, ids2_pair: str = "third") -> IdsScores:
    """All four suitability scores of ``p`` under ``model`` (lower is better).

    ``ids`` spreads the interleaver and de-interleaver variants of the
    second-step correlation; ``ids1`` replaces the latter by the third-step
    matrix; ``ids2`` is the mean squared correlation of the second-step matrix
    and of the matrix chosen by ``ids2_pair`` (``"third"`` or ``"deint"``);
    ``ids_new`` averages ``ids1`` and ``ids2``.
    """
    if model.n != p.n:
        model = CorrModel(model.a, model.c, p.n)
    return ids_scores_from_base(corr_base(model), p, ids2_pair)


def ids_scores_from_base(base: np.ndarray, p: Permutation, ids2_pair: str = "third") -> IdsScores:
    if ids2_pair not in ("third", "deint"):
        raise ValueError("ids2_pair must be 'third' or 'deint'")
    n = p.n
    r2 = propagate_second(base, p)
    r2_deint = propagate_second(base, p, deinterleave=True)
    r3 = propagate_third(base, p, second=r2)
    v = v_statistic(r2)
    ids = float((v.sum() + v_statistic(r2_deint).sum()) / (2 * n))
    ids1 = float((v.sum() + v_statistic(r3).sum()) / (2 * n))
    other = r3 if ids2_pair == "third" else r2_deint
    ids2 = float(((r2 * r2).sum() + (other * other).sum()) / (2 * n * n))
    return IdsScores(ids, ids1, ids2, (ids1 + ids2) / 2)
