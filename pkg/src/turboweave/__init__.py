"""Interleaver design and evaluation tools for parallel-concatenated turbo codes."""

from .interleaver import (
    ConvergenceError,
    Permutation,
    deterministic,
    random_interleaver,
    s_random,
    verify_spread,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "Permutation",
    "deterministic",
    "random_interleaver",
    "s_random",
    "verify_spread",
]
