"""Polynomials over GF(2) and their low-weight multiples of a primitive polynomial.

Polynomials are stored sparsely as a sorted tuple of exponents. Interleaver
work deals with polynomials of weight at most a handful but degree up to the
block length, so a dense representation would waste most of its bits.

The low-weight machinery rests on one fact: if ``p`` is primitive of degree
``m`` and ``n = 2**m - 1``, a root of ``p`` has order exactly ``n``. Exponents
may therefore be read modulo ``n``; pairs of congruent exponents cancel, and
what is left must be a codeword of the cyclic Hamming code generated by ``p``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator


@dataclass(frozen=True, order=True)
class Gf2Poly:
    """Polynomial over GF(2) as an ascending tuple of distinct exponents."""

    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        exps = tuple(sorted(set(int(e) for e in self.exponents)))
        if len(exps) != len(self.exponents):
            raise ValueError(f"duplicate exponents in {self.exponents!r}")
        if exps and exps[0] < 0:
            raise ValueError("exponents must be non-negative")
        object.__setattr__(self, "exponents", exps)

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> "Gf2Poly":
        """Build from an iterable of exponents; repeated exponents cancel in pairs."""
        acc: set[int] = set()
        for e in exps:
            acc ^= {int(e)}
        return cls(tuple(acc))

    @classmethod
    def from_int(cls, value: int) -> "Gf2Poly":
        """Bit ``k`` of ``value`` is the coefficient of ``X**k``."""
        if value < 0:
            raise ValueError("negative bit mask")
        return cls(tuple(k for k in range(value.bit_length()) if value >> k & 1))

    @classmethod
    def from_octal(cls, text: str, width: int | None = None) -> "Gf2Poly":
        """Parse generator taps in octal, read MSB first as ``g0, g1, ..., gm``.

        ``"15"`` is binary ``1101`` and gives ``1 + X + X^3``. ``width`` pads the
        binary string on the left to ``m + 1`` digits when the leading taps are 0.
        """
        value = int(text, 8)
        bits = format(value, "b")
        if width is not None:
            if len(bits) > width:
                raise ValueError(f"octal {text} needs more than {width} taps")
            bits = bits.rjust(width, "0")
        return cls(tuple(k for k, b in enumerate(bits) if b == "1"))

    @classmethod
    def parse(cls, text: str) -> "Gf2Poly":
        """Parse ``"x^32+x^16+x^8"``, ``"1+X+X^3"`` or ``"0"``."""
        text = text.replace(" ", "").lower()
        if text in ("", "0"):
            return cls()
        exps = []
        for term in text.split("+"):
            if term == "1":
                exps.append(0)
            elif term == "x":
                exps.append(1)
            else:
                match = re.fullmatch(r"x\^(\d+)", term)
                if match is None:
                    raise ValueError(f"cannot parse term {term!r}")
                exps.append(int(match.group(1)))
        return cls.from_exponents(exps)

    def to_int(self) -> int:
        value = 0
        for e in self.exponents:
            value |= 1 << e
        return value

    def to_octal(self, width: int | None = None) -> str:
        """Inverse of :meth:`from_octal`."""
        if not self.exponents:
            return "0"
        width = max(width or 0, self.degree + 1)
        bits = "".join("1" if k in self.exponents else "0" for k in range(width))
        return format(int(bits, 2), "o")

    @property
    def weight(self) -> int:
        return len(self.exponents)

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return self.exponents[-1] if self.exponents else -1

    def is_zero(self) -> bool:
        return not self.exponents

    def shift(self, k: int) -> "Gf2Poly":
        """Multiply by ``X**k``."""
        return Gf2Poly(tuple(e + k for e in self.exponents))

    def __add__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly(tuple(set(self.exponents) ^ set(other.exponents)))

    __sub__ = __add__

    def __mul__(self, other: "Gf2Poly") -> "Gf2Poly":
        return Gf2Poly.from_exponents(a + b for a in self.exponents for b in other.exponents)

    def __len__(self) -> int:
        return len(self.exponents)

    def __iter__(self) -> Iterator[int]:
        return iter(self.exponents)

    def __str__(self) -> str:
        if not self.exponents:
            return "0"
        terms = []
        for e in reversed(self.exponents):
            terms.append("1" if e == 0 else "x" if e == 1 else f"x^{e}")
        return "+".join(terms)


def _int_mulmod(a: int, b: int, p: int, deg_p: int) -> int:
    """Product of two reduced residues modulo ``p`` (all as bit masks)."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        b >>= 1
        a <<= 1
        if a >> deg_p & 1:
            a ^= p
    return result


def _int_mod(a: int, p: int) -> int:
    deg_p = p.bit_length() - 1
    while a and a.bit_length() - 1 >= deg_p:
        a ^= p << (a.bit_length() - 1 - deg_p)
    return a


@lru_cache(maxsize=1 << 16)
def _xpow_mod(e: int, p: int) -> int:
    """``X**e mod p`` as a bit mask, by square-and-multiply."""
    deg_p = p.bit_length() - 1
    if deg_p == 0:
        return 0
    result = 1
    base = _int_mod(2, p)
    while e:
        if e & 1:
            result = _int_mulmod(result, base, p, deg_p)
        base = _int_mulmod(base, base, p, deg_p)
        e >>= 1
    return result


def poly_mod(f: Gf2Poly, p: Gf2Poly) -> Gf2Poly:
    """Remainder of ``f`` divided by ``p``.

    Reduces term by term, so cost depends on the weight of ``f`` and only
    logarithmically on its degree.
    """
    if p.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    p_int = p.to_int()
    if f.degree < 256:
        return Gf2Poly.from_int(_int_mod(f.to_int(), p_int))
    rem = 0
    for e in f.exponents:
        rem ^= _xpow_mod(e, p_int)
    return Gf2Poly.from_int(rem)


def _prime_factors(n: int) -> list[int]:
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors


def _int_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _int_mod(a, b)
    return a


def is_irreducible(p: Gf2Poly) -> bool:
    """Rabin's test: ``X^(2^m) = X mod p`` and no proper sub-field share."""
    m = p.degree
    if m < 1:
        return False
    if m == 1:
        return True
    if 0 not in p.exponents:
        return False
    p_int = p.to_int()
    if _xpow_mod(1 << m, p_int) != _int_mod(2, p_int):
        return False
    for q in _prime_factors(m):
        h = _xpow_mod(1 << (m // q), p_int) ^ _int_mod(2, p_int)
        if _int_gcd(p_int, h) != 1:
            return False
    return True


def multiplicative_order(p: Gf2Poly) -> int | None:
    """Order of ``X`` in the unit group modulo ``p``; None if ``X`` is not a unit."""
    m = p.degree
    if m < 1 or 0 not in p.exponents:
        return None
    p_int = p.to_int()
    x = 1
    for k in range(1, 1 << m):
        x = _int_mulmod(x, 2, p_int, m) if m > 1 else _int_mod(x << 1, p_int)
        if x == 1:
            return k
    return None


def is_primitive(p: Gf2Poly) -> bool:
    """True iff ``p`` is irreducible and ``X`` has order ``2**m - 1`` modulo ``p``."""
    m = p.degree
    if m < 1 or not is_irreducible(p):
        return False
    n = (1 << m) - 1
    p_int = p.to_int()
    if _xpow_mod(n, p_int) != 1:
        return False
    return all(_xpow_mod(n // q, p_int) != 1 for q in _prime_factors(n))


@dataclass(frozen=True)
class HammingWeightClasses:
    """Codewords of the cyclic Hamming code generated by a primitive ``p``.

    ``classes[w]`` holds the weight-``w`` codewords as frozensets of exponents
    in ``[0, n)``. ``alpha_pow[e]`` is ``X**e mod p`` as a bit mask; it backs
    membership tests for weights beyond ``w_max``.
    """

    p: Gf2Poly
    n: int
    w_max: int
    classes: dict[int, frozenset[frozenset[int]]]
    alpha_pow: tuple[int, ...]

    @property
    def m(self) -> int:
        return self.p.degree

    def sizes(self) -> dict[int, int]:
        return {w: len(c) for w, c in self.classes.items()}

    def is_codeword(self, residues: frozenset[int]) -> bool:
        """Whether the residue set (exponents mod ``n``) is a Hamming codeword."""
        j = len(residues)
        if j <= self.w_max:
            return residues in self.classes[j]
        acc = 0
        for r in residues:
            acc ^= self.alpha_pow[r]
        return acc == 0


def hamming_weight_classes(p: Gf2Poly, w_max: int | None = None) -> HammingWeightClasses:
    """Group the Hamming codewords generated by ``p`` by weight, up to ``w_max``.

    Weight-``w`` words are found by fixing ``w - 1`` exponents and solving for
    the last one through the discrete log table of the root of ``p``.
    """
    if not is_primitive(p):
        raise ValueError(f"{p} is not primitive")
    m = p.degree
    n = (1 << m) - 1
    if w_max is None:
        w_max = n
    if not 0 <= w_max <= n:
        raise ValueError(f"w_max must lie in [0, {n}]")
    p_int = p.to_int()
    alpha_pow = [1]
    for _ in range(n - 1):
        alpha_pow.append(_int_mulmod(alpha_pow[-1], 2, p_int, m) if m > 1 else 1)
    log = {v: e for e, v in enumerate(alpha_pow)}

    classes: dict[int, frozenset[frozenset[int]]] = {0: frozenset({frozenset()})}
    for w in range(1, w_max + 1):
        words = set()
        for head in itertools.combinations(range(n), w - 1):
            acc = 0
            for e in head:
                acc ^= alpha_pow[e]
            last = log.get(acc)
            if last is not None and (not head or last > head[-1]):
                words.add(frozenset(head + (last,)))
        classes[w] = frozenset(words)
    return HammingWeightClasses(p, n, w_max, classes, tuple(alpha_pow))


def split_congruent_pairs(f: Gf2Poly, n: int) -> tuple[Gf2Poly, Gf2Poly]:
    """Split ``f = g + h`` with ``g`` a sum of congruent exponent pairs.

    Pairs are formed greedily from the highest exponent downwards, each
    exponent taking the next lower unmatched exponent of the same residue.
    ``h`` keeps the leftovers, which are pairwise incongruent mod ``n``.
    """
    pending: dict[int, int] = {}
    g: list[int] = []
    for e in reversed(f.exponents):
        r = e % n
        if r in pending:
            g.extend((pending.pop(r), e))
        else:
            pending[r] = e
    return Gf2Poly(tuple(g)), Gf2Poly(tuple(pending.values()))


def divisible_by_primitive(f: Gf2Poly, classes: HammingWeightClasses) -> bool:
    """Divisibility of ``f`` by the primitive polynomial behind ``classes``.

    Cancels congruent exponent pairs, then checks that the reduced leftover
    is a Hamming codeword of its weight. No polynomial division happens here.
    """
    _, h = split_congruent_pairs(f, classes.n)
    return classes.is_codeword(frozenset(e % classes.n for e in h.exponents))


def enumerate_divisible(
    classes: HammingWeightClasses, N: int, w_max: int
) -> Iterator[Gf2Poly]:
    """Yield every multiple of ``p`` with degree < ``N`` and weight 1..``w_max``.

    Built from residue counts rather than a scan: a multiple has an odd number
    of exponents in exactly the residues of some codeword and an even number
    elsewhere. Each count vector is realised by choosing concrete exponents
    within every residue class. Output is sorted by (weight, exponents).
    """
    n = classes.n
    by_residue = [list(range(r, N, n)) for r in range(n)]
    for w in range(1, w_max + 1):
        found: list[tuple[int, ...]] = []
        for j in range(w % 2, w + 1, 2):
            if j > classes.w_max:
                words = _codewords_beyond(classes, j)
            else:
                words = classes.classes[j]
            for word in sorted(words, key=sorted):
                n_pairs = (w - j) // 2
                for extra in itertools.combinations_with_replacement(range(n), n_pairs):
                    counts = dict.fromkeys(word, 1)
                    for r in extra:
                        counts[r] = counts.get(r, 0) + 2
                    if any(c > len(by_residue[r]) for r, c in counts.items()):
                        continue
                    choices = [itertools.combinations(by_residue[r], c) for r, c in counts.items()]
                    for parts in itertools.product(*choices):
                        found.append(tuple(sorted(itertools.chain.from_iterable(parts))))
        found.sort()
        for exps in found:
            yield Gf2Poly(exps)


def _codewords_beyond(classes: HammingWeightClasses, j: int) -> frozenset[frozenset[int]]:
    return hamming_weight_classes(classes.p, j).classes[j]
