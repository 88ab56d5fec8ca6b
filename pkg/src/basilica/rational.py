"""Square classes of rationals and the independence test for {-x0, 1+x0, -1, 2}.

The degree of Q(sqrt(-x0), sqrt(1+x0), zeta_8) over Q is 16 exactly when these
four classes are independent in Q^x / (Q^x)^2, because Q(zeta_8) = Q(i, sqrt 2).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import isqrt, prod

from sympy import factorint

from .errors import DomainError, InputError, ResourceError

# largest numerator or denominator we factor; sympy settles these quickly and exactly
FACTOR_BOUND = 1 << 64


def to_rational(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        raise InputError("pass rationals as int, Fraction or 'p/q' text, not float")
    try:
        return Fraction(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise InputError(f"not a rational number: {value!r}") from None


def _factor(n: int) -> dict[int, int]:
    if n >= FACTOR_BOUND:
        raise ResourceError(f"{n} exceeds the factoring bound 2^64")
    return factorint(n)


def prime_exponents(q) -> dict[int, int]:
    """Exponents of ``q`` mod 2, keyed by prime, with ``-1`` for the sign."""
    q = to_rational(q)
    if q == 0:
        raise DomainError("zero has no square class")
    odd = {}
    if q < 0:
        odd[-1] = 1
    for part in (abs(q.numerator), q.denominator):
        for p, e in _factor(part).items():
            if e % 2:
                odd[p] = odd.get(p, 0) ^ 1
    return {p: 1 for p, e in odd.items() if e}


@dataclass(frozen=True)
class SquareClass:
    squarefree: int

    def __post_init__(self):
        if self.squarefree == 0:
            raise DomainError("zero has no square class")

    @classmethod
    def of(cls, q) -> "SquareClass":
        return cls(prod(prime_exponents(q)))

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        return SquareClass.of(self.squarefree * other.squarefree)

    @property
    def is_trivial(self) -> bool:
        return self.squarefree == 1

    def __int__(self):
        return self.squarefree


def square_class(q) -> SquareClass:
    return SquareClass.of(q)


def is_rational_square(q) -> bool:
    q = to_rational(q)
    if q < 0:
        return False
    return isqrt(q.numerator) ** 2 == q.numerator and isqrt(q.denominator) ** 2 == q.denominator


def kummer_generators(x0) -> list[Fraction]:
    x0 = to_rational(x0)
    if x0 in (0, -1):
        raise DomainError("the root point must not be 0 or -1")
    return [-x0, 1 + x0, Fraction(-1), Fraction(2)]


def square_subsets(x0) -> list[tuple[int, ...]]:
    """Nonempty index subsets of the four generators whose product is a rational square."""
    gens = kummer_generators(x0)
    hits = []
    for r in range(1, 5):
        for subset in combinations(range(4), r):
            if is_rational_square(prod(gens[k] for k in subset)):
                hits.append(subset)
    return hits


def gf2_rank(vectors: list[int]) -> int:
    basis = []
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
    return len(basis)


def class_rank(x0) -> int:
    """Rank over GF(2) of the odd-exponent vectors of the four generators."""
    exps = [prime_exponents(g) for g in kummer_generators(x0)]
    primes = sorted({p for e in exps for p in e})
    position = {p: k for k, p in enumerate(primes)}
    return gf2_rank([sum(1 << position[p] for p in e) for e in exps])


def degree_condition(x0) -> bool:
    """True iff [Q(sqrt(-x0), sqrt(1+x0), zeta_8) : Q] = 16."""
    return not square_subsets(x0)


def field_degree(x0) -> int:
    return 1 << class_rank(x0)


def scan(values) -> list[Fraction]:
    """The qualifying root points among ``values``; 0 and -1 are skipped."""
    out = []
    for v in values:
        q = to_rational(v)
        if q not in (0, -1) and degree_condition(q):
            out.append(q)
    return sorted(out)


def scan_range(lo: int, hi: int) -> list[int]:
    """Qualifying integers in ``lo..hi`` inclusive."""
    if hi < lo:
        raise InputError(f"empty range {lo}..{hi}")
    return [int(q) for q in scan(range(lo, hi + 1))]


def parse_range(text: str) -> tuple[int, int]:
    """``"lo..hi"`` with optional signs."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        return int(lo), int(hi)
    except ValueError:
        raise InputError(f"expected a range like 1..23, got {text!r}") from None
