"""Named automorphisms: the basilica pair alpha, beta and the arithmetic extras."""

from __future__ import annotations

import numpy as np

from ..errors import InputError
from ..tree import TreeAut, compose, pair, restrict

NAMES = ("identity", "alpha", "beta", "epsilon", "theta", "lambda")


def identity(n: int) -> TreeAut:
    return TreeAut(np.zeros((1 << n) - 1, dtype=np.uint8))


def _all_b(n: int, even: bool) -> TreeAut:
    levels = []
    for m in range(n):
        lv = np.zeros(1 << m, dtype=np.uint8)
        if (m % 2 == 0) == even:
            lv[-1] = 1
        levels.append(lv)
    return TreeAut.from_levels(levels)


def alpha(n: int) -> TreeAut:
    """Parity 1 exactly on all-b words of even length, the root included."""
    return _all_b(n, even=True)


def beta(n: int) -> TreeAut:
    """Parity 1 exactly on all-b words of odd length."""
    return _all_b(n, even=False)


def epsilon(n: int) -> TreeAut:
    return TreeAut(np.ones((1 << n) - 1, dtype=np.uint8))


def theta(n: int) -> TreeAut:
    """Trivial on the first two levels, then two levels at a time:
    Par(xaa) = Par(xab) = 0, Par(xba) = 1, Par(xbb) = Par(x).
    """
    levels = [np.zeros(1 << m, dtype=np.uint8) for m in range(min(n, 2))]
    for m in range(2, n):
        lv = np.zeros(1 << m, dtype=np.uint8)
        lv[2::4] = 1
        lv[3::4] = levels[m - 2]
        levels.append(lv)
    return TreeAut.from_levels(levels)


def power(sigma: TreeAut, k: int) -> TreeAut:
    if k < 0:
        raise InputError("negative powers are not supported")
    result = identity(sigma.depth)
    base = sigma
    while k:
        if k & 1:
            result = compose(result, base)
        base = compose(base, base)
        k >>= 1
    return result


def lam(n: int) -> TreeAut:
    """``(e, beta**(2**(j-2)))`` on the two level-1 subtrees, ``n = 2j - 1``."""
    if n < 3 or n % 2 == 0:
        raise InputError(f"lambda needs an odd depth >= 3, got {n}")
    j = (n + 1) // 2
    b = beta(n - 1)
    for _ in range(j - 2):
        b = compose(b, b)
    return pair(identity(n - 1), b)


_BUILDERS = {
    "identity": identity,
    "alpha": alpha,
    "beta": beta,
    "epsilon": epsilon,
    "theta": theta,
    "lambda": lam,
}


def generator(name: str, n: int) -> TreeAut:
    try:
        build = _BUILDERS[name.lower()]
    except KeyError:
        raise InputError(f"unknown generator {name!r}; choose from {', '.join(NAMES)}") from None
    if n < 1:
        raise InputError(f"depth must be positive, got {n}")
    return build(n)


def restricted(name: str, n: int, m: int) -> TreeAut:
    return restrict(generator(name, n), m)
