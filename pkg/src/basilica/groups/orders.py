"""Closed forms for log2 of |E_n|, |B_n|, |M_n| and the level-counting formula for |B_n|."""

from ..errors import InputError

WHICH = ("e", "b", "m", "pink", "aut")


def _exact(numerator: int, denominator: int) -> int:
    q, r = divmod(numerator, denominator)
    if r:
        raise ArithmeticError(f"{numerator}/{denominator} is not an integer")
    return q


def order_formula(n: int, which: str) -> int:
    if n < 1:
        raise InputError(f"level must be positive, got {n}")
    even = n % 2 == 0
    if which == "e":
        # 2^n/3 + (2/3 | 1/3)
        return _exact((1 << n) + (2 if even else 1), 3)
    if which == "b":
        # 2^(n+1)/3 + n/2 - (2/3 | 5/6), scaled by 6
        return _exact(4 * (1 << n) + 3 * n - (4 if even else 5), 6)
    if which == "m":
        # 2^(n+1)/3 + n - (5/3 | 4/3), scaled by 3
        return _exact(2 * (1 << n) + 3 * n - (5 if even else 4), 3)
    if which == "pink":
        return (1 << n) - 1 - sum((1 << (n - 1 - m)) * (m // 2) for m in range(n))
    if which == "aut":
        return (1 << n) - 1
    raise InputError(f"unknown order formula {which!r}; choose from {WHICH}")
