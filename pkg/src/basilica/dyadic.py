"""Truncated 2-adic values Q(sigma, x) and P(sigma, x).

For a node ``x`` at level ``m``::

    Q(sigma, x) = sum_i 2**i * sum_{s_1..s_i} Par(sigma, x a s_1 a s_2 ... a s_i)
    P(sigma, x) = (-1)**Par(sigma, x) + 2*(Q(xba) + Q(xbb)) - 2*(Q(xaa) + Q(xab))

On a depth-``n`` portrait only levels ``0 .. n-1`` carry parities, and every
term coming from level ``n`` or above is divisible by ``2**j`` with
``j = (n - m + 1) // 2``.  Both values are therefore exact modulo ``2**j`` when
the sums are cut off at level ``n - 1``, which is what the array routines do.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, PrecisionError
from .tree import NodeAddress, TreeAut, depth_of_width, level_slice


@dataclass(frozen=True)
class DyadicResidue:
    value: int
    precision: int

    def __post_init__(self):
        if self.precision < 1:
            raise InputError(f"precision must be positive, got {self.precision}")
        object.__setattr__(self, "value", int(self.value) % (1 << self.precision))

    @property
    def modulus(self) -> int:
        return 1 << self.precision

    def is_unit(self) -> bool:
        return self.value & 1 == 1

    def congruent(self, other: int) -> bool:
        return (self.value - other) % self.modulus == 0

    def reduce(self, precision: int) -> "DyadicResidue":
        if precision > self.precision:
            raise PrecisionError(f"cannot raise precision {self.precision} to {precision}")
        return DyadicResidue(self.value, precision)

    def _coerce(self, other):
        if isinstance(other, DyadicResidue):
            return other.value, min(self.precision, other.precision)
        if isinstance(other, (int, np.integer)):
            return int(other), self.precision
        return None, None

    def __add__(self, other):
        v, j = self._coerce(other)
        if j is None:
            return NotImplemented
        return DyadicResidue(self.value + v, j)

    __radd__ = __add__

    def __sub__(self, other):
        v, j = self._coerce(other)
        if j is None:
            return NotImplemented
        return DyadicResidue(self.value - v, j)

    def __rsub__(self, other):
        v, j = self._coerce(other)
        if j is None:
            return NotImplemented
        return DyadicResidue(v - self.value, j)

    def __mul__(self, other):
        v, j = self._coerce(other)
        if j is None:
            return NotImplemented
        return DyadicResidue(self.value * v, j)

    __rmul__ = __mul__

    def __neg__(self):
        return DyadicResidue(-self.value, self.precision)

    def inverse(self) -> "DyadicResidue":
        if not self.is_unit():
            raise InputError(f"{self} is not a unit")
        return DyadicResidue(pow(self.value, -1, self.modulus), self.precision)

    def __int__(self):
        return self.value

    def __str__(self):
        return f"{self.value} mod 2^{self.precision}"


def precision_at(n: int, m: int) -> int:
    """Bits of Q and P known at level ``m`` of a depth-``n`` portrait."""
    return (n - m + 1) // 2


def root_precision(n: int) -> int:
    return (n + 1) // 2


# ---------------------------------------------------------------------------
# Batched, unreduced values.  Shapes follow the portrait batch (..., 2**n - 1).


def q_array(par: np.ndarray) -> np.ndarray:
    """Q at every node, summed over levels ``<= n - 1`` without reduction."""
    n = depth_of_width(par.shape[-1])
    q = np.zeros(par.shape, dtype=np.int64)
    for m in range(n - 1, -1, -1):
        sl = level_slice(m)
        val = par[..., sl].astype(np.int64)
        if m + 2 <= n - 1:
            up = q[..., level_slice(m + 2)]
            val = val + 2 * (up[..., 0::4] + up[..., 1::4])
        q[..., sl] = val
    return q


def p_array(par: np.ndarray, q: np.ndarray | None = None) -> np.ndarray:
    """P at every node without reduction; only the residue mod 2**precision_at is meaningful."""
    n = depth_of_width(par.shape[-1])
    if q is None:
        q = q_array(par)
    p = np.empty(par.shape, dtype=np.int64)
    for m in range(n):
        sl = level_slice(m)
        val = 1 - 2 * par[..., sl].astype(np.int64)
        if m + 2 <= n - 1:
            up = q[..., level_slice(m + 2)]
            val = val + 2 * (up[..., 2::4] + up[..., 3::4]) - 2 * (up[..., 0::4] + up[..., 1::4])
        p[..., sl] = val
    return p


def level_precisions(n: int) -> np.ndarray:
    """Per-flat-slot precision ``(n - m + 1) // 2``."""
    return np.concatenate([np.full(1 << m, precision_at(n, m), dtype=np.int64) for m in range(n)])


def reduce_levels(values: np.ndarray, n: int) -> np.ndarray:
    """Reduce each slot modulo its level's ``2**precision_at``."""
    mods = np.left_shift(1, level_precisions(n))
    return np.mod(values, mods)


# ---------------------------------------------------------------------------


def _q_single(sigma: TreeAut, x: NodeAddress) -> int:
    n = sigma.depth
    par = sigma.parities
    total = 0
    i = 0
    while x.level + 2 * i <= n - 1:
        # patterns a s_1 a s_2 ... a s_i, written as 2i bits with the a's forced to 0
        free = np.arange(1 << i, dtype=np.int64)
        spread = np.zeros_like(free)
        for k in range(i):
            spread |= ((free >> k) & 1) << (2 * k)
        level = x.level + 2 * i
        flat = (1 << level) - 1 + (x.index << (2 * i)) + spread
        total += (1 << i) * int(par[flat].sum())
        i += 1
    return total


def q_value(sigma: TreeAut, x: NodeAddress, j: int) -> DyadicResidue:
    n = sigma.depth
    if x.level > n:
        raise InputError(f"node {x} lies above depth {n}")
    available = precision_at(n, x.level)
    if j < 1:
        raise InputError(f"precision must be positive, got {j}")
    if j > available:
        raise PrecisionError(f"Q at level {x.level} of a depth-{n} portrait is known mod 2^{available} only")
    return DyadicResidue(_q_single(sigma, x), j)


def p_value(sigma: TreeAut, x: NodeAddress) -> DyadicResidue:
    n = sigma.depth
    if x.level > n - 1:
        raise InputError(f"P needs a node below level {n}, got {x}")
    j = precision_at(n, x.level)
    value = 1 - 2 * int(sigma.parities[x.flat])
    if x.level + 2 <= n - 1:
        for word, weight in (("aa", -2), ("ab", -2), ("ba", 2), ("bb", 2)):
            value += weight * _q_single(sigma, x.extend(word))
    return DyadicResidue(value, j)


def p_table(sigma: TreeAut) -> list[list[DyadicResidue]]:
    """P at every node, level by level, each at its own precision."""
    n = sigma.depth
    raw = p_array(sigma.parities)
    return [
        [DyadicResidue(int(v), precision_at(n, m)) for v in raw[level_slice(m)]]
        for m in range(n)
    ]
