"""Iterated preimages of a root point under f(z) = z^2 - 1 and their labeling.

Level ``m`` of a tree holds the ``2**m`` points of ``f^{-m}(x0)``, indexed by
node address (``a`` -> 0, ``b`` -> 1, first symbol most significant), so the
children of the point at index ``k`` sit at ``2k`` and ``2k + 1`` one level up.
Changing the labeling only permutes these arrays.

Values are ``complex128`` by default.  Passing ``dps`` switches to mpmath
numbers at that many decimal digits, for trees deeper than double precision
supports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DomainError, InputError, PrecisionError
from .tree import NodeAddress

MAX_TREE_DEPTH = 20
DEFAULT_TOL = 1e-9


class DegeneracyError(PrecisionError):
    """A branch point (value within tolerance of -1) was hit while taking square roots."""


def _mp_sqrt():
    return np.frompyfunc(mpmath.sqrt, 1, 1)


def _as_array(values, dps):
    if dps is None:
        return np.asarray(values, dtype=np.complex128)
    return np.array([mpmath.mpc(v) for v in values], dtype=object)


def _parse_root(x0, dps):
    if isinstance(x0, str):
        x0 = parse_complex(x0)
    if isinstance(x0, Fraction):
        x0 = complex(x0) if dps is None else mpmath.mpc(mpmath.mpf(x0.numerator) / x0.denominator)
    if dps is None:
        z = complex(x0)
        if z in (0, -1):
            raise DomainError("the root point must not be 0 or -1")
        return z
    with mpmath.workdps(dps):
        z = mpmath.mpc(x0)
    if z == 0 or z == -1:
        raise DomainError("the root point must not be 0 or -1")
    return z


def parse_complex(text: str):
    """``"5"``, ``"-3/2"``, ``"1+2j"`` or ``"0.5-1.5i"``."""
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        if "j" not in t:
            return Fraction(t)
        return complex(t)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"cannot parse {text!r} as a number") from None


@dataclass(frozen=True)
class RootOfUnityChain:
    """``zeta(m) = exp(2 pi i / 2**m)`` so that ``zeta(m)**2 == zeta(m - 1)``."""

    m_max: int
    dps: int | None = None

    def zeta(self, m: int):
        if not 0 <= m <= self.m_max:
            raise InputError(f"root of unity of order 2^{m} outside the chain (max 2^{self.m_max})")
        if self.dps is None:
            # exact on the axes, where cmath would leave 1e-16 debris
            if m <= 2:
                return (1 + 0j, -1 + 0j, 1j)[m]
            return complex(math.cos(2 * math.pi / 2**m), math.sin(2 * math.pi / 2**m))
        with mpmath.workdps(self.dps):
            return mpmath.expjpi(mpmath.mpf(2) / 2**m)

    def residual(self, m: int) -> float:
        """``|zeta(m)**2 - zeta(m-1)|``."""
        if self.dps is None:
            return abs(self.zeta(m) ** 2 - self.zeta(m - 1))
        with mpmath.workdps(self.dps):
            return float(abs(self.zeta(m) ** 2 - self.zeta(m - 1)))


@dataclass
class PreimageTree:
    root: complex
    depth: int
    levels: list
    tol: float = DEFAULT_TOL
    dps: int | None = None
    seed: int | None = None
    swaps: list = field(default_factory=list)

    def value(self, node: NodeAddress | str):
        if isinstance(node, str):
            node = NodeAddress.parse(node)
        if node.level > self.depth:
            raise InputError(f"node {node} is above the tree (depth {self.depth})")
        return self.levels[node.level][node.index]

    def __getitem__(self, node):
        return self.value(node)

    def chain(self) -> RootOfUnityChain:
        return RootOfUnityChain((self.depth + 1) // 2 + 1, self.dps)

    def to_json(self) -> dict:
        nodes = []
        for m, values in enumerate(self.levels):
            for i, v in enumerate(values):
                v = complex(v)
                nodes.append({"address": str(NodeAddress(m, i)), "re": v.real, "im": v.imag})
        root = complex(self.root)
        return {
            "x0": [root.real, root.imag],
            "depth": self.depth,
            "nodes": nodes,
            "swaps": [list(pair) for pair in self.swaps],
        }


def build_tree(x0, n: int, seed: int | None = 0, *, tol: float = DEFAULT_TOL, dps: int | None = None) -> PreimageTree:
    """All of ``f^{-m}(x0)`` for ``m <= n``.

    The two square roots of ``y + 1`` are ordered (principal root first or
    second) by a coin flip per node drawn from ``seed``; ``seed=None`` always
    puts the principal root on the ``a`` side.
    """
    if not 0 <= n <= MAX_TREE_DEPTH:
        raise InputError(f"preimage trees go up to depth {MAX_TREE_DEPTH}, got {n}")
    if tol < 0:
        raise InputError("tolerance must be non-negative")
    root = _parse_root(x0, dps)
    rng = np.random.default_rng(seed) if seed is not None else None
    levels = [_as_array([root], dps)]
    ctx = mpmath.workdps(dps) if dps is not None else _null()
    with ctx:
        sqrt = _mp_sqrt() if dps is not None else np.sqrt
        for m in range(n):
            shifted = levels[-1] + 1
            if np.any(np.abs(shifted).astype(float) <= tol):
                k = int(np.argmin(np.abs(shifted).astype(float)))
                raise DegeneracyError(f"node {NodeAddress(m, k)} is within {tol} of -1")
            r = sqrt(shifted)
            flip = rng.integers(0, 2, r.shape[0]).astype(bool) if rng is not None else np.zeros(r.shape[0], bool)
            children = np.empty(2 * r.shape[0], dtype=r.dtype)
            children[0::2] = np.where(flip, -r, r)
            children[1::2] = -children[0::2]
            levels.append(children)
    return PreimageTree(root, n, levels, tol, dps, seed)


class _null:
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def _work(tree):
    return mpmath.workdps(tree.dps) if tree.dps is not None else _null()


# ---------------------------------------------------------------------------
# Product patterns


def pattern_offsets(i: int, first: int) -> np.ndarray:
    """Offsets of the words ``t s1 a s2 a ... s_i a`` above a node, ``t`` = a (0) or b (1).

    The word has ``2i + 1`` symbols; symbol 1 is ``t``, the even positions are
    free and the remaining odd positions are ``a``.
    """
    length = 2 * i + 1
    free = [length - 2 * k for k in range(1, i + 1)]  # bit weights of s_k
    out = np.zeros(1 << i, dtype=np.int64) + (first << (length - 1))
    for bit, weight in enumerate(free):
        out += ((np.arange(1 << i) >> (i - 1 - bit)) & 1) << weight
    return out


def _products(levels, ell: int, i: int, first: int):
    n = ell + 2 * i + 1
    base = np.arange(1 << ell, dtype=np.int64) << (2 * i + 1)
    idx = base[:, None] + pattern_offsets(i, first)[None, :]
    return np.prod(levels[n][idx], axis=1)


def zeta_ratio(tree: PreimageTree, ell: int, i: int):
    """The labeled product ratio at every node of level ``ell`` for index ``i``."""
    if ell < 0 or i < 0 or ell + 2 * i + 1 > tree.depth:
        raise InputError(f"need level + 2i + 1 <= {tree.depth}, got level {ell}, i = {i}")
    with _work(tree):
        return _products(tree.levels, ell, i, 0) / _products(tree.levels, ell, i, 1)


def _swap_children(levels, parents_level: int, flags: np.ndarray):
    """Swap the two child subtrees of every flagged node at ``parents_level``."""
    for L in range(parents_level + 1, len(levels)):
        shift = L - parents_level - 1
        k = np.arange(levels[L].shape[0], dtype=np.int64)
        flip = flags[k >> (shift + 1)].astype(np.int64)
        levels[L] = levels[L][k ^ (flip << shift)]


def canonical_label(tree: PreimageTree, chain: RootOfUnityChain | None = None) -> PreimageTree:
    """Relabel so that every ratio from :func:`zeta_ratio` equals its root of unity.

    Level by level: once level ``n`` is in place, for each node ``y`` at a level
    ``ell`` of the parity of ``n - 1`` (lowest first) the ratio with
    ``i = (n - ell - 1) / 2`` is ``+-zeta``; a minus sign is repaired by swapping
    the two children of ``y b a^(2i-1)``.  Swaps only touch nodes starting with
    ``y b``, which never enter the ratios of lower nodes.
    """
    chain = chain or tree.chain()
    levels = [lv.copy() for lv in tree.levels]
    swaps = []
    with _work(tree):
        for n in range(3, tree.depth + 1):
            for ell in range((n - 1) % 2, n - 2, 2):
                i = (n - ell - 1) // 2
                z = chain.zeta(i + 1)
                ratio = _products(levels, ell, i, 0) / _products(levels, ell, i, 1)
                near = np.abs(ratio - z).astype(float)
                far = np.abs(ratio + z).astype(float)
                if np.any(np.abs(near - far) <= 10 * tree.tol):
                    k = int(np.argmin(np.abs(near - far)))
                    raise PrecisionError(
                        f"cannot tell zeta from -zeta at node {NodeAddress(ell, k)}, i = {i}"
                    )
                flags = far < near
                if not flags.any():
                    continue
                # parent of the swapped pair: y b a^(2i-1), at level n - 1
                parents = (np.arange(1 << ell, dtype=np.int64) << (2 * i)) | (1 << (2 * i - 1))
                parent_flags = np.zeros(1 << (n - 1), dtype=bool)
                parent_flags[parents[flags]] = True
                _swap_children(levels, n - 1, parent_flags)
                for p in parents[flags]:
                    node = NodeAddress(n - 1, int(p))
                    swaps.append((str(node.child("a")), str(node.child("b"))))
    return replace(tree, levels=levels, swaps=swaps)


# ---------------------------------------------------------------------------
# Residuals


def verify_zetaprod(tree: PreimageTree, y: NodeAddress | str, i: int, chain: RootOfUnityChain | None = None) -> float:
    """``|ratio - zeta_{2^(i+1)}|`` at node ``y``."""
    if isinstance(y, str):
        y = NodeAddress.parse(y)
    if i < 0 or y.level + 2 * i + 1 > tree.depth:
        raise InputError(f"index i = {i} out of range at {y} in a depth-{tree.depth} tree")
    chain = chain or tree.chain()
    with _work(tree):
        off0 = (y.index << (2 * i + 1)) + pattern_offsets(i, 0)
        off1 = (y.index << (2 * i + 1)) + pattern_offsets(i, 1)
        level = tree.levels[y.level + 2 * i + 1]
        ratio = np.prod(level[off0]) / np.prod(level[off1])
        return float(abs(ratio - chain.zeta(i + 1)))


def max_zetaprod_residual(tree: PreimageTree, chain: RootOfUnityChain | None = None) -> float:
    """Largest residual over every node and every admissible ``i``."""
    chain = chain or tree.chain()
    worst = 0.0
    with _work(tree):
        for ell in range(tree.depth):
            for i in range((tree.depth - ell - 1) // 2 + 1):
                ratio = zeta_ratio(tree, ell, i)
                worst = max(worst, float(np.max(np.abs(ratio - chain.zeta(i + 1)).astype(float))))
    return worst


def twodown_residuals(tree: PreimageTree) -> np.ndarray:
    """``|(g1 g2)^2 + y|`` at every node with two levels above it.

    ``g1`` and ``g2`` are grandchildren of ``y`` through different children;
    the other sign choices give the same square.
    """
    out = []
    with _work(tree):
        for ell in range(tree.depth - 1):
            up = tree.levels[ell + 2]
            k = np.arange(1 << ell, dtype=np.int64) << 2
            g1, g2 = up[k], up[k + 2]
            out.append(np.abs((g1 * g2) ** 2 + tree.levels[ell]).astype(float))
    return np.concatenate(out) if out else np.zeros(0)


# ---------------------------------------------------------------------------


def nrel_selection_size(m: int) -> int:
    """Number of grandchild choices in a selection of depth ``m`` (both sides)."""
    return 2 * sum(1 << k for k in range(1, m + 1))


def _selection_bits(selection, m: int) -> list[int]:
    size = nrel_selection_size(m)
    if selection is None:
        return [0] * size
    if isinstance(selection, (int, np.integer)) and not isinstance(selection, bool):
        return np.random.default_rng(int(selection)).integers(0, 2, size).tolist()
    bits = list(selection)
    if len(bits) != size or any(b not in (0, 1) for b in bits):
        raise InputError(f"a selection for m = {m} is {size} bits in {{0, 1}}")
    return [int(b) for b in bits]


def verify_nrel(tree: PreimageTree, y: NodeAddress | str, m: int, selection=None) -> dict:
    """Products of selected points over ``y`` and the three identities they satisfy.

    ``alpha_{0,1} = [ya]``, ``beta_{0,1} = [yb]``; each point at stage ``k``
    contributes two points two levels up, one over each of its children, and
    the selection decides which grandchild (``a`` on 0, ``b`` on 1).  ``None``
    always takes ``a``, an integer seeds a random choice, and a sequence gives
    the bits explicitly (all alpha choices stage by stage, then all beta).
    """
    if isinstance(y, str):
        y = NodeAddress.parse(y)
    if m < 0 or y.level + 2 * m + 1 > tree.depth:
        raise InputError(f"m = {m} needs {y.level + 2 * m + 1} levels, the tree has {tree.depth}")
    bits = iter(_selection_bits(selection, m))

    def stages(first: int):
        pts = [(y.index << 1) | first]
        out = [pts]
        for k in range(1, m + 1):
            nxt = []
            for p in pts:
                for child in (0, 1):
                    nxt.append((((p << 1) | child) << 1) | next(bits))
            pts = nxt
            out.append(pts)
        return out

    a_idx, b_idx = stages(0), stages(1)
    report = {"node": str(y), "m": m}
    with _work(tree):
        prods = []
        for k in range(m + 1):
            level = tree.levels[y.level + 2 * k + 1]
            prods.append((np.prod(level[a_idx[k]]), np.prod(level[b_idx[k]])))
        alpha0, beta0 = prods[0]
        gamma, delta = prods[m]
        ratio = gamma / delta
        report["gamma_power"] = float(abs((-gamma) ** (2**m) - beta0))
        report["delta_power"] = float(abs((-delta) ** (2**m) - alpha0))
        report["ratio_order"] = float(abs(ratio ** (2**m) + 1))
        # each stage squares onto the previous one, up to sign at the first step
        steps = []
        for k in range(1, m + 1):
            sign = -1 if k == 1 else 1
            g, d = prods[k]
            g0, d0 = prods[k - 1]
            steps.append(max(float(abs(g**2 - sign * g0)), float(abs(d**2 - sign * d0))))
        report["steps"] = steps
    report["max_residual"] = max([report["gamma_power"], report["delta_power"], report["ratio_order"], *steps])
    return report
