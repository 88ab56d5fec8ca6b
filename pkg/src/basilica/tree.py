"""Nodes and finite-level automorphisms of the binary rooted tree.

A node at level ``m`` is a word ``s_1 s_2 ... s_m`` over ``{a, b}``.  Its packed
index reads the word as a binary number with ``a -> 0``, ``b -> 1`` and ``s_1``
most significant, so within a level the indices run left to right.

An automorphism of the depth-``n`` tree is its parity portrait: one bit per node
at levels ``0 .. n-1`` saying whether the two children get swapped.  Portraits
are stored level-major in a flat ``uint8`` array of length ``2**n - 1``; the flat
slot of node ``(m, i)`` is ``2**m - 1 + i``.

Most of the heavy lifting happens in the ``*_array`` helpers, which accept a
batch of portraits with shape ``(..., 2**n - 1)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError

MAX_DEPTH = 24
SYMBOLS = "ab"


@dataclass(frozen=True, order=True)
class NodeAddress:
    level: int
    index: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise InputError(f"negative level {self.level}")
        if not 0 <= self.index < (1 << self.level):
            raise InputError(f"index {self.index} out of range at level {self.level}")

    @classmethod
    def root(cls) -> "NodeAddress":
        return cls(0, 0)

    @classmethod
    def parse(cls, word: str) -> "NodeAddress":
        """Build from a word like ``"abba"``; ``""`` and ``"x0"`` name the root."""
        if word in ("", "x0"):
            return cls(0, 0)
        index = 0
        for ch in word:
            if ch not in SYMBOLS:
                raise InputError(f"bad node symbol {ch!r} in {word!r}")
            index = (index << 1) | SYMBOLS.index(ch)
        return cls(len(word), index)

    @property
    def word(self) -> str:
        return "".join(SYMBOLS[b] for b in self.bits)

    @property
    def bits(self) -> tuple[int, ...]:
        m = self.level
        return tuple((self.index >> (m - 1 - k)) & 1 for k in range(m))

    @property
    def flat(self) -> int:
        return (1 << self.level) - 1 + self.index

    @property
    def parent(self) -> "NodeAddress":
        if self.level == 0:
            raise InputError("the root has no parent")
        return NodeAddress(self.level - 1, self.index >> 1)

    def child(self, s) -> "NodeAddress":
        bit = SYMBOLS.index(s) if isinstance(s, str) else int(s)
        return NodeAddress(self.level + 1, (self.index << 1) | bit)

    def extend(self, word: str) -> "NodeAddress":
        node = self
        for ch in word:
            node = node.child(ch)
        return node

    def __str__(self):
        return self.word or "x0"


def nodes_at(level: int):
    return [NodeAddress(level, i) for i in range(1 << level)]


def level_slice(m: int) -> slice:
    return slice((1 << m) - 1, (1 << (m + 1)) - 1)


def depth_of_width(width: int) -> int:
    n = (width + 1).bit_length() - 1
    if (1 << n) - 1 != width:
        raise InputError(f"{width} parity bits is not 2**n - 1")
    return n


def _check_depth(n: int):
    if not 1 <= n <= MAX_DEPTH:
        raise InputError(f"depth {n} outside 1..{MAX_DEPTH}")


# ---------------------------------------------------------------------------
# Batched portrait arithmetic


def images_array(par: np.ndarray, levels: int | None = None) -> list[np.ndarray]:
    """Per-level images ``img[m][..., i] = sigma(node (m, i)).index``.

    Uses ``sigma(x s) = sigma(x) (s xor Par(sigma, x))``.
    """
    n = depth_of_width(par.shape[-1])
    top = n if levels is None else levels
    batch = par.shape[:-1]
    imgs = [np.zeros(batch + (1,), dtype=np.int64)]
    for m in range(top):
        p = par[..., level_slice(m)].astype(np.int64)
        prev = imgs[-1]
        nxt = np.empty(batch + (2 << m,), dtype=np.int64)
        nxt[..., 0::2] = 2 * prev + p
        nxt[..., 1::2] = 2 * prev + (1 - p)
        imgs.append(nxt)
    return imgs


def compose_array(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Portraits of ``s o t``: ``Par(st, x) = Par(s, t(x)) xor Par(t, x)``."""
    s, t = np.broadcast_arrays(s, t)
    n = depth_of_width(s.shape[-1])
    imgs = images_array(t, n - 1)
    out = np.empty(s.shape, dtype=np.uint8)
    for m in range(n):
        sl = level_slice(m)
        moved = np.take_along_axis(s[..., sl], imgs[m], axis=-1)
        out[..., sl] = moved ^ t[..., sl]
    return out


def inverse_array(s: np.ndarray) -> np.ndarray:
    """``Par(s^-1, s(x)) = Par(s, x)``."""
    n = depth_of_width(s.shape[-1])
    imgs = images_array(s, n - 1)
    out = np.empty_like(s, dtype=np.uint8)
    for m in range(n):
        sl = level_slice(m)
        level = np.empty(s[..., sl].shape, dtype=np.uint8)
        np.put_along_axis(level, imgs[m], s[..., sl], axis=-1)
        out[..., sl] = level
    return out


def level_sign_array(s: np.ndarray, level: int) -> np.ndarray:
    ones = s[..., level_slice(level - 1)].sum(axis=-1, dtype=np.int64)
    return 1 - 2 * (ones & 1)


# ---------------------------------------------------------------------------


class TreeAut:
    """Immutable automorphism of the depth-``n`` binary tree."""

    def __init__(self, parities, depth: int | None = None):
        arr = np.array(parities, dtype=np.uint8).reshape(-1)
        if depth is None:
            depth = depth_of_width(arr.size)
        _check_depth(depth)
        if arr.size != (1 << depth) - 1:
            raise InputError(f"depth {depth} needs {(1 << depth) - 1} parities, got {arr.size}")
        if arr.size and arr.max() > 1:
            raise InputError("parities must be 0 or 1")
        arr.flags.writeable = False
        self._par = arr

    @classmethod
    def from_index(cls, index: int, depth: int) -> "TreeAut":
        """Portrait whose bit ``k`` is the parity at flat slot ``k``."""
        _check_depth(depth)
        width = (1 << depth) - 1
        if not 0 <= index < (1 << width):
            raise InputError(f"portrait index {index} out of range at depth {depth}")
        raw = index.to_bytes((width + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return cls(bits[:width], depth)

    @classmethod
    def from_levels(cls, levels) -> "TreeAut":
        return cls(np.concatenate([np.asarray(lv, dtype=np.uint8) for lv in levels]))

    @property
    def depth(self) -> int:
        return depth_of_width(self._par.size)

    @property
    def parities(self) -> np.ndarray:
        return self._par

    @property
    def index(self) -> int:
        return int.from_bytes(np.packbits(self._par, bitorder="little").tobytes(), "little")

    def level(self, m: int) -> np.ndarray:
        return self._par[level_slice(m)]

    def to_bytes(self) -> bytes:
        return bytes([self.depth]) + np.packbits(self._par, bitorder="little").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "TreeAut":
        if not data:
            raise InputError("empty portrait encoding")
        depth = data[0]
        _check_depth(depth)
        width = (1 << depth) - 1
        if len(data) != 1 + (width + 7) // 8:
            raise InputError("portrait encoding has the wrong length")
        bits = np.unpackbits(np.frombuffer(data[1:], dtype=np.uint8), bitorder="little")
        return cls(bits[:width], depth)

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def fromhex(cls, text: str) -> "TreeAut":
        try:
            return cls.from_bytes(bytes.fromhex(text.strip()))
        except ValueError as exc:
            raise InputError(f"bad portrait hex: {exc}") from None

    def __mul__(self, other: "TreeAut") -> "TreeAut":
        return compose(self, other)

    def __eq__(self, other):
        if not isinstance(other, TreeAut):
            return NotImplemented
        return self._par.size == other._par.size and bool(np.array_equal(self._par, other._par))

    def __hash__(self):
        return hash(self._par.tobytes())

    def __repr__(self):
        return f"TreeAut(depth={self.depth}, hex={self.hex()})"


def _check_node(sigma: TreeAut, x: NodeAddress, max_level: int):
    if x.level > max_level:
        raise InputError(f"node {x} at level {x.level} exceeds level {max_level} of depth-{sigma.depth} tree")


def par(sigma: TreeAut, x: NodeAddress) -> int:
    _check_node(sigma, x, sigma.depth - 1)
    return int(sigma.parities[x.flat])


def sgn(sigma: TreeAut, x: NodeAddress) -> int:
    return 1 - 2 * par(sigma, x)


def apply(sigma: TreeAut, x: NodeAddress) -> NodeAddress:
    _check_node(sigma, x, sigma.depth)
    p = sigma.parities
    image = 0
    for m, s in enumerate(x.bits):
        image = (image << 1) | (s ^ int(p[(1 << m) - 1 + (x.index >> (x.level - m))]))
    return NodeAddress(x.level, image)


def compose(sigma: TreeAut, tau: TreeAut) -> TreeAut:
    """``sigma o tau``: apply ``tau`` first."""
    if sigma.depth != tau.depth:
        raise InputError(f"depth mismatch {sigma.depth} vs {tau.depth}")
    return TreeAut(compose_array(sigma.parities, tau.parities))


def inverse(sigma: TreeAut) -> TreeAut:
    return TreeAut(inverse_array(sigma.parities))


def restrict(sigma: TreeAut, m: int) -> TreeAut:
    if not 1 <= m <= sigma.depth:
        raise InputError(f"cannot restrict depth {sigma.depth} to {m}")
    return TreeAut(sigma.parities[: (1 << m) - 1])


def extend(sigma: TreeAut, n: int, fill: np.ndarray | None = None) -> TreeAut:
    """Depth-``n`` portrait agreeing with ``sigma`` below; new parities from ``fill`` or 0."""
    if n < sigma.depth:
        raise InputError("extension must not be shallower")
    extra = (1 << n) - (1 << sigma.depth)
    tail = np.zeros(extra, dtype=np.uint8) if fill is None else np.asarray(fill, dtype=np.uint8)
    if tail.size != extra:
        raise InputError(f"extension needs {extra} parities")
    return TreeAut(np.concatenate([sigma.parities, tail]))


def is_in_U(sigma: TreeAut, m: int) -> bool:
    """True iff ``sigma`` acts trivially on levels ``0 .. m``."""
    if not 0 <= m <= sigma.depth:
        raise InputError(f"U_{m} undefined at depth {sigma.depth}")
    return not sigma.parities[: (1 << m) - 1].any()


def level_sign(sigma: TreeAut, level: int) -> int:
    """Sign of ``sigma`` as a permutation of the ``2**level`` nodes at ``level``.

    Each swapping node one level down contributes one transposition; the
    permutation of sibling pairs contributes a square.
    """
    if not 1 <= level <= sigma.depth:
        raise InputError(f"level {level} outside 1..{sigma.depth}")
    return int(level_sign_array(sigma.parities, level))


def subtree(sigma: TreeAut, s) -> TreeAut:
    """Action on the subtree above the level-1 node ``s``, valid when ``sigma`` fixes level 1."""
    if sigma.depth < 2:
        raise InputError("depth-1 automorphisms have no proper subtrees")
    bit = SYMBOLS.index(s) if isinstance(s, str) else int(s)
    levels = [sigma.level(m)[bit << (m - 1): (bit + 1) << (m - 1)] for m in range(1, sigma.depth)]
    return TreeAut.from_levels(levels)


def pair(left: TreeAut, right: TreeAut) -> TreeAut:
    """The element ``(left, right)`` of ``U_1``: ``left`` above ``a``, ``right`` above ``b``."""
    if left.depth != right.depth:
        raise InputError("pair components need equal depth")
    if left.depth + 1 > MAX_DEPTH:
        raise InputError("pair would exceed the depth cap")
    levels = [[0]] + [np.concatenate([left.level(m), right.level(m)]) for m in range(left.depth)]
    return TreeAut.from_levels(levels)
