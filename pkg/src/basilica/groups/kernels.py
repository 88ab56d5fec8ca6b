"""Packed-portrait kernels for depths up to 5.

A depth-``n`` portrait packs into the integer whose bit ``k`` is the parity at
flat slot ``k`` (so ``2**n - 1 <= 31`` bits at depth 5).

P is affine in the parity bits, ``P(sigma, x) = 1 + sum_k c_k(x) bit_k``, so for
the nodes where P carries two or more bits (levels ``m <= n - 3``, plus the
root) we keep one 8-bit lane per node and precompute the lane-wise sums for the
low and the high half of the bits.  Evaluating every constrained P for one
portrait is then a single add and mask; no lane ever exceeds 15 before the
mask, so lanes never carry into each other.
"""

from __future__ import annotations

import numba
import numpy as np
from numba import njit, prange

from ..dyadic import p_array, precision_at
from ..errors import ResourceError

# the bundled TBB is too old for numba and only produces a warning
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

MAX_PACKED_DEPTH = 5
LANE_BYTES = np.uint64(0x0101010101010101)


class LaneTables:
    """Split lookup tables for the constrained P values of a fixed depth."""

    def __init__(self, n: int):
        if not 1 <= n <= MAX_PACKED_DEPTH:
            raise ResourceError(f"packed kernels cover depths 1..{MAX_PACKED_DEPTH}, got {n}")
        self.depth = n
        self.width = (1 << n) - 1
        top = 0
        while top + 1 <= n - 1 and precision_at(n, top + 1) >= 2:
            top += 1
        self.lanes = (1 << (top + 1)) - 1
        self.lane_precision = np.array(
            [precision_at(n, m) for m in range(top + 1) for _ in range(1 << m)], dtype=np.int64
        )
        mask = 0
        for lane, j in enumerate(self.lane_precision):
            mask |= ((1 << int(j)) - 1) << (8 * lane)
        self.lane_mask = np.uint64(mask)
        self.root_bits = int(self.lane_precision[0])

        # coefficient of bit k on lane x, from the unreduced P of the basis portraits
        basis = np.eye(self.width, dtype=np.uint8)
        coeff = p_array(basis)[:, : self.lanes] - 1
        words = np.zeros(self.width, dtype=np.uint64)
        for k in range(self.width):
            w = 0
            for lane in range(self.lanes):
                j = int(self.lane_precision[lane])
                w |= (int(coeff[k, lane]) % (1 << j)) << (8 * lane)
            words[k] = w

        self.lo_bits = min(self.width, 15)
        self.hi_bits = self.width - self.lo_bits
        base = 0
        for lane in range(self.lanes):
            base |= 1 << (8 * lane)
        self.lo = self._table(words[: self.lo_bits], np.uint64(base))
        self.hi = self._table(words[self.lo_bits:], np.uint64(0))

    def _table(self, words, base):
        table = np.array([base], dtype=np.uint64)
        for w in words:
            table = np.concatenate([table, (table + w) & self.lane_mask])
        return table

    def evaluate(self, indices: np.ndarray) -> np.ndarray:
        """Lane words of the given packed portraits."""
        idx = np.asarray(indices, dtype=np.int64)
        lo = idx & ((1 << self.lo_bits) - 1)
        hi = idx >> self.lo_bits
        return (self.lo[lo] + self.hi[hi]) & self.lane_mask

    def root_residue(self, indices: np.ndarray) -> np.ndarray:
        return (self.evaluate(indices) & np.uint64(0xFF)).astype(np.int64)

    def in_M(self, indices: np.ndarray) -> np.ndarray:
        w = self.evaluate(indices)
        target = ((w & np.uint64(0xFF)) * LANE_BYTES) & self.lane_mask
        return w == target


@njit(cache=True, inline="always")
def _member(w, lane_mask):
    target = ((w & np.uint64(0xFF)) * np.uint64(0x0101010101010101)) & lane_mask
    return w == target


@njit(cache=True, inline="always")
def _popcount_parity(v):
    p = 0
    while v:
        v &= v - 1
        p ^= 1
    return p


@njit(cache=True, inline="always")
def _accept(idx, w, lane_mask, need_m, root_mask, root_target, zero_mask, even_mask):
    if zero_mask and (idx & zero_mask):
        return False
    if even_mask and _popcount_parity(idx & even_mask):
        return False
    if need_m:
        if not _member(w, lane_mask):
            return False
        if root_target >= 0 and (np.int64(w & np.uint64(0xFF)) & root_mask) != root_target:
            return False
    return True


@njit(cache=True, parallel=True)
def sweep_count(lo_t, hi_t, lo_bits, lane_mask, need_m, root_mask, root_target, zero_mask, even_mask):
    total = 0
    n_lo = lo_t.shape[0]
    for hi in prange(hi_t.shape[0]):
        base = hi_t[hi]
        hi_part = np.int64(hi) << lo_bits
        local = 0
        for lo in range(n_lo):
            w = (lo_t[lo] + base) & lane_mask
            if _accept(hi_part | lo, w, lane_mask, need_m, root_mask, root_target, zero_mask, even_mask):
                local += 1
        total += local
    return total


@njit(cache=True, parallel=True)
def sweep_bitset(lo_t, hi_t, lo_bits, lane_mask, n_indices, need_m, root_mask, root_target, zero_mask, even_mask):
    n_bytes = max(1, n_indices >> 3)
    out = np.zeros(n_bytes, dtype=np.uint8)
    lo_mask = (np.int64(1) << lo_bits) - 1
    for b in prange(n_bytes):
        byte = 0
        for r in range(8):
            idx = (np.int64(b) << 3) | r
            if idx >= n_indices:
                break
            w = (lo_t[idx & lo_mask] + hi_t[idx >> lo_bits]) & lane_mask
            if _accept(idx, w, lane_mask, need_m, root_mask, root_target, zero_mask, even_mask):
                byte |= 1 << r
        out[b] = byte
    return out


@njit(cache=True, parallel=True)
def sweep_m_histogram(lo_t, hi_t, lo_bits, lane_mask, level1_mask):
    """Counts of M members keyed by ``root lane | Par(x0) << 3 | level-1 parity << 4``."""
    n_hi = hi_t.shape[0]
    n_lo = lo_t.shape[0]
    rows = np.zeros((n_hi, 32), dtype=np.int64)
    for hi in prange(n_hi):
        base = hi_t[hi]
        hi_part = np.int64(hi) << lo_bits
        for lo in range(n_lo):
            w = (lo_t[lo] + base) & lane_mask
            if _member(w, lane_mask):
                idx = hi_part | lo
                key = np.int64(w & np.uint64(0xFF)) | ((idx & 1) << 3) | (_popcount_parity(idx & level1_mask) << 4)
                rows[hi, key] += 1
    return rows.sum(axis=0)


# ---------------------------------------------------------------------------
# Packed group operations


@njit(cache=True, inline="always")
def _images(t, n, img):
    img[0] = 0
    for m in range(1, n):
        off = (1 << m) - 1
        poff = (1 << (m - 1)) - 1
        for i in range(1 << m):
            pf = poff + (i >> 1)
            img[off + i] = 2 * img[pf] + ((i & 1) ^ ((t >> pf) & 1))


@njit(cache=True)
def compose_packed(s, t, n, img):
    """Packed ``s o t``; ``img`` is scratch of length ``>= 2**n - 1``."""
    _images(t, n, img)
    out = np.int64(0)
    for m in range(n):
        off = (1 << m) - 1
        for i in range(1 << m):
            f = off + i
            bit = ((s >> (off + img[f])) & 1) ^ ((t >> f) & 1)
            out |= bit << f
    return out


@njit(cache=True)
def inverse_packed(s, n, img):
    _images(s, n, img)
    out = np.int64(0)
    for m in range(n):
        off = (1 << m) - 1
        for i in range(1 << m):
            f = off + i
            out |= ((s >> f) & 1) << (off + img[f])
    return out


@njit(cache=True)
def compose_many(left, right, n):
    img = np.empty(32, dtype=np.int64)
    out = np.empty(left.shape[0], dtype=np.int64)
    for k in range(left.shape[0]):
        out[k] = compose_packed(left[k], right[k], n, img)
    return out


def right_tables(gens: np.ndarray, n: int) -> np.ndarray:
    """Byte tables for ``e -> e o g``.

    ``Par(e o g, x) = Par(e, g(x)) xor Par(g, x)``: the bits of ``e`` get
    permuted by ``g`` and then xor-ed with ``g``.  Row ``[k, p, v]`` holds the
    permuted contribution of byte ``p`` of ``e`` having value ``v``.
    """
    width = (1 << n) - 1
    n_bytes = (width + 7) // 8
    img = np.empty(32, dtype=np.int64)
    out = np.zeros((len(gens), n_bytes, 256), dtype=np.int64)
    values = np.arange(256, dtype=np.int64)
    for k, g in enumerate(gens):
        _images(np.int64(g), n, img)
        moved = np.array([(1 << m) - 1 + img[(1 << m) - 1 + i] for m in range(n) for i in range(1 << m)])
        # bit f of the product reads bit moved[f] of e
        dest = np.empty(width, dtype=np.int64)
        dest[moved] = np.arange(width)
        for p in range(n_bytes):
            for b in range(8):
                f = 8 * p + b
                if f < width:
                    out[k, p] |= ((values >> b) & 1) << dest[f]
    return out


@njit(cache=True)
def bfs_closure(gens, tables, capacity, visited):
    """Breadth-first closure from the identity under right multiplication by ``gens``.

    Returns ``(store, count, complete)``; ``store[:count]`` lists elements in
    discovery order.
    """
    n_bytes = tables.shape[1]
    store = np.empty(capacity, dtype=np.int64)
    store[0] = 0
    visited[0] |= 1
    tail = 1
    head = 0
    while head < tail:
        e = store[head]
        head += 1
        for k in range(gens.shape[0]):
            c = gens[k]
            for p in range(n_bytes):
                c ^= tables[k, p, (e >> (8 * p)) & 255]
            byte = c >> 3
            bit = np.uint8(1 << (c & 7))
            if visited[byte] & bit:
                continue
            if tail == capacity:
                return store, tail, False
            visited[byte] |= bit
            store[tail] = c
            tail += 1
    return store, tail, True


@njit(cache=True)
def bitset_lookup(bitset, indices):
    out = np.empty(indices.shape[0], dtype=np.bool_)
    for k in range(indices.shape[0]):
        c = indices[k]
        out[k] = (bitset[c >> 3] >> (c & 7)) & 1
    return out


@njit(cache=True, parallel=True)
def conjugation_escapes(members, g, n, bitset):
    """How many ``g m g^-1`` fall outside ``bitset`` for ``m`` in ``members``."""
    bad = 0
    for k in prange(members.shape[0]):
        img = np.empty(32, dtype=np.int64)
        ginv = inverse_packed(g, n, img)
        c = compose_packed(compose_packed(g, members[k], n, img), ginv, n, img)
        if not (bitset[c >> 3] >> (c & 7)) & 1:
            bad += 1
    return bad


def bitset_count(bitset: np.ndarray) -> int:
    return int(np.bitwise_count(bitset).sum(dtype=np.int64))


def bitset_members(bitset: np.ndarray, limit: int) -> np.ndarray:
    bits = np.unpackbits(bitset, bitorder="little")[:limit]
    return np.flatnonzero(bits).astype(np.int64)


def pack(par: np.ndarray) -> np.ndarray:
    """Packed indices of a batch of portraits with shape (..., 2**n - 1)."""
    weights = np.left_shift(np.int64(1), np.arange(par.shape[-1], dtype=np.int64))
    return (par.astype(np.int64) * weights).sum(axis=-1)


def unpack(indices, n: int) -> np.ndarray:
    idx = np.asarray(indices, dtype=np.int64)
    shifts = np.arange((1 << n) - 1, dtype=np.int64)
    return ((idx[..., None] >> shifts) & 1).astype(np.uint8)
