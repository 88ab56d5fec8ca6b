"""Exhaustive sweeps over portrait space and subgroup closure from generators."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from ..errors import InputError, ResourceError
from ..tree import TreeAut, compose_array, inverse_array
from . import kernels
from .predicates import GroupSelector

THREADS_ENV = "BASILICA_THREADS"
DEFAULT_BUDGET = 1 << 26


def set_threads(count: int | None = None) -> int:
    """Thread count for the parallel kernels: explicit value, else the env variable, else numba's default."""
    if count is None:
        env = os.environ.get(THREADS_ENV)
        count = int(env) if env else numba.config.NUMBA_NUM_THREADS
    count = max(1, min(int(count), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(count)
    return count


@dataclass
class EnumerationResult:
    depth: int
    selector: str
    count: int
    method: str
    seconds: float
    final: bool = True
    members: np.ndarray | None = field(default=None, repr=False)
    bitset: np.ndarray | None = field(default=None, repr=False)

    @property
    def log2(self) -> int | None:
        c = self.count
        return c.bit_length() - 1 if c > 0 and c & (c - 1) == 0 else None

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "depth": self.depth,
            "selector": self.selector,
            "count": self.count,
            "method": self.method,
        }
        if timing:
            out["seconds"] = round(self.seconds, 6)
        if not self.final:
            out["final"] = False
        return out


@lru_cache(maxsize=None)
def lane_tables(n: int) -> kernels.LaneTables:
    return kernels.LaneTables(n)


def _filter_args(n: int, selector: GroupSelector):
    """Kernel arguments ``(need_m, root_mask, root_target, zero_mask, even_mask)``."""
    selector.validate(n)
    root_bits = (n + 1) // 2
    kind = selector.kind
    if kind == "FullAut":
        return False, 0, -1, 0, 0
    if kind == "U":
        return False, 0, -1, (1 << ((1 << selector.m) - 1)) - 1, 0
    if kind == "M":
        return True, 0, -1, 0, 0
    if kind == "B":
        return True, (1 << root_bits) - 1, 1, 0, 0
    if kind == "E":
        return True, (1 << root_bits) - 1, 1, (1 << ((1 << (n - 1)) - 1)) - 1, 0
    # Frattini: fixes level 1, even on level 2, P = 1 mod 8
    return True, 7, 1, 0b1, 0b110


def _check_sweep_depth(n: int):
    if n < 1:
        raise InputError(f"depth must be positive, got {n}")
    if n > kernels.MAX_PACKED_DEPTH:
        raise ResourceError(f"exhaustive sweep stops at depth {kernels.MAX_PACKED_DEPTH} (2^31 portraits)")


def sweep(n: int, selector: GroupSelector | str, *, keep: bool = False) -> EnumerationResult:
    """Count the depth-``n`` portraits satisfying ``selector`` by visiting every one.

    With ``keep=True`` the matching set is also returned as a little-endian
    bitset over portrait indices.
    """
    if isinstance(selector, str):
        selector = GroupSelector.parse(selector)
    _check_sweep_depth(n)
    args = _filter_args(n, selector)
    t = lane_tables(n)
    start = time.perf_counter()
    if keep:
        bitset = kernels.sweep_bitset(t.lo, t.hi, t.lo_bits, t.lane_mask, 1 << t.width, *args)
        count = kernels.bitset_count(bitset)
    else:
        bitset = None
        count = int(kernels.sweep_count(t.lo, t.hi, t.lo_bits, t.lane_mask, *args))
    return EnumerationResult(n, str(selector), count, "sweep", time.perf_counter() - start, bitset=bitset)


def m_histogram(n: int) -> np.ndarray:
    """Counts of M_n members by (P(x0) lane, Par(x0), level-1 parity): 32 bins."""
    _check_sweep_depth(n)
    t = lane_tables(n)
    level1 = 0b110 if n >= 2 else 0
    return kernels.sweep_m_histogram(t.lo, t.hi, t.lo_bits, t.lane_mask, level1)


# ---------------------------------------------------------------------------


def _with_inverses(gens: list[TreeAut]) -> list[TreeAut]:
    out = []
    seen = set()
    for g in gens:
        for h in (g, TreeAut(inverse_array(g.parities))):
            if h not in seen:
                seen.add(h)
                out.append(h)
    return out


def closure(generators, budget: int = DEFAULT_BUDGET, *, label: str = "closure") -> EnumerationResult:
    """Subgroup generated by ``generators`` (all the same depth), breadth first.

    Elements are discovered by right multiplication with each generator and
    its inverse, in generator order, FIFO.  Depths up to 5 use a dense visited
    bitset over all portrait indices and report members as packed indices;
    deeper trees fall back to a hash set and report portrait rows.
    """
    gens = list(generators)
    if not gens:
        raise InputError("closure needs at least one generator")
    n = gens[0].depth
    if any(g.depth != n for g in gens):
        raise InputError("all generators must have the same depth")
    if budget < 1:
        raise InputError("budget must be positive")
    full = _with_inverses(gens)
    start = time.perf_counter()
    if n <= kernels.MAX_PACKED_DEPTH:
        width = (1 << n) - 1
        visited = np.zeros(max(1, (1 << width) >> 3), dtype=np.uint8)
        packed = np.array([g.index for g in full], dtype=np.int64)
        tables = kernels.right_tables(packed, n)
        store, count, complete = kernels.bfs_closure(packed, tables, budget, visited)
        members = store[:count]
    else:
        members, count, complete, visited = _closure_hashed(full, budget)
    result = EnumerationResult(
        n, label, int(count), "closure", time.perf_counter() - start,
        final=bool(complete), members=members, bitset=visited,
    )
    if not complete:
        raise ResourceError(f"closure exceeded its budget of {budget} elements", partial=result)
    return result


def _closure_hashed(gens: list[TreeAut], budget: int):
    gen_arr = np.stack([g.parities for g in gens])
    frontier = np.zeros((1, gen_arr.shape[1]), dtype=np.uint8)
    seen = {frontier[0].tobytes()}
    found = [frontier]
    while frontier.shape[0]:
        prod = compose_array(frontier[:, None, :], gen_arr[None, :, :]).reshape(-1, gen_arr.shape[1])
        fresh = []
        for row in prod:
            key = row.tobytes()
            if key not in seen:
                if len(seen) == budget:
                    return np.concatenate(found), len(seen), False, None
                seen.add(key)
                fresh.append(row)
        frontier = np.array(fresh, dtype=np.uint8).reshape(-1, gen_arr.shape[1])
        found.append(frontier)
    return np.concatenate(found), len(seen), True, None
