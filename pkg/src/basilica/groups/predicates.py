"""Membership in M_n, B_n, E_n, U_m and the Frattini subgroup of M_n."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..dyadic import p_array, precision_at, root_precision
from ..errors import InputError, PrecisionError
from ..tree import TreeAut, depth_of_width, is_in_U, level_slice

KINDS = ("M", "B", "E", "U", "Frattini", "FullAut")


@dataclass(frozen=True)
class GroupSelector:
    kind: str
    m: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown selector {self.kind!r}")
        if (self.kind == "U") != (self.m is not None):
            raise InputError("U needs a level and only U takes one")
        if self.m is not None and self.m < 0:
            raise InputError("U level must be non-negative")

    @classmethod
    def parse(cls, text: str) -> "GroupSelector":
        t = text.strip()
        match = re.fullmatch(r"[Uu]\(?(\d+)\)?", t)
        if match:
            return cls("U", int(match.group(1)))
        lookup = {k.lower(): k for k in KINDS}
        lookup.update({"aut": "FullAut", "full": "FullAut", "phi": "Frattini"})
        try:
            return cls(lookup[t.lower()])
        except KeyError:
            raise InputError(f"unknown selector {text!r}") from None

    def validate(self, n: int):
        if self.kind == "Frattini" and n < 5:
            raise PrecisionError("the Frattini test needs P mod 8, i.e. depth >= 5")
        if self.kind == "U" and self.m > n:
            raise InputError(f"U_{self.m} undefined at depth {n}")

    def __str__(self):
        return f"U({self.m})" if self.kind == "U" else self.kind


# ---------------------------------------------------------------------------
# Batched predicates over portraits of shape (..., 2**n - 1)


def in_M_array(par: np.ndarray, p: np.ndarray | None = None) -> np.ndarray:
    n = depth_of_width(par.shape[-1])
    if p is None:
        p = p_array(par)
    root = p[..., :1]
    ok = np.ones(par.shape[:-1], dtype=bool)
    # deepest constrained level first: that is where random portraits usually fail
    for m in range(n - 1, 0, -1):
        j = precision_at(n, m)
        if j < 2:
            continue
        diff = p[..., level_slice(m)] - root
        ok &= np.all(diff % (1 << j) == 0, axis=-1)
    return ok


def root_residue_array(par: np.ndarray, p: np.ndarray | None = None) -> np.ndarray:
    n = depth_of_width(par.shape[-1])
    if p is None:
        p = p_array(par)
    return p[..., 0] % (1 << root_precision(n))


def in_B_array(par: np.ndarray) -> np.ndarray:
    p = p_array(par)
    return in_M_array(par, p) & (root_residue_array(par, p) == 1)


def in_E_array(par: np.ndarray) -> np.ndarray:
    n = depth_of_width(par.shape[-1])
    low = par[..., : (1 << (n - 1)) - 1]
    return in_B_array(par) & ~low.any(axis=-1)


def in_frattini_array(par: np.ndarray) -> np.ndarray:
    n = depth_of_width(par.shape[-1])
    if n < 5:
        raise PrecisionError("the Frattini test needs P mod 8, i.e. depth >= 5")
    p = p_array(par)
    fixes_level1 = par[..., 0] == 0
    even_level2 = (par[..., 1].astype(np.int64) + par[..., 2]) % 2 == 0
    return in_M_array(par, p) & fixes_level1 & even_level2 & (p[..., 0] % 8 == 1)


def select_array(par: np.ndarray, selector: GroupSelector) -> np.ndarray:
    n = depth_of_width(par.shape[-1])
    selector.validate(n)
    if selector.kind == "M":
        return in_M_array(par)
    if selector.kind == "B":
        return in_B_array(par)
    if selector.kind == "E":
        return in_E_array(par)
    if selector.kind == "Frattini":
        return in_frattini_array(par)
    if selector.kind == "U":
        return ~par[..., : (1 << selector.m) - 1].any(axis=-1)
    return np.ones(par.shape[:-1], dtype=bool)


# ---------------------------------------------------------------------------


def is_in_M(sigma: TreeAut) -> bool:
    return bool(in_M_array(sigma.parities))


def is_in_B(sigma: TreeAut) -> bool:
    return bool(in_B_array(sigma.parities))


def is_in_E(sigma: TreeAut) -> bool:
    return is_in_U(sigma, sigma.depth - 1) and is_in_B(sigma)


def is_in_frattini(sigma: TreeAut) -> bool:
    return bool(in_frattini_array(sigma.parities))


def is_member(sigma: TreeAut, selector: GroupSelector) -> bool:
    return bool(select_array(sigma.parities, selector))
