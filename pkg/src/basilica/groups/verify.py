"""Structural checks on M_n, B_n and E_n built from sweeps and closures."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

import numpy as np

from ..dyadic import p_value, root_precision
from ..errors import InputError, ResourceError
from ..tree import NodeAddress, TreeAut, compose, level_sign
from . import kernels
from .enumerate import closure, lane_tables, sweep
from .generators import generator
from .predicates import GroupSelector, in_M_array, is_in_M

BASILICA = ("alpha", "beta")
ARITHMETIC = ("alpha", "beta", "epsilon", "theta")


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def check(self, label: str, ok, detail=None):
        self.checks.append((label, bool(ok), detail))
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": [
                {"check": label, "ok": ok, **({"detail": detail} if detail is not None else {})}
                for label, ok, detail in self.checks
            ],
            **self.data,
        }


@lru_cache(maxsize=4)
def standard_closure(n: int, which: str = "M"):
    """Closure of the basilica generators (``"B"``) or of all four (``"M"``); cached."""
    names = BASILICA if which == "B" else ARITHMETIC
    result = closure([generator(g, n) for g in names], label=f"<{','.join(names)}>")
    if result.members is not None and n <= kernels.MAX_PACKED_DEPTH:
        result.members = result.members.copy()
    return result


@lru_cache(maxsize=4)
def standard_sweep(n: int, selector: str):
    return sweep(n, GroupSelector.parse(selector), keep=True)


def bitset_from(indices: np.ndarray, n: int) -> np.ndarray:
    out = np.zeros(max(1, (1 << ((1 << n) - 1)) >> 3), dtype=np.uint8)
    idx = np.asarray(indices, dtype=np.int64)
    np.bitwise_or.at(out, idx >> 3, (1 << (idx & 7)).astype(np.uint8))
    return out


def _units(j: int) -> list[int]:
    return list(range(1, 1 << j, 2))


def _check_packed(n: int, what: str):
    if n > kernels.MAX_PACKED_DEPTH:
        raise ResourceError(f"{what} is exhaustive only up to depth {kernels.MAX_PACKED_DEPTH}")


# ---------------------------------------------------------------------------


def verify_exact_sequence(n: int, pairs: int = 100_000, seed: int = 0) -> Report:
    """``1 -> B_n -> M_n -> (Z/2^j)^x -> 1`` with ``j = (n+1)//2``, exhaustively."""
    _check_packed(n, "the exact-sequence check")
    j = root_precision(n)
    report = Report(f"exact sequence at depth {n}")
    group = standard_closure(n, "M")
    tables = lane_tables(n)
    residues = tables.root_residue(group.members)

    values, counts = np.unique(residues, return_counts=True)
    fibers = {int(v): int(c) for v, c in zip(values, counts)}
    report.data["modulus"] = 1 << j
    report.data["order"] = group.count
    report.data["fibers"] = fibers
    report.check("image is the full unit group", sorted(fibers) == _units(j), sorted(fibers))
    report.check("fibers have equal size", len(set(fibers.values())) == 1, sorted(set(fibers.values())))

    kernel = bitset_from(group.members[residues == 1], n)
    b_set = standard_sweep(n, "B").bitset
    report.check("kernel equals the B predicate set", np.array_equal(kernel, b_set))

    eps = p_value(generator("epsilon", n), NodeAddress.root())
    tht = p_value(generator("theta", n), NodeAddress.root())
    report.data["P(epsilon)"] = eps.value
    report.data["P(theta)"] = tht.value
    report.check("P(epsilon) = -1", eps.congruent(-1), str(eps))
    report.check("P(theta) = 3", tht.congruent(3), str(tht))

    rng = np.random.default_rng(seed)
    left = rng.choice(group.members, pairs)
    right = rng.choice(group.members, pairs)
    prods = kernels.compose_many(left, right, n)
    lhs = tables.root_residue(prods)
    rhs = (tables.root_residue(left) * tables.root_residue(right)) % (1 << j)
    report.check(f"P multiplicative on {pairs} random pairs", np.array_equal(lhs, rhs))
    return report


def verify_inductEn(n: int) -> Report:
    """Index of ``E_n`` in ``E_{n-1} x E_{n-1}``: 1 for even ``n``, 2 for odd ``n``."""
    if not 2 <= n <= kernels.MAX_PACKED_DEPTH:
        raise ResourceError(f"the E_n index check covers depths 2..{kernels.MAX_PACKED_DEPTH}")
    report = Report(f"E_{n} inside E_{n - 1} x E_{n - 1}")
    lower = kernels.bitset_members(standard_sweep(n - 1, "E").bitset, 1 << ((1 << (n - 1)) - 1))

    # slot (m, i) of the depth-(n-1) subtree above s sits at slot (m+1, s*2^m + i)
    width = (1 << (n - 1)) - 1
    shift_a = np.array([(1 << (m + 1)) - 1 + i for m in range(n - 1) for i in range(1 << m)])
    shift_b = np.array([(1 << (m + 1)) - 1 + (1 << m) + i for m in range(n - 1) for i in range(1 << m)])
    bits = (lower[:, None] >> np.arange(width)) & 1
    on_a = (bits << shift_a).sum(axis=1)
    on_b = (bits << shift_b).sum(axis=1)
    prod_group = (on_a[:, None] | on_b[None, :]).reshape(-1)

    tables = lane_tables(n)
    j = root_precision(n)
    residues = tables.root_residue(prod_group)
    in_m = tables.in_M(prod_group)
    in_e = in_m & (residues == 1)
    e_count = int(sweep(n, "E").count)
    inside = int(in_e.sum())
    index = len(prod_group) // inside if inside else None
    expected = 1 if n % 2 == 0 else 2
    report.data.update(product_order=len(prod_group), e_order=e_count, index=index)
    report.check("product lies in M_n", in_m.all())
    report.check("E_n is contained in the product", inside == e_count, (inside, e_count))
    report.check(f"index is {expected}", index == expected and len(prod_group) == index * inside, index)

    if n % 2 == 1:
        lam = generator("lambda", n)
        p_lam = p_value(lam, NodeAddress.root())
        target = 1 + (1 << (j - 1))
        report.data["P(lambda)"] = p_lam.value
        report.check("lambda lies in the product", bool(np.isin(lam.index, prod_group)))
        report.check(f"P(lambda) = {target} mod 2^{j}", p_lam.congruent(target), str(p_lam))
        report.check("lambda is outside E_n", not in_e[prod_group == lam.index].any())
        report.check("the other coset is P = 1 + 2^(j-1)", int((residues == target).sum()) == inside)
    return report


def _signs_and_p4(indices: np.ndarray, n: int):
    idx = np.asarray(indices, dtype=np.int64)
    signs = {}
    for level in range(1, n + 1):
        m = level - 1
        mask = ((1 << (1 << m)) - 1) << ((1 << m) - 1)
        signs[level] = 1 - 2 * (np.bitwise_count(idx & mask).astype(np.int64) & 1)
    p4 = lane_tables(n).root_residue(idx) & 3
    return signs, p4


def _pattern_holds(signs: dict, p4: np.ndarray, n: int) -> np.ndarray:
    ok = np.ones(p4.shape, dtype=bool)
    for level in range(4, n + 1, 2):
        ok &= signs[level] == signs[2]
    for level in range(5, n + 1, 2):
        ok &= signs[level] == signs[3]
    ok &= (signs[1] == signs[3]) == (p4 == 1)
    return ok


def verify_parity_pattern(sigma: TreeAut) -> Report:
    """Level signs of a member of M_n: constant on even levels, constant on odd
    levels from 3 up, and level 1 agrees with level 3 iff P = 1 mod 4."""
    n = sigma.depth
    if n < 5:
        raise InputError("the parity pattern needs depth >= 5")
    if not is_in_M(sigma):
        raise InputError("the parity pattern applies to members of M_n only")
    report = Report(f"parity pattern at depth {n}")
    signs = {lv: level_sign(sigma, lv) for lv in range(1, n + 1)}
    p4 = p_value(sigma, NodeAddress.root()).value & 3
    report.data.update(signs=signs, p_mod_4=p4)
    report.check("even levels share a sign", len({signs[lv] for lv in range(2, n + 1, 2)}) == 1)
    report.check("odd levels >= 3 share a sign", len({signs[lv] for lv in range(3, n + 1, 2)}) == 1)
    report.check("level 1 matches level 3 iff P = 1 mod 4", (signs[1] == signs[3]) == (p4 == 1))
    return report


def verify_parity_pattern_all(n: int = 5, chunk: int = 1 << 22) -> Report:
    """The parity pattern on every element of the M_n closure."""
    _check_packed(n, "the bulk parity pattern")
    if n < 5:
        raise InputError("the parity pattern needs depth >= 5")
    members = standard_closure(n, "M").members
    bad = 0
    for start in range(0, len(members), chunk):
        block = members[start: start + chunk]
        signs, p4 = _signs_and_p4(block, n)
        bad += int((~_pattern_holds(signs, p4, n)).sum())
    report = Report(f"parity pattern on all of M_{n}")
    report.data["elements"] = len(members)
    report.check("every element passes", bad == 0, bad)
    return report


# ---------------------------------------------------------------------------


def coset_key(sigma: TreeAut) -> tuple[int, int, int]:
    """(sign on level 1, sign on level 2, P(sigma) mod 8): the image in M/Phi."""
    return level_sign(sigma, 1), level_sign(sigma, 2), p_value(sigma, NodeAddress.root()).value % 8


def frattini_representatives(n: int = 5) -> dict:
    """alpha^a beta^b (alpha epsilon)^c theta^d for a, b, c, d in {0, 1}."""
    a, b, e, t = (generator(g, n) for g in ARITHMETIC)
    ae = compose(a, e)
    ident = generator("identity", n)
    reps = {}
    for bits in product((0, 1), repeat=4):
        g = ident
        for use, h in zip(bits, (a, b, ae, t)):
            if use:
                g = compose(g, h)
        reps[bits] = g
    return reps


def verify_frattini(n: int = 5) -> Report:
    """The Frattini predicate set: order, index 16, normality and coset witnesses."""
    if n < 5:
        raise InputError("the Frattini subgroup needs depth >= 5")
    _check_packed(n, "the Frattini check")
    report = Report(f"Frattini subgroup of M_{n}")
    group = standard_closure(n, "M")
    phi = standard_sweep(n, "Frattini")
    order = phi.count
    index = group.count // order if order else None
    report.data.update(order=order, m_order=group.count, index=index)
    report.check("index 16 in M_n", index == 16 and order * 16 == group.count, index)
    report.check("contained in M_n", not np.any(phi.bitset & ~group.bitset))

    members = kernels.bitset_members(phi.bitset, 1 << ((1 << n) - 1))
    escapes = {
        name: int(kernels.conjugation_escapes(members, np.int64(generator(name, n).index), n, phi.bitset))
        for name in ARITHMETIC
    }
    report.data["conjugation_escapes"] = escapes
    report.check("normal in M_n", not any(escapes.values()), escapes)
    report.data["normal"] = not any(escapes.values())

    signs, _ = _signs_and_p4(group.members, n)
    p8 = lane_tables(n).root_residue(group.members) & 7
    keys = (signs[1] < 0).astype(np.int64) * 32 + (signs[2] < 0).astype(np.int64) * 16 + p8
    values, counts = np.unique(keys, return_counts=True)
    report.data["coset_sizes"] = sorted(set(int(c) for c in counts))
    report.check("16 cosets of equal size", len(values) == 16 and len(set(counts.tolist())) == 1)

    four = {
        "fixes level 1": signs[1] > 0,
        "even on level 2": signs[2] > 0,
        "P in {1,3} mod 8": (p8 == 1) | (p8 == 3),
        "P in {1,7} mod 8": (p8 == 1) | (p8 == 7),
    }
    meet = np.ones(len(group.members), dtype=bool)
    for label, mask in four.items():
        report.check(f"'{label}' has index 2", int(mask.sum()) * 2 == group.count)
        meet &= mask
    report.check("the four index-2 subgroups meet in Phi",
                 np.array_equal(bitset_from(group.members[meet], n), phi.bitset))

    reps = frattini_representatives(n)
    witnessed = {coset_key(g) for g in reps.values()}
    report.data["witnessed_cosets"] = len(witnessed)
    report.check("products of alpha, beta, alpha*epsilon, theta hit all 16 cosets", len(witnessed) == 16)
    report.check("representatives lie in M_n", all(is_in_M(g) for g in reps.values()))
    return report


# ---------------------------------------------------------------------------


def random_words(names, n: int, count: int, length: int, rng) -> np.ndarray:
    """Portraits of ``count`` random words of ``length`` letters in the named generators."""
    from ..tree import compose_array, inverse_array

    gens = np.stack([generator(g, n).parities for g in names])
    gens = np.concatenate([gens, inverse_array(gens)])
    out = np.zeros((count, gens.shape[1]), dtype=np.uint8)
    for _ in range(length):
        out = compose_array(out, gens[rng.integers(0, len(gens), count)])
    return out


def sample_M(n: int, count: int, rng, length: int = 48) -> np.ndarray:
    """Random members of M_n as random generator words, checked against the predicate."""
    sample = random_words(ARITHMETIC, n, count, length, rng)
    if not in_M_array(sample).all():
        raise AssertionError("a product of alpha, beta, epsilon, theta left M_n")
    return sample


def verify_generation(n: int, which: str = "M", samples: int = 1_000_000, seed: int = 0) -> Report:
    """The closure of the standard generators against the predicate set.

    ``which="B"`` closes alpha and beta, ``which="M"`` adds epsilon and theta.
    Both sets are compared as bitsets (so as sets, at every depth up to 5),
    and random portraits are cross-checked against the array predicate too.
    """
    _check_packed(n, "the generation check")
    if which not in ("B", "M"):
        raise InputError("which must be 'B' or 'M'")
    report = Report(f"<{','.join(BASILICA if which == 'B' else ARITHMETIC)}> = {which}_{n}")
    group = standard_closure(n, which)
    predicate = standard_sweep(n, which)
    report.data.update(closure_order=group.count, predicate_order=predicate.count)
    report.check("same order", group.count == predicate.count, (group.count, predicate.count))
    report.check("same set", np.array_equal(group.bitset, predicate.bitset))

    rng = np.random.default_rng(seed)
    space = 1 << ((1 << n) - 1)
    half = samples // 2
    probe = np.concatenate([
        rng.integers(0, space, samples - half, dtype=np.int64),
        rng.choice(group.members, half) if n <= kernels.MAX_PACKED_DEPTH else np.zeros(0, np.int64),
    ])
    from .predicates import select_array

    in_closure = kernels.bitset_lookup(group.bitset, probe)
    in_predicate = np.zeros(len(probe), dtype=bool)
    for start in range(0, len(probe), 1 << 17):
        block = kernels.unpack(probe[start: start + (1 << 17)], n)
        in_predicate[start: start + len(block)] = select_array(block, GroupSelector(which))
    mismatches = int((in_closure != in_predicate).sum())
    report.data["probes"] = len(probe)
    report.check(f"{len(probe)} random membership probes agree", mismatches == 0, mismatches)
    return report
