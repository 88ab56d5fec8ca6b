"""Acceptance criteria, one test each.

Every test prints a single ``PASS`` or ``FAIL`` line.  Run with
``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""

import cmath
import sys
import time

import numpy as np
import pytest

from basilica.dyadic import p_array, precision_at, q_array
from basilica.groups import order_formula, sweep
from basilica.groups.verify import (
    sample_M,
    verify_exact_sequence,
    verify_frattini,
    verify_generation,
    verify_inductEn,
)
from basilica.preimage import (
    build_tree,
    canonical_label,
    max_zetaprod_residual,
    twodown_residuals,
    verify_nrel,
)
from basilica.rational import degree_condition, scan_range
from basilica.tree import compose_array, images_array, level_slice

SMALL_ORDERS = {1: (1, 1, 1), 2: (2, 3, 3), 3: (3, 6, 7), 4: (6, 12, 13)}
PINK_TABLE = [1, 3, 6, 12, 23, 45, 88, 174, 345, 687]
QUALIFYING = [5, 6, 10, 11, 12, 13, 14, 19, 20, 21, 22, 23]


def report(k: int, ok: bool, detail: str) -> bool:
    print(f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}", flush=True)
    return ok


def criterion_1() -> bool:
    start = time.perf_counter()
    got = {n: tuple(sweep(n, s).log2 for s in ("E", "B", "M")) for n in SMALL_ORDERS}
    elapsed = time.perf_counter() - start
    ok = got == SMALL_ORDERS and elapsed < 10
    return report(1, ok, f"log2 (E,B,M) at depths 1-4 = {got}, {elapsed:.2f} s")


def criterion_2() -> bool:
    got = {s: sweep(5, s).count for s in ("M", "B", "E")}
    ok = got == {"M": 1 << 25, "B": 1 << 23, "E": 1 << 11}
    return report(2, ok, f"depth-5 orders {got}")


def criterion_3() -> bool:
    bad = []
    for n in range(1, 6):
        for which in ("B", "M"):
            samples = 1_000_000 if n == 5 else 10_000
            r = verify_generation(n, which, samples=samples)
            if not r.passed:
                bad.append((n, which, r.checks))
    return report(3, not bad, "closures equal predicate sets at depths 1-5" if not bad else f"failures {bad}")


def criterion_4() -> bool:
    pink = [order_formula(n, "pink") for n in range(1, 11)]
    b = [order_formula(n, "b") for n in range(1, 11)]
    ok = pink == b == PINK_TABLE
    return report(4, ok, f"pink counts {pink}")


def criterion_5() -> bool:
    r = verify_exact_sequence(5)
    failed = [label for label, ok, _ in r.checks if not ok]
    return report(5, r.passed, f"{len(r.checks)} exact-sequence checks at depth 5, failed: {failed}")


def criterion_6() -> bool:
    r = verify_frattini(5)
    d = r.data
    detail = f"order {d['order']}, index {d['index']}, normal {d['normal']}, witnessed cosets {d['witnessed_cosets']}"
    ok = r.passed and d["order"] == 1 << 21 and d["index"] == 16 and d["witnessed_cosets"] == 16
    return report(6, ok, detail)


def criterion_7() -> bool:
    reports = [verify_inductEn(n) for n in range(2, 6)]
    indices = [r.data["index"] for r in reports]
    p_lam = reports[-1].data["P(lambda)"]
    ok = all(r.passed for r in reports) and indices == [1, 2, 1, 2] and p_lam == 5
    return report(7, ok, f"indices {indices}, P(lambda) = {p_lam} mod 8")


def _homomorphism_violations(n: int, count: int, rng) -> int:
    s = sample_M(n, count, rng)
    t = rng.integers(0, 2, (count, (1 << n) - 1), dtype=np.uint8)
    st = compose_array(s, t)
    img_s, img_t = images_array(s), images_array(t)
    qs, qt, qst = q_array(s), q_array(t), q_array(st)
    ps, pt, pst = p_array(s, qs), p_array(t, qt), p_array(st, qst)
    root_p = ps[:, :1]
    bad = np.zeros(count, dtype=bool)
    for m in range(n):
        sl = level_slice(m)
        # parity of st read off the composed images of the children
        composed = np.take_along_axis(img_s[m + 1], img_t[m + 1], axis=1)
        par_direct = (composed[:, 0::2] & 1).astype(np.uint8)
        sgn_st = 1 - 2 * par_direct.astype(np.int64)
        sgn_s_at_t = 1 - 2 * np.take_along_axis(s[:, sl], img_t[m], axis=1).astype(np.int64)
        sgn_t = 1 - 2 * t[:, sl].astype(np.int64)
        bad |= np.any(sgn_st != sgn_s_at_t * sgn_t, axis=1)
        bad |= np.any(st[:, sl] != (np.take_along_axis(s[:, sl], img_t[m], axis=1) ^ t[:, sl]), axis=1)
        bad |= np.any(st[:, sl] != par_direct, axis=1)
        mod = 1 << precision_at(n, m)
        q_s_at_t = np.take_along_axis(qs[:, sl], img_t[m], axis=1)
        bad |= np.any((q_s_at_t + root_p * qt[:, sl] - qst[:, sl]) % mod != 0, axis=1)
        bad |= np.any((root_p * pt[:, sl] - pst[:, sl]) % mod != 0, axis=1)
    return int(bad.sum())


def criterion_8() -> bool:
    rng = np.random.default_rng(8)
    per_depth = 20_000
    violations = {n: _homomorphism_violations(n, per_depth, rng) for n in range(4, 9)}
    ok = sum(violations.values()) == 0
    return report(8, ok, f"{per_depth * 5} pairs at depths 4-8, violations {violations}")


def _tree_residuals(x0, seed: int) -> float:
    tree = canonical_label(build_tree(x0, 9, seed))
    zeta = max_zetaprod_residual(tree)
    two = float(twodown_residuals(tree).max())
    nrel = 0.0
    for y in ("", "a", "b", "ab", "bba"):
        for m in range((9 - len(y) - 1) // 2 + 1):
            nrel = max(nrel, verify_nrel(tree, y, m, selection=seed + m)["max_residual"])
    return zeta, two, nrel


def criterion_9() -> bool:
    rng = np.random.default_rng(9)
    points = [5] + [cmath.rect(rng.uniform(0.5, 3), rng.uniform(0, 2 * np.pi)) for _ in range(10)]
    start = time.perf_counter()
    worst = [0.0, 0.0, 0.0]
    for k, x0 in enumerate(points):
        worst = [max(a, b) for a, b in zip(worst, _tree_residuals(x0, k))]
    elapsed = time.perf_counter() - start
    ok = worst[0] < 1e-7 and worst[1] < 1e-8 and worst[2] < 1e-8 and elapsed < 30
    detail = f"zetaprod {worst[0]:.1e}, 2down {worst[1]:.1e}, nrel {worst[2]:.1e}, {elapsed:.1f} s"
    return report(9, ok, detail)


def criterion_10() -> bool:
    listed = scan_range(1, 23)
    symmetric = all(degree_condition(x) == degree_condition(-1 - x) for x in range(-100, 101) if x not in (0, -1))
    mirrored = sorted(-1 - x for x in scan_range(-100, 100)) == scan_range(-100, 100)
    ok = listed == QUALIFYING and symmetric and mirrored
    return report(10, ok, f"scan(1..23) = {listed}, symmetric on -100..100: {symmetric and mirrored}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.slow
@pytest.mark.parametrize("criterion", CRITERIA, ids=lambda f: f.__name__)
def test_acceptance(criterion, capsys):
    with capsys.disabled():
        print()
        ok = criterion()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
