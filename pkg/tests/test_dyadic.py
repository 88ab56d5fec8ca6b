import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from basilica.dyadic import (
    DyadicResidue,
    p_array,
    p_table,
    p_value,
    precision_at,
    q_array,
    q_value,
    reduce_levels,
)
from basilica.errors import InputError, PrecisionError
from basilica.groups import epsilon, generator, identity, theta
from basilica.tree import NodeAddress, TreeAut, extend
from conftest import portraits

ROOT = NodeAddress.root()


class TestResidue:
    def test_reduces(self):
        r = DyadicResidue(-1, 3)
        assert r.value == 7 and r.modulus == 8
        assert str(r) == "7 mod 2^3"
        assert r.congruent(-1) and r.congruent(15)
        assert r.is_unit

    def test_arithmetic(self):
        a, b = DyadicResidue(3, 3), DyadicResidue(5, 2)
        assert (a * b).precision == 2
        assert (a * b).value == 15 % 4
        assert (a + 1).value == 4
        assert (-a).value == 5
        assert (a * a.inverse()).value == 1
        assert a.reduce(1).value == 1

    def test_invalid(self):
        with pytest.raises(InputError):
            DyadicResidue(1, 0)
        with pytest.raises(InputError):
            DyadicResidue(2, 3).inverse()
        with pytest.raises(PrecisionError):
            DyadicResidue(1, 3).reduce(4)


class TestExamples:
    def test_q(self):
        for j in (1, 2, 3):
            assert q_value(identity(5), ROOT, j).value == 0
        # 1 + 4 + 16 + ... = -1/3, which is 5 mod 8
        assert q_value(epsilon(5), ROOT, 3).value == 5
        t = theta(7)
        for w in ("", "b", "ab", "bab"):
            x = NodeAddress.parse(w)
            j = precision_at(7, x.level)
            assert q_value(t, x, j).congruent(int(t.parities[x.flat]))

    def test_p(self):
        assert p_value(identity(5), ROOT).value == 1
        assert p_value(epsilon(5), ROOT) == DyadicResidue(7, 3)
        assert p_value(theta(5), ROOT) == DyadicResidue(3, 3)
        assert p_value(generator("lambda", 5), ROOT) == DyadicResidue(5, 3)

    def test_precision_guard(self):
        with pytest.raises(PrecisionError):
            q_value(epsilon(5), ROOT, 4)
        with pytest.raises(InputError):
            q_value(epsilon(5), ROOT, 0)
        with pytest.raises(InputError):
            p_value(epsilon(3), NodeAddress.parse("aaa"))

    def test_p_table_shape(self):
        table = p_table(theta(5))
        assert [len(row) for row in table] == [1, 2, 4, 8, 16]
        assert [row[0].precision for row in table] == [3, 2, 2, 1, 1]


class TestProperties:
    @given(portraits(max_depth=6))
    def test_q_and_p_match_pattern_sums(self, p):
        n = oracles_depth(p)
        q = q_array(p)
        pp = p_array(p)
        for m in range(n):
            for w in oracles.words(m):
                k = oracles.slot(w)
                assert q[k] == oracles.q_sum(p.tolist(), n, w)
                assert pp[k] == oracles.p_sum(p.tolist(), n, w)
                x = NodeAddress.parse(w)
                j = precision_at(n, m)
                assert q_value(TreeAut(p), x, j).value == q[k] % (1 << j)
                assert p_value(TreeAut(p), x).value == pp[k] % (1 << j)

    @given(portraits(max_depth=8))
    def test_q_recursion(self, p):
        n = oracles_depth(p)
        q = q_array(p)
        for m in range(n):
            j = precision_at(n, m)
            for i in range(1 << m):
                k = (1 << m) - 1 + i
                rhs = p[k]
                if m + 2 <= n - 1:
                    up = (1 << (m + 2)) - 1 + 4 * i
                    rhs += 2 * (q[up] + q[up + 1])
                assert (q[k] - rhs) % (1 << j) == 0

    @given(portraits(max_depth=7), st.integers(1, 2), st.randoms(use_true_random=False))
    def test_extension_independence(self, p, extra, rnd):
        s = TreeAut(p)
        n = s.depth
        fill = np.array([rnd.randint(0, 1) for _ in range((1 << (n + extra)) - (1 << n))], np.uint8)
        big = extend(s, n + extra, fill)
        small_p = reduce_levels(p_array(s.parities), n)
        big_p = p_array(big.parities)[: (1 << n) - 1]
        small_q = q_array(s.parities)
        big_q = q_array(big.parities)[: (1 << n) - 1]
        mods = np.concatenate([np.full(1 << m, 1 << precision_at(n, m)) for m in range(n)])
        assert np.array_equal(small_p, big_p % mods)
        assert np.array_equal(small_q % mods, big_q % mods)

    @given(portraits(max_depth=8))
    def test_p_is_odd(self, p):
        assert np.all(p_array(p) % 2 == 1)


def oracles_depth(p):
    return (len(p) + 1).bit_length() - 1
