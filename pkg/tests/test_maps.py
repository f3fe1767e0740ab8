import math

import pytest
from gmpy2 import mpq

from tauforge.maps import (bg_table, calibrate_t00, genus0_closed, hurwitz_asymptotic_check,
                           hurwitz_one_part_numbers, map_oracle, painleve_check,
                           painleve_residual, rising, rooted_cubic_count,
                           rooted_triangulation_count, triangulation_asymptotic,
                           triangulation_table, triangulation_trend)
from tauforge.partitions import Partition, partitions, partitions_upto
from tauforge.series import Truncation, monomial
from tauforge.symmetric_group import BudgetExceeded, bms_oracle, hurwitz_oracle, monotonic_oracle
from tauforge.tau import genus_expansion, genus_part, named_params


def double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def planar_closed(n):
    # rooted planar triangulations with 2n faces, loops and multiple edges allowed
    return mpq(2 ** (2 * n + 1) * double_factorial(3 * n),
               math.factorial(n + 2) * double_factorial(n))


class TestOracle:
    def test_single_edge(self):
        # a loop on one vertex and a bridge between two vertices
        assert map_oracle(1, vertex_type=(2,), face_count=2, rooted=False) == mpq(1, 2)
        assert map_oracle(1, vertex_type=(1, 1), rooted=False) == mpq(1, 2)
        assert map_oracle(1, vertex_type=(2,), rooted=True) == 1
        assert map_oracle(1, vertex_type=(2,), genus=1) == 0

    def test_theta_and_torus(self):
        # two trivalent vertices: planar theta and dumbbell (4 rooted), torus (1 rooted)
        assert rooted_cubic_count(1, 0) == 4
        assert rooted_cubic_count(1, 1) == 1

    def test_duality(self):
        for g in (0, 1):
            assert rooted_cubic_count(1, g) == rooted_triangulation_count(1, g)

    def test_genus_additivity(self):
        for kappa in partitions(4):
            total = map_oracle(2, vertex_type=kappa)
            assert total == sum(map_oracle(2, vertex_type=kappa, genus=g) for g in range(3))

    def test_disconnected_superset(self):
        for kappa in partitions(4):
            assert map_oracle(2, vertex_type=kappa, connected=False) >= map_oracle(2, vertex_type=kappa)

    def test_bad_type(self):
        with pytest.raises(ValueError):
            map_oracle(2, vertex_type=(3,))

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            map_oracle(3, vertex_type=[3, 3], budget=10)


class TestTriangulations:
    def test_calibration(self):
        assert calibrate_t00() == 2

    def test_frozen_values(self):
        tab = triangulation_table(3)
        assert tab.T(1, 0) == 4 and tab.T(2, 0) == 32 and tab.T(2, 1) == 28
        assert tab.T(3, 0) == 336 and tab.T(1, 1) == 1
        assert tab.T(-1, 0) == mpq(-1, 2) and tab.t[(-1, 0)] == mpq(1, 2)

    def test_planar_closed_form(self):
        tab = triangulation_table(12, g_max=0)
        for n in range(0, 13):
            assert tab.T(n, 0) == planar_closed(n)

    def test_against_oracle(self):
        tab = triangulation_table(2)
        for g in (0, 1):
            assert tab.T(2, g) == rooted_cubic_count(2, g)

    def test_integers(self):
        tab = triangulation_table(30)
        for n, g, t, T in tab.rows():
            if n >= 0:
                assert T.denominator == 1 and T >= 0

    def test_domain(self):
        tab = triangulation_table(4)
        assert tab.T(2, 2) == 0 and tab.T(-2, 0) == 0

    def test_csv(self):
        text = triangulation_table(2).to_csv()
        assert text.splitlines()[0] == "n,g,t,T"
        assert "-1,0,1/2,-1/2" in text
        assert text == triangulation_table(2).to_csv()

    def test_bad_nmax(self):
        with pytest.raises(ValueError):
            triangulation_table(0)


class TestPainleve:
    def test_values(self):
        assert bg_table(4).b == [-1, mpq(1, 24), mpq(49, 1152), mpq(1225, 6912),
                                 mpq(4412401, 2654208)]

    def test_check(self):
        assert painleve_check(6).passed

    def test_corrupted(self):
        b = bg_table(4)
        b.b[2] += 1
        rep = painleve_check(4, b)
        assert not rep.passed
        assert painleve_residual(b.b, 4).coefficient(monomial({"s": 2})) != 0

    def test_positive_after_zero(self):
        assert all(x > 0 for x in bg_table(10).b[1:])


class TestAsymptotics:
    def test_trend(self):
        rep = triangulation_trend(1, [100, 200])
        assert rep.improves(100, 200)
        assert 0.9 < dict(rep.points)[200] < 1

    def test_hurwitz_trend(self):
        rep = hurwitz_asymptotic_check(20, 1)
        assert rep.improves(10, 20)

    def test_positive(self):
        for g in range(1, 4):
            assert triangulation_asymptotic(50, g) > 0

    def test_one_part_numbers(self):
        vals = hurwitz_one_part_numbers(6, 0)
        for n, v in vals.items():
            assert v == genus0_closed("hurwitz", [1] * n) / math.factorial(2 * n - 2)

    def test_one_part_oracle(self):
        vals = hurwitz_one_part_numbers(4, 1)
        for n, v in vals.items():
            m = 2 * n
            got = hurwitz_oracle(n, m, connected=True).get(Partition([1] * n), 0)
            assert v == got / math.factorial(m)


class TestGenusZero:
    def test_rising(self):
        assert rising(5, 2) == 30 and rising(5, 0) == 1
        assert rising(5, -2) == mpq(1, 12)

    def test_examples(self):
        assert genus0_closed("hurwitz", (3,)) == 1
        assert genus0_closed("hurwitz", (2,)) == mpq(1, 2)
        assert genus0_closed("bms", (2,), m=2) == 1
        assert genus0_closed("monotonic", (2,)) == mpq(1, 2)

    def test_errors(self):
        with pytest.raises(ValueError):
            genus0_closed("bms", (2,))
        with pytest.raises(ValueError):
            genus0_closed("nope", (2,))
        with pytest.raises(ValueError):
            genus0_closed("hurwitz", ())
        # m = 1 with one part is 0 times a pole
        with pytest.raises(ZeroDivisionError):
            genus0_closed("bms", (3,), m=1)

    def test_oracles(self):
        for mu in partitions_upto(5):
            if not mu:
                continue
            m = mu.size() + mu.length() - 2
            n = mu.size()
            h = hurwitz_oracle(n, m, connected=True).get(mu, 0)
            assert h == genus0_closed("hurwitz", mu)
            assert monotonic_oracle(n, m, connected=True).get(mu, 0) == genus0_closed("monotonic", mu)
            for mm in (2, 3):
                b = bms_oracle(n, mm, connected=True)
                assert b.get((m, mu), 0) == genus0_closed("bms", mu, m=mm)

    def test_series(self):
        for kind, kw, aux in (("bms", {"m": 2}, {}), ("monotonic", {}, {"u": 8})):
            F0 = genus_part(genus_expansion(named_params(kind, **kw),
                                            Truncation(p=5, aux=aux), genus_max=0), 0)
            for mu in partitions_upto(5):
                if not mu:
                    continue
                k = mu.size() + mu.length() - 2
                spec = {f"p{x}": e for x, e in mu.multiplicities().items()}
                if k:
                    spec["u"] = k
                assert F0.coefficient(monomial(spec)) == genus0_closed(kind, mu, **kw)

