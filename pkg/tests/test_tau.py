import math
import random
from collections import defaultdict

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from tauforge.maps import genus0_closed, map_oracle
from tauforge.partitions import Partition, partitions, partitions_upto
from tauforge.schur import cauchy_sum, schur, schur_row
from tauforge.series import Series, Truncation, monomial
from tauforge.symmetric_group import (all_permutations, compose, cycle_type, inverse,
                                      monotonic_oracle, num_cycles, weighted_monotonic_oracle)
from tauforge.tau import (FAMILIES, LaurentPlane, TauParams, TodaFamily, diagonal_plane,
                          double_hurwitz_tau, exp_plane, genus_expansion, genus_part,
                          map_series, n_function, named_params, orlov_shcherbin_tau,
                          plane_to_tau, plucker_g24_residual, toda_tau)


def key(mu=(), nu=None, **aux):
    spec = {}
    for part, e in Partition(mu).multiplicities().items():
        spec[f"p{part}"] = e
    if nu is not None:
        for part, e in Partition(nu).multiplicities().items():
            spec[f"q{part}"] = e
    spec.update({k: v for k, v in aux.items() if v})
    return monomial(spec)


def exp_p1(N):
    return Series.var("p1", Truncation(p=N)).exp()


class TestOrlovShcherbin:
    def test_trivial_weights(self):
        y = TauParams("one", weight=lambda c, t: Series.const(1, t))
        assert orlov_shcherbin_tau(y, Truncation(p=6)) == exp_p1(6)

    def test_hurwitz_at_zero(self):
        assert orlov_shcherbin_tau(named_params("hurwitz", u=0), Truncation(p=5)) == exp_p1(5)

    def test_hurwitz_printed(self):
        tau = orlov_shcherbin_tau(named_params("hurwitz"), Truncation(p=4, aux={"u": 4}))
        assert tau.coefficient(key((2,), u=1)) == mpq(1, 2)
        assert tau.coefficient(key((1, 1), u=2)) == mpq(1, 4)

    def test_monotonic_matches_oracle(self):
        tau = orlov_shcherbin_tau(named_params("monotonic"), Truncation(p=4, aux={"u": 4}))
        F = tau.log()
        for n in range(1, 5):
            for m in range(0, 5):
                for connected, series in ((False, tau), (True, F)):
                    got = monotonic_oracle(n, m, connected)
                    for mu in partitions(n):
                        assert series.coefficient(key(mu, u=m)) == got.get(mu, 0)

    def test_monotonic_numeric_rejected(self):
        with pytest.raises(ValueError):
            named_params("monotonic", u=mpq(1, 2))

    def test_bms_at_one(self):
        for m in (1, 2, 3):
            tau = orlov_shcherbin_tau(named_params("bms", m=m, u=1), Truncation(p=6))
            expect = sum((schur_row(k, 6).scale(mpq(math.factorial(k)) ** (m - 1))
                          for k in range(7)), Series.zero())
            assert tau == expect.with_trunc(Truncation(p=6))

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            named_params("nope")

    def test_generalized_parameters(self):
        y = named_params("generalized", u=["w", "z"])
        t = Truncation(p=3)
        assert y.y(2, t) == Series.parse("1 + 2*w + 2*z + 4*w*z")

    def test_weighted_monotonic_identity(self):
        # prod phi(X_i) in the class algebra versus the character side,
        # with phi truncated after d_3
        d = ["d0", "d1", "d2", "d3"]
        for n in range(1, 5):
            tau = orlov_shcherbin_tau(named_params("custom-phi", d=d), Truncation(p=n))
            oracle = weighted_monotonic_oracle(n, 3)
            for mu in partitions(n):
                coeff = Series({_strip_p(m): c
                                for m, c in tau.terms.items() if _p_part(m) == key(mu)})
                assert coeff == oracle.get(mu, Series.zero())


def _p_part(m):
    from tauforge.series import Q_BASE
    return tuple((v, e) for v, e in m if v < Q_BASE)


def _strip_p(m):
    from tauforge.series import Q_BASE
    return tuple((v, e) for v, e in m if v >= Q_BASE)


class TestGenusExpansion:
    @pytest.mark.parametrize("family,kw", [("hurwitz", {}), ("monotonic", {}),
                                           ("bms", {"m": 2}), ("bms", {"m": 3}),
                                           ("generalized", {"m": 2})])
    def test_parity(self, family, kw):
        y = named_params(family, **kw)
        aux = {"u": 6} if family in ("hurwitz", "monotonic") else {}
        Fh = genus_expansion(y, Truncation(p=6, aux=aux), genus_max=1)
        assert not Fh.is_zero()
        from tauforge.series import var_id
        hid = var_id("h")
        for m in Fh.terms:
            e = dict(m).get(hid, 0)
            assert e >= 0 and e % 2 == 0

    def test_trivial_phi(self):
        y = named_params("custom-phi", d=[1])
        assert genus_expansion(y, Truncation(p=5)) == Series.parse("p1")

    def test_needs_unit_constant(self):
        with pytest.raises(ValueError):
            genus_expansion(named_params("custom-phi", d=[2, 1]), Truncation(p=3))

    def test_hurwitz_genus_zero(self):
        Fh = genus_expansion(named_params("hurwitz"), Truncation(p=5, aux={"u": 8}), genus_max=0)
        F0 = genus_part(Fh, 0)
        for mu in partitions_upto(5):
            if not mu:
                continue
            m = mu.size() + mu.length() - 2
            assert F0.coefficient(key(mu, u=m)) * math.factorial(m) == genus0_closed("hurwitz", mu)

    def test_bms_value(self):
        Fh = genus_expansion(named_params("bms", m=2), Truncation(p=4), genus_max=0)
        assert genus_part(Fh, 0).coefficient(key((2,), u=1)) == 1
        assert genus0_closed("bms", (2,), m=2) == 1

    def test_matches_plain_log(self):
        # at hbar = 1 the genus parts add up to log tau
        y = named_params("bms", m=2)
        N = 4
        Fh = genus_expansion(y, Truncation(p=N), genus_max=2)
        F = orlov_shcherbin_tau(y, Truncation(p=N)).log()
        total = Series.zero()
        for g in range(3):
            total = total + genus_part(Fh, g)
        assert total.with_trunc(Truncation(p=N)) == F


class TestToda:
    def test_cauchy(self):
        t = Truncation(p=5, q=5)
        y = TauParams("one", weight=lambda c, tt: Series.const(1, tt))
        assert toda_tau(0, y, t) == cauchy_sum(t)

    def test_double_hurwitz_oracle(self):
        from tauforge.symmetric_group import double_hurwitz_oracle
        D = double_hurwitz_tau(Truncation(p=4, q=4, aux={"u": 4}))
        for n in range(1, 5):
            for m in range(0, 5):
                got = double_hurwitz_oracle(n, m)
                for mu in partitions(n):
                    for nu in partitions(n):
                        c = D.coefficient(key(mu, nu, u=m, v=n))
                        assert c * math.factorial(m) == got.get((mu, nu), 0)

    @pytest.mark.parametrize("family,kw", [("hurwitz", {}), ("bms", {"m": 2}),
                                           ("monotonic", {})])
    def test_q1_reduction(self, family, kw):
        N = 5
        y = named_params(family, **kw)
        aux = {"u": 5} if family != "bms" else {}
        t = Truncation(p=N, q=N, aux=aux)
        tau = toda_tau(0, y, t)
        red = tau.evaluate({f"q{i}": int(i == 1) for i in range(1, N + 1)},
                           Truncation(p=N, aux=aux))
        assert red == orlov_shcherbin_tau(y, Truncation(p=N, aux=aux))

    def test_family_and_charge(self):
        fam = TodaFamily(named_params("hurwitz"), Truncation(p=3, q=3, aux={"u": 3}))
        assert fam[1] == toda_tau(1, named_params("hurwitz"), fam.trunc)
        with pytest.raises(ValueError):
            fam[4]
        alt = fam.with_override(0, Series.const(1))
        assert alt[0] == Series.const(1) and fam[0] != alt[0]

    def test_r0(self):
        y = named_params("n-function", u="u")
        t = Truncation()
        assert y.r0(0, t) == 1 and y.r0(1, t) == 1
        assert y.r0(2, t) == Series.parse("u + 1")
        assert y.r0(-1, t) == Series.parse("u")
        assert y.r0(-2, t) == Series.parse("u^3 - u^2")

    def test_n_function_enumeration(self):
        # exp N counts pairs (a, b): type a, type b, u^{cycles of (ab)^{-1}} / n!
        N = 4
        Z = n_function(Truncation(p=N, q=N)).exp()
        for n in range(1, N + 1):
            counts = defaultdict(int)
            perms = all_permutations(n)
            for a in perms:
                for b in perms:
                    c = inverse(compose(a, b))
                    counts[(cycle_type(a), cycle_type(b), num_cycles(c))] += 1
            for (mu, nu, k), cnt in counts.items():
                assert Z.coefficient(key(mu, nu, u=k)) == mpq(cnt, math.factorial(n))


class TestMapSeries:
    def test_against_oracle(self):
        R = map_series(3)
        for n in (1, 2, 3):
            for kappa in partitions(2 * n):
                for m in range(1, 2 * n + 1):
                    expect = map_oracle(n, vertex_type=kappa, face_count=m, rooted=False)
                    assert R.coefficient(key(kappa, w=m, z=n)) == expect

    def test_rooted_relation(self):
        R = map_series(2)
        # one loop: kappa = (2), one edge, two faces
        assert R.coefficient(key((2,), w=2, z=1)) * 2 == 1
        # one edge between two vertices
        assert R.coefficient(key((1, 1), w=1, z=1)) * 2 == 1


class TestPlanes:
    def test_vacuum(self):
        plane = LaurentPlane({k: {-k: 1} for k in range(1, 6)}, 4)
        assert plane_to_tau(plane, Truncation(p=5)) == Series.const(1)

    def test_exp_plane(self):
        assert plane_to_tau(exp_plane(6), Truncation(p=6)) == exp_p1(6)

    @pytest.mark.parametrize("family,kw,aux", [
        ("hurwitz", {}, {"u": 4}), ("monotonic", {}, {"u": 4}), ("bms", {"m": 2}, {"u": 6}),
        ("generalized", {"m": 2}, {"u1": 3, "u2": 3})])
    def test_diagonal_plane(self, family, kw, aux):
        N = 5
        y = named_params(family, **kw)
        t = Truncation(p=N, aux=aux)
        assert plane_to_tau(diagonal_plane(y, N, t), t) == orlov_shcherbin_tau(y, t)

    def test_zero_vacuum(self):
        plane = LaurentPlane({1: {-1: 0, 0: 1}}, 4)
        with pytest.raises(ZeroDivisionError):
            plane_to_tau(plane, Truncation(p=3))

    def test_depth(self):
        with pytest.raises(Exception):
            plane_to_tau(exp_plane(3), Truncation(p=6))


class TestPlucker:
    def test_examples(self):
        e1, e2 = [1, 0, 0, 0], [0, 1, 0, 0]
        assert plucker_g24_residual(e1, e2) == 0
        assert plucker_g24_residual([1, 2, 3, 4], [1, 2, 3, 4]) == 0
        assert plucker_g24_residual([1, 2, 3, 4], [5, 6, 7, 8]) == 0

    @given(st.lists(st.integers(-50, 50), min_size=4, max_size=4),
           st.lists(st.fractions(), min_size=4, max_size=4))
    def test_random(self, a, b):
        assert plucker_g24_residual(a, [mpq(x.numerator, x.denominator) for x in b]) == 0

    def test_shape(self):
        with pytest.raises(ValueError):
            plucker_g24_residual([1, 2, 3], [1, 2, 3])


def test_families_listed():
    assert set(FAMILIES) >= {"hurwitz", "generalized", "bms", "monotonic"}
