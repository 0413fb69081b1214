import itertools
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charseq.dsum import (
    DSElement,
    DSStream,
    Formula,
    OrderSequence,
    approximate_dense,
    canonical_distance_ds,
    classify_lambda,
    membership_ds,
    pair_ds,
    refute_ds_character,
    rho_ds,
    truncate,
)
from charseq.errors import ContinuousCharacter, DomainError, HorizonError, Inconclusive
from charseq.prufer import Verdict
from charseq.torus import DEFAULT_TOL, UnitRational

from conftest import mp_chord, mp_value

LINEAR = OrderSequence.linear((2,), 1)  # b_n = n + 1
POWERS = OrderSequence.geometric((2,), 2)  # b_n = 2^n
HALF = Formula(Fraction(1, 2), 0)
ALMOST_FULL = Formula(1, -1)


def test_orders():
    assert [LINEAR.b(n) for n in range(1, 6)] == [2, 3, 4, 5, 6]
    assert [POWERS.b(n) for n in range(1, 6)] == [2, 4, 8, 16, 32]
    assert OrderSequence.linear((3, 3, 5), 2).b(5) == 9
    with pytest.raises(DomainError):
        OrderSequence.explicit((3, 2))
    with pytest.raises(DomainError):
        OrderSequence.explicit((1,))
    with pytest.raises(HorizonError):
        OrderSequence.explicit((2, 3)).b(3)


def test_stream_values():
    w = DSStream.table_rule(LINEAR, [HALF, ALMOST_FULL], prefix=[1])
    assert [w.value(n) for n in range(1, 6)] == [1, 1, 3, 2, 5]
    with pytest.raises(DomainError):
        DSStream.zero_tail(LINEAR, [2])
    with pytest.raises(DomainError):
        DSStream.constant_tail(LINEAR, 5).value(3)


def test_pair_examples():
    assert pair_ds(DSElement.basis(2), DSStream.constant_tail(LINEAR, 2)) == UnitRational(2, 3)
    assert pair_ds(DSElement(), DSStream.constant_tail(LINEAR, 1)) == UnitRational(0, 1)
    assert pair_ds(DSElement.basis(1), DSStream.constant_tail(LINEAR, 1)) == UnitRational(1, 2)
    with pytest.raises(DomainError):
        pair_ds(DSElement.basis(1, 2), DSStream.zero_tail(LINEAR))


def test_pairing_is_additive_on_small_supports():
    omega = DSStream.table_rule(LINEAR, [HALF, ALMOST_FULL, Formula(0, 1)], prefix=[1, 2])
    boxes = [range(LINEAR.b(n)) for n in (1, 2, 3)]
    elems = [DSElement({n + 1: v for n, v in enumerate(vals)}) for vals in itertools.product(*boxes)]
    for x in elems:
        for y in elems:
            s = {n: (x.get(n) + y.get(n)) % LINEAR.b(n) for n in (1, 2, 3)}
            assert pair_ds(DSElement(s), omega) == pair_ds(x, omega) + pair_ds(y, omega)


class TestMembership:
    def test_constant_one(self):
        assert membership_ds(DSStream.constant_tail(LINEAR, 1)).verdict is Verdict.MEMBER

    def test_half_is_not_member(self):
        v = membership_ds(DSStream.table_rule(LINEAR, [HALF]), K=10)
        assert v.verdict is Verdict.NON_MEMBER
        assert 0 < v.witness_bound <= 2
        # the bound holds for every ratio from settled_from on
        w = DSStream.table_rule(LINEAR, [HALF])
        with mpmath.workdps(40):
            for n in range(v.settled_from, v.settled_from + 200):
                assert mp_chord(w.ratio(n).fraction) >= mp_value(v.witness_bound)
        assert [n for n, _ in v.evidence] == list(range(1, 11))

    def test_finite_support(self):
        assert membership_ds(DSStream.zero_tail(LINEAR, [1, 2, 0, 3])).verdict is Verdict.MEMBER
        assert membership_ds(DSStream.zero_tail(OrderSequence.explicit((2, 3)), [1])).verdict is Verdict.MEMBER

    def test_explicit_orders_undecided(self):
        w = DSStream.constant_tail(OrderSequence.explicit((2, 3, 5)), 1)
        v = membership_ds(w, K=10)
        assert v.verdict is Verdict.INCONCLUSIVE and len(v.evidence) == 3

    def test_full_minus_one_is_member(self):
        # (b_n - 1) / b_n -> 1, so ||a_n / b_n|| -> 0
        assert membership_ds(DSStream.table_rule(POWERS, [ALMOST_FULL, Formula(0, 3)], [1])).verdict is Verdict.MEMBER

    def test_bad_horizon(self):
        with pytest.raises(DomainError):
            membership_ds(DSStream.zero_tail(LINEAR), K=0)


def test_canonical_distance_ds():
    a = DSStream.constant_tail(LINEAR, 1)
    assert canonical_distance_ds(a, a) == 0
    assert canonical_distance_ds(a, DSStream.zero_tail(LINEAR)) == Fraction(1, 2)
    assert canonical_distance_ds(a, DSStream.constant_tail(LINEAR, 1, prefix=[1, 1, 2])) == Fraction(1, 8)
    assert canonical_distance_ds(DSStream.table_rule(LINEAR, [HALF]), DSStream.table_rule(LINEAR, [Formula(Fraction(1, 3), 0)])) == Fraction(1, 2)
    shifted = DSStream.table_rule(LINEAR, [HALF], prefix=[1, 1, 2, 2, 2])
    assert canonical_distance_ds(DSStream.table_rule(LINEAR, [HALF]), shifted) == Fraction(1, 2**5)


class TestRho:
    def test_identity(self):
        a = DSStream.table_rule(LINEAR, [HALF], prefix=[1])
        c = rho_ds(a, a)
        assert c.total.lo == c.total.hi == 0

    def test_single_coordinate(self):
        c = rho_ds(DSElement.basis(1).as_stream(LINEAR), DSStream.zero_tail(LINEAR))
        assert c.d_part == Fraction(1, 2)
        assert c.sup_part.lo == c.sup_part.hi == 2
        assert c.total.lo == c.total.hi == Fraction(5, 2)

    def test_member_against_truncation(self):
        w = DSStream.constant_tail(LINEAR, 1)
        c = rho_ds(w, truncate(w, 700).as_stream(LINEAR))
        assert c.certified
        # the first omitted coordinate dominates: chord(1/702)
        with mpmath.workdps(40):
            top = mp_chord(Fraction(1, 702))
            assert mp_value(c.sup_part.lo) <= top <= mp_value(c.sup_part.hi)

    def test_nonmember_difference_is_uncertified(self):
        c = rho_ds(DSStream.table_rule(LINEAR, [HALF]), DSStream.zero_tail(LINEAR), max_terms=200)
        assert not c.certified and c.sup_part.hi == 2

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 3), st.lists(st.integers(0, 1), max_size=6)), min_size=3, max_size=3))
    def test_metric_axioms(self, raw):
        # a prefix of length >= 3 keeps c <= 3 below b_n = n + 1
        xs = [DSStream.constant_tail(LINEAR, c, prefix=pre + [0] * (3 - len(pre))) for c, pre in raw]
        x, y, z = xs
        xy, yx, yz, xz = rho_ds(x, y), rho_ds(y, x), rho_ds(y, z), rho_ds(x, z)
        assert xy.total == yx.total
        assert xz.total.lo <= xy.total.hi + yz.total.hi
        for c in (xy, yz, xz):
            assert c.certified and c.total.width <= DEFAULT_TOL


def test_truncate():
    w = DSStream.constant_tail(LINEAR, 1)
    assert truncate(w, 0) == DSElement()
    assert truncate(w, 3).as_dict() == {1: 1, 2: 1, 3: 1}
    f = DSStream.zero_tail(LINEAR, [1, 0, 2])
    assert truncate(f, 3) == truncate(f, 9)
    with pytest.raises(HorizonError):
        truncate(DSStream.zero_tail(OrderSequence.explicit((2, 3))), 5)


class TestDensity:
    def test_finite_support(self):
        w = DSStream.zero_tail(LINEAR, [1, 0, 2, 0])
        m, c = approximate_dense(w, Fraction(1, 10))
        assert m == 3 and c.total.hi == 0

    def test_constant_one(self):
        eps = Fraction(1, 10)
        m, c = approximate_dense(DSStream.constant_tail(LINEAR, 1), eps)
        with mpmath.workdps(40):
            target = mpmath.mpf(1) / 100
            assert 2 * mpmath.pi / (m + 2) < target
            assert 2 * mpmath.pi / (m + 1) >= target  # minimal choice
        assert Fraction(1, 2**m) < eps / 10
        assert m == 627
        assert c.certified and c.total.hi < eps

    def test_huge_eps(self):
        m, c = approximate_dense(DSStream.constant_tail(LINEAR, 1), 3)
        assert m == 0 and c.total.hi < 3

    def test_nonmember(self):
        with pytest.raises(DomainError):
            approximate_dense(DSStream.table_rule(LINEAR, [HALF]), Fraction(1, 10))

    @settings(max_examples=15, deadline=None)
    @given(
        st.sampled_from([LINEAR, POWERS, OrderSequence.linear((3, 5), 3)]),
        st.lists(st.sampled_from([Formula(0, 0), Formula(0, 1), ALMOST_FULL, Formula(0, 2)]), min_size=1, max_size=3),
        st.sampled_from([Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)]),
    )
    def test_certificates_below_eps(self, orders, table, eps):
        w = DSStream.table_rule(orders, table, prefix=[1])
        m, c = approximate_dense(w, eps)
        assert c.certified and c.total.hi < eps


class TestLambda:
    def test_examples(self):
        assert classify_lambda(DSStream.constant_tail(LINEAR, 1)).kind == "Zero"
        assert classify_lambda(DSStream.table_rule(LINEAR, [ALMOST_FULL])).kind == "One"
        lam = classify_lambda(DSStream.table_rule(LINEAR, [HALF]))
        assert lam.kind == "Interior" and lam.alpha == Fraction(1, 3)
        assert classify_lambda(DSStream.zero_tail(LINEAR, [1, 1])).kind == "FiniteSupport"

    def test_phase_choice(self):
        chi = DSStream.table_rule(LINEAR, [Formula(0, 0), HALF, ALMOST_FULL])
        assert classify_lambda(chi).kind == "Interior"
        assert classify_lambda(chi, phase=2).kind == "One"
        with pytest.raises(DomainError):
            classify_lambda(chi, phase=0)

    def test_explicit_orders(self):
        with pytest.raises(Inconclusive):
            classify_lambda(DSStream.constant_tail(OrderSequence.explicit((2, 3)), 1))


class TestRefuter:
    def test_interior_case(self):
        chi = DSStream.table_rule(LINEAR, [HALF])
        w = refute_ds_character(chi, 11, Fraction(1, 100))
        (n, v), = w.omega.support
        assert n >= 110 and v == 1 and LINEAR.b(n) > 110
        with mpmath.workdps(40):
            assert mp_chord(w.pairing.fraction) >= mpmath.pi / 3
        assert w.verification == {"neighborhood": True, "chord_above_eps": True}

    def test_zero_case_margins(self):
        chi = DSStream.constant_tail(POWERS, 1)
        w = refute_ds_character(chi, 11, Fraction(5, 1000))
        assert [c["n"] for c in w.coords] == list(range(17, 28))
        with mpmath.workdps(60):
            for c in w.coords:
                assert c["a"] == int(mpmath.floor(mpmath.mpf(2) ** c["n"] / (220 * mpmath.pi)))
            s = mp_value(w.exact_sum)
            assert mpmath.mpf("0.9") / (20 * mpmath.pi) < s < 1 / (20 * mpmath.pi)
            assert mpmath.mpf("0.01432") < s < mpmath.mpf("0.01592")
            chord = mp_chord(w.pairing.fraction)
            assert mpmath.mpf("0.090") < chord < mpmath.mpf("0.100")
        assert w.sum_in_band and w.above_004
        assert w.verification == {"neighborhood": True, "chord_above_eps": True}
        # 2^16 is below the 20 pi M^3 threshold
        assert 2**16 < 20 * 3.1416 * 11**3 < 2**17

    def test_one_case_mirrors_zero_case(self):
        chi = DSStream.table_rule(POWERS, [ALMOST_FULL])
        w = refute_ds_character(chi, 11, Fraction(5, 1000))
        zero = refute_ds_character(DSStream.constant_tail(POWERS, 1), 11, Fraction(5, 1000))
        assert w.case_tag == "LambdaOne"
        assert w.omega == zero.omega
        assert w.pairing == -zero.pairing
        assert w.sum_in_band and w.above_004 and all(w.verification.values())

    def test_continuous(self):
        with pytest.raises(ContinuousCharacter):
            refute_ds_character(DSStream.zero_tail(LINEAR, [1, 2]), 11, Fraction(1, 200))

    def test_preconditions(self):
        with pytest.raises(DomainError):
            refute_ds_character(DSStream.constant_tail(POWERS, 1), 10, Fraction(1, 200))
        with pytest.raises(DomainError):
            refute_ds_character(DSStream.constant_tail(POWERS, 1), 11, Fraction(1, 50))
        with pytest.raises(DomainError):
            # eps must stay below pi * alpha = pi / 3
            refute_ds_character(DSStream.table_rule(LINEAR, [HALF]), 11, Fraction(11, 10))

    def test_horizon(self):
        with pytest.raises(HorizonError):
            refute_ds_character(DSStream.constant_tail(LINEAR, 1), 11, Fraction(1, 200), max_index=500)

    @pytest.mark.parametrize("M", [11, 12, 20])
    def test_witnesses_verify_for_several_radii(self, M):
        for chi in (
            DSStream.constant_tail(POWERS, 3, prefix=[1]),
            DSStream.table_rule(POWERS, [Formula(1, -2)]),
            DSStream.table_rule(LINEAR, [Formula(Fraction(1, 3), 0)]),
        ):
            w = refute_ds_character(chi, M, Fraction(1, 200))
            assert all(w.verification.values())
            assert w.neighborhood_cert.total.hi < Fraction(1, M)
