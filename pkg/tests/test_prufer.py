from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from charseq.errors import DomainError, HorizonError
from charseq.oracle import decay_table, m_k_bruteforce, pair_bruteforce
from charseq.padic import PadicDigits, PruferElement, TSequence
from charseq.prufer import (
    RunCase,
    Verdict,
    approximate_by_generator,
    arg_reduced,
    canonical_distance,
    classify_membership,
    generator_omega0,
    in_delta_neighborhood,
    pair,
    power_of_generator,
    rho,
    run_analysis,
)
from charseq.torus import DEFAULT_TOL, UnitRational

from conftest import mp_chord, mp_value


def growing(p):
    return TSequence.arithmetic(p, (2, 5, 9), 3, 1)


@st.composite
def padics(draw, p, tails=("zero", "max", "periodic")):
    prefix = draw(st.lists(st.integers(0, p - 1), max_size=10))
    kind = draw(st.sampled_from(tails))
    if kind == "zero":
        return PadicDigits.zero_tail(p, prefix)
    if kind == "max":
        return PadicDigits.max_tail(p, prefix)
    pattern = draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=4))
    return PadicDigits.periodic(p, prefix, pattern)


def test_generator():
    assert generator_omega0(2).digits(4) == [1, 0, 0, 0]
    assert generator_omega0(3) == PadicDigits.zero_tail(3, [1])
    assert pair(PruferElement(5, 1, 1), generator_omega0(5)) == UnitRational(1, 5)
    with pytest.raises(DomainError):
        generator_omega0(1)


@pytest.mark.parametrize("q, p, digits", [(5, 3, [2, 1]), (0, 2, []), (13, 2, [1, 0, 1, 1])])
def test_power_of_generator(q, p, digits):
    w = power_of_generator(q, p)
    assert w == PadicDigits.zero_tail(p, digits)


@given(st.integers(0, 10**6), st.sampled_from([2, 3, 5]), st.integers(1, 10**4), st.integers(0, 12))
def test_power_pairs_as_multiple(q, p, num, e):
    u = PruferElement(p, num, e)
    assert pair(u, power_of_generator(q, p)) == UnitRational.from_fraction(q * u.fraction)


def test_pair_examples():
    assert pair(PruferElement(2, 1, 3), PadicDigits.zero_tail(2, [1, 0, 1])) == UnitRational(5, 8)
    assert pair(PruferElement(3, 2, 4), PadicDigits.zero_tail(3)) == UnitRational(0, 1)
    assert pair(PruferElement(3, 1, 3), generator_omega0(3)) == UnitRational(1, 27)
    with pytest.raises(DomainError):
        pair(PruferElement(3, 1, 1), generator_omega0(2))


@settings(max_examples=300)
@given(st.sampled_from([2, 3, 5]).flatmap(lambda p: st.tuples(padics(p), st.integers(0, 10**6), st.integers(0, 15))))
def test_pair_matches_horner_oracle(case):
    w, num, e = case
    u = PruferElement(w.p, num, e)
    assert pair(u, w) == pair_bruteforce(u, w)


@pytest.mark.parametrize(
    "p, prefix, digits, d, m, case",
    [
        (3, (2, 5, 9), [0, 0, 0, 1, 2, 2], 3, 3, RunCase.B_MAX_RUN),
        (2, (2, 5), [1], 0, 2, RunCase.A_ZERO_RUN),
        (5, (2, 5), [0, 0, 0, 0, 0, 2], 5, 5, RunCase.C_INTERIOR),
    ],
)
def test_run_analysis_examples(p, prefix, digits, d, m, case):
    t = TSequence.explicit(p, prefix)
    w = PadicDigits.zero_tail(p, digits)
    ra = run_analysis(w, t, 2)
    assert (ra.d_k, ra.m_k, ra.case) == (d, m, case)
    assert ra.gap == t.n(2) - m
    assert ra.m_k == m_k_bruteforce(w.digits(t.n(2) + 1), p, t.n(1), t.n(2))


def test_run_analysis_rejects_first_index():
    with pytest.raises(DomainError):
        run_analysis(generator_omega0(2), growing(2), 1)
    with pytest.raises(HorizonError):
        run_analysis(generator_omega0(2), TSequence.explicit(2, (2, 5)), 3)


@settings(max_examples=300)
@given(st.sampled_from([2, 3, 5]).flatmap(lambda p: st.tuples(padics(p), st.integers(2, 8))))
def test_run_bounds_and_reduced_argument(case):
    w, k = case
    t = growing(w.p)
    ra = run_analysis(w, t, k)
    assert t.n(k - 1) <= ra.m_k <= t.n(k)
    if w.p == 2:
        assert ra.case is not RunCase.C_INTERIOR
    assert ra.m_k == m_k_bruteforce(w.digits(t.n(k) + 1), w.p, t.n(k - 1), t.n(k))
    assert arg_reduced(w, t, k) == pair_bruteforce(t.u(k), w)


def test_arg_reduced_examples():
    t = TSequence.explicit(2, (2, 5))
    assert arg_reduced(PadicDigits.zero_tail(2, [1, 0, 1, 0, 0, 0]), t, 2) == UnitRational(5, 64)
    assert arg_reduced(PadicDigits.zero_tail(2, [1, 0, 1, 1, 1, 1]), t, 2) == UnitRational(61, 64)
    assert arg_reduced(PadicDigits.zero_tail(2), t, 2) == UnitRational(0, 1)


class TestMembership:
    def test_generator_is_member(self):
        for p in (2, 3, 5):
            assert classify_membership(generator_omega0(p), growing(p), 10).verdict is Verdict.MEMBER

    def test_alternating_tail(self):
        t = growing(2)
        v = classify_membership(PadicDigits.periodic(2, [], [1, 0]), t, 20)
        assert v.verdict is Verdict.NON_MEMBER
        assert v.gap_bound == 1
        assert all(gap <= 2 for _, gap in v.evidence)
        # pairings accumulate at 1/3 or 2/3, so the chord stays near sqrt(3)
        assert v.witness_bound >= Fraction(785, 1000)

    def test_max_tail_after_prefix(self):
        w = PadicDigits.max_tail(3, [1, 0, 2, 1, 1, 0, 0, 1])
        v = classify_membership(w, growing(3), 30)
        assert v.verdict is Verdict.MEMBER
        gaps = [g for k, g in v.evidence if k >= v.settled_from]
        assert gaps == sorted(gaps) and gaps[-1] > gaps[0]

    def test_explicit_sequence_is_inconclusive(self):
        v = classify_membership(generator_omega0(2), TSequence.explicit(2, (2, 5, 9)), 10)
        assert v.verdict is Verdict.INCONCLUSIVE
        assert v.evidence == [(2, 3), (3, 4)]

    def test_horizon_validation(self):
        with pytest.raises(DomainError):
            classify_membership(generator_omega0(2), growing(2), 1)

    @settings(max_examples=60, deadline=None)
    @given(st.sampled_from([2, 3, 5]).flatmap(padics))
    def test_verdicts_agree_with_decay_table(self, w):
        t = growing(w.p)
        v = classify_membership(w, t, 12)
        if w.tail_kind == "periodic":
            assert v.verdict is Verdict.NON_MEMBER
            # every recurring phase shows a chord at least the certified bound
            for rw in v.recurring:
                assert rw.chord.hi >= rw.chord_bound
            assert max(rw.chord.hi for rw in v.recurring) >= v.witness_bound
        else:
            assert v.verdict is Verdict.MEMBER
            k_far = max(v.settled_from, 2) + 12
            table = decay_table(w, t, k_far)
            assert table.rows[-1].chord_hi < Fraction(1, 1000)


def test_canonical_distance():
    a = PadicDigits.zero_tail(2, [1, 0, 1])
    assert canonical_distance(a, a) == 0
    assert canonical_distance(a, PadicDigits.zero_tail(2, [0, 0, 1])) == 1
    assert canonical_distance(a, PadicDigits.zero_tail(2, [1, 0, 1, 1])) == Fraction(1, 8)
    assert canonical_distance(PadicDigits.periodic(3, [], [1, 2]), PadicDigits.periodic(3, [1, 2, 1], [1, 0])) == Fraction(1, 8)


class TestRho:
    def test_identity(self):
        w = PadicDigits.periodic(3, [1], [1, 2])
        c = rho(w, w, growing(3))
        assert c.total.lo == c.total.hi == 0

    def test_zero_to_generator(self):
        t = growing(2)
        c = rho(PadicDigits.zero_tail(2), generator_omega0(2), t)
        assert c.certified and c.d_part == 1 and c.argmax == 1
        # oracle: maximum over the first 20 terms, evaluated at high precision
        with mpmath.workdps(50):
            terms = [mp_chord(pair_bruteforce(t.u(k), generator_omega0(2)).fraction) for k in range(1, 21)]
            top = max(terms)
            assert mp_value(c.sup_part.lo) <= top <= mp_value(c.sup_part.hi)
            assert abs(1 + top - mpmath.mpf("1.76537")) < 1e-5
        assert c.total.width <= DEFAULT_TOL

    def test_nonmember_difference_is_flagged(self):
        t = growing(2)
        c = rho(PadicDigits.zero_tail(2), PadicDigits.periodic(2, [], [1, 0]), t)
        assert not c.certified
        assert c.sup_part.hi == 2 and c.sup_part.lo > 1

    @settings(max_examples=80, deadline=None)
    @given(st.sampled_from([2, 3]).flatmap(lambda p: st.tuples(*(padics(p, ("zero", "max")),) * 3)))
    def test_metric_axioms(self, triple):
        x, y, z = triple
        t = growing(x.p)
        xy, yx, yz, xz = rho(x, y, t), rho(y, x, t), rho(y, z, t), rho(x, z, t)
        assert xy.total == yx.total
        assert xz.total.lo <= xy.total.hi + yz.total.hi
        for c in (xy, yz, xz):
            assert c.certified and c.total.width <= DEFAULT_TOL

    def test_tail_bound_past_window(self):
        # difference starting just past n_6: every later gap is >= n_7 - 28
        t = growing(2)
        a = PadicDigits.zero_tail(2, [1, 1, 0, 1] + [0] * 24 + [1])
        b = PadicDigits.zero_tail(2, [1, 1, 0, 1])
        c = rho(a, b, t)
        gap = min(run_analysis(a - b, t, k).gap for k in range(7, 12))
        assert gap == t.n(7) - 28
        assert c.total.hi < Fraction(1, 2**28) + 2 * Fraction(315, 100) / 2**gap


class TestApproximation:
    def test_finite_support(self):
        for eps in (Fraction(1, 10), Fraction(1, 1000)):
            q, c = approximate_by_generator(PadicDigits.zero_tail(3, [2, 1]), growing(3), eps)
            assert q == 5 and c.total.hi == 0

    def test_minus_one(self):
        t = growing(3)
        w = PadicDigits.max_tail(3)
        q, c = approximate_by_generator(w, t, Fraction(1, 100))
        # digitwise-subtraction oracle: -1 - (3^(m+1) - 1) = -3^(m+1)
        m = next(m for m in range(200) if 3 ** (m + 1) - 1 == q)
        assert (w - power_of_generator(q, 3)).digits(m + 1) == [0] * (m + 1)
        assert c.certified and c.total.hi < Fraction(1, 100)

    def test_generator(self):
        q, c = approximate_by_generator(generator_omega0(2), growing(2), Fraction(1, 1000))
        assert q == 1 and c.total.hi == 0

    def test_nonmember_rejected(self):
        with pytest.raises(DomainError):
            approximate_by_generator(PadicDigits.periodic(2, [], [1, 0]), growing(2), Fraction(1, 10))

    def test_explicit_sequence_rejected(self):
        with pytest.raises(HorizonError):
            approximate_by_generator(generator_omega0(2), TSequence.explicit(2, (2, 5)), Fraction(1, 10))


def test_in_delta_neighborhood():
    t = growing(2)
    assert in_delta_neighborhood(PadicDigits.zero_tail(2), t, Fraction(1, 1000)) is True
    assert in_delta_neighborhood(generator_omega0(2), t, 2) is True
    assert in_delta_neighborhood(generator_omega0(2), t, Fraction(3, 2)) is False
    # a single digit deep inside a block of the index sequence
    delta = Fraction(1, 10)
    r0 = 7  # 2^-7 < delta / 10
    k = 8
    deep = PadicDigits.zero_tail(2, [0] * (t.n(k) + 1) + [1])
    assert t.gap(k + 1) > r0 + 2
    assert in_delta_neighborhood(deep, t, delta) is True
    assert in_delta_neighborhood(PadicDigits.periodic(2, [], [1, 0]), t, Fraction(1, 2)) is False
